"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import dga_core as dc
from .ingest import (ParseError, parse_augmentation, parse_cobordism_document, parse_dga_document,
                     resolve_cobordism, serialize_morphism)
from .scenario_verifier import ScenarioError, SweepConfig, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
ENV_PREFIX = "LCHSIGN_"


class InputError(Exception):
    """Anything that should end the run with exit code 2."""


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    fmt: str = "text"


# ---------------------------------------------------------------------------
# loading


def _read(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def load_dga(path: str | Path, rescale_n: int | None = None, out=None):
    try:
        doc = parse_dga_document(_read(path), rescale_n)
        dga = doc.to_dga()
    except ParseError as exc:
        raise InputError(f"{path}:{str(exc)[len('error:'):]}") from None
    except dc.DgaError as exc:
        raise InputError(f"{path}: {exc}") from None
    if out is not None:
        for w in doc.warnings:
            print(f"{path}: {w}", file=out)
    return dga


def load_cobordism(path: str | Path, source: str | None, target: str | None, out=None):
    """Returns (morphism, document, source path, target path). Directive paths are
    relative to the cobordism file, flags win over directives."""
    try:
        doc = parse_cobordism_document(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}:{str(exc)[len('error:'):]}") from None
    base = Path(path).parent
    src = source or (str(base / doc.source) if doc.source else None)
    tgt = target or (str(base / doc.target) if doc.target else None)
    if src is None or tgt is None:
        missing = "source" if src is None else "target"
        raise InputError(f"{path}: no {missing} DGA given (use a '{missing}' line or --{missing})")
    a, b = load_dga(src), load_dga(tgt)
    try:
        phi = resolve_cobordism(doc, a, b)
    except ParseError as exc:
        raise InputError(f"{path}:{str(exc)[len('error:'):]}") from None
    except dc.DgaError as exc:
        raise InputError(f"{path}: {exc}") from None
    if out is not None:
        for w in doc.warnings:
            print(f"{path}: {w}", file=out)
    return phi, doc, src, tgt


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, out) -> int:
    dga = load_dga(args.dga, args.rescale_n, out)
    ok = True
    for v in dc.grading_validate(dga):
        print(f"grading: {v}", file=out)
        ok = False
    for name, value in dc.d_squared_report(dga):
        print(f"d^2 {name} = {value}", file=out)
        ok = False
    print(f"{'ok' if ok else 'FAIL'}: {len(dga.names)} chords", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_morphism_check(args, out) -> int:
    phi, _, _, _ = load_cobordism(args.cobordism, args.source, args.target, out)
    ok = True
    for v in dc.grading_validate(phi):
        print(f"grading: {v}", file=out)
        ok = False
    chain, bad = dc.check_chain_map(phi)
    for name, diff in bad:
        print(f"chain map fails on {name}: Phi(d {name}) - d Phi({name}) = {diff}", file=out)
    ok = ok and chain
    print(f"{'ok' if ok else 'FAIL'}: {len(phi.source.names)} source chords", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compose(args, out) -> int:
    phi1, doc1, _, tgt1 = load_cobordism(args.first, None, None)
    phi2, doc2, src2, _ = load_cobordism(args.second, None, None)
    if phi1.target != phi2.source:
        raise InputError(f"middle DGA mismatch: {args.first} maps into {tgt1} "
                         f"but {args.second} starts from {src2}")
    text = serialize_morphism(dc.compose(phi2, phi1), doc1.source, doc2.target)
    out.write(text)
    return EXIT_OK


def cmd_verify_signs(args, out) -> int:
    cfg = args.config
    report = run_sweep(cfg.sweep)
    if cfg.fmt == "summary":
        print(report.summary(), file=out)
    else:
        if args.verbose:
            for line in report.lines:
                print(line, file=out)
        for lemma, (p, f) in report.counts.items():
            print(f"{lemma}: {p} passed, {f} failed", file=out)
        print("all ledgers agree" if report.ok else "MISMATCH", file=out)
    if not report.ok:
        print("first counterexample:", file=out)
        print(report.first_failure, file=out)
        return EXIT_FAIL
    return EXIT_OK


def _matrix_lines(block) -> list[str]:
    if not block.rows or not block.columns:
        return [f"  ({len(block.rows)}x{len(block.columns)} zero matrix)"]
    width = max(len(str(x)) for row in block.matrix for x in row)
    lines = ["  " + " ".join(c.rjust(width) for c in block.columns) + "   <- columns"]
    for name, row in zip(block.rows, block.matrix):
        lines.append("  " + " ".join(str(x).rjust(width) for x in row) + f"   {name}")
    return lines


def cmd_linearize(args, out) -> int:
    dga = load_dga(args.dga)
    try:
        aug = parse_augmentation(_read(args.augmentation), dga)
    except ParseError as exc:
        raise InputError(f"{args.augmentation}:{str(exc)[len('error:'):]}") from None
    ok, bad = dc.augmentation_check(dga, aug)
    if not ok:
        for name, value in bad.items():
            print(f"augmentation fails: aug(d {name}) = {value}", file=out)
        return EXIT_FAIL
    blocks = dc.linearized_differential(dga, aug)
    for k, blk in blocks.items():
        print(f"d_{k}: grading {k} -> {k - 1}, rank {blk.rank()}", file=out)
        for line in _matrix_lines(blk):
            print(line, file=out)
    square = dc.linearized_square(blocks)
    if square:
        print(f"linearized d^2 nonzero from gradings {square}", file=out)
        return EXIT_FAIL
    for k, r in dc.homology_ranks(blocks).items():
        print(f"H_{k} rank {r}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _env(name: str, default, convert):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return convert(raw)
    except ValueError:
        raise InputError(f"bad value for {ENV_PREFIX + name}: {raw!r}") from None


def _n_list(text: str) -> tuple[int, ...]:
    values = tuple(int(x) for x in text.replace(",", " ").split())
    if not values:
        raise ValueError(text)
    return values


def _n_arg(text: str) -> tuple[int, ...]:
    try:
        return _n_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _format(text: str) -> str:
    if text not in ("text", "summary"):
        raise ValueError(text)
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lchsign",
        description="Check DGA presentations, cobordism maps and orientation sign rules.",
        epilog="Exit codes: 0 success, 1 check failed, 2 input or usage error. "
               f"Sweep flags fall back to environment variables {ENV_PREFIX}MAX_M, {ENV_PREFIX}MAX_R, "
               f"{ENV_PREFIX}MAX_L, {ENV_PREFIX}GRADING_MIN, {ENV_PREFIX}GRADING_MAX, {ENV_PREFIX}N, "
               f"{ENV_PREFIX}SEED, {ENV_PREFIX}SAMPLES, {ENV_PREFIX}FORMAT.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="grading and d^2 = 0 checks on a DGA file")
    c.add_argument("dga")
    c.add_argument("--rescale-n", type=int, default=None, metavar="N",
                   help="multiply counts of disks with positive chord a by (-1)^((N-1)(|a|+1))")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("morphism-check", help="chain map and degree checks on a cobordism table")
    m.add_argument("cobordism")
    m.add_argument("--source", help="source DGA file (overrides the 'source' line)")
    m.add_argument("--target", help="target DGA file (overrides the 'target' line)")
    m.set_defaults(func=cmd_morphism_check)

    k = sub.add_parser("compose", help="print Phi2 o Phi1 for tables Phi1: A->B and Phi2: B->C")
    k.add_argument("first")
    k.add_argument("second")
    k.set_defaults(func=cmd_compose)

    v = sub.add_parser("verify-signs", help="compare every sign ledger against its closed form")
    v.add_argument("--max-m", type=int, help="largest disk / group count (default 5)")
    v.add_argument("--max-r", type=int, help="largest outer word length (default 5)")
    v.add_argument("--max-l", type=int, help="largest cobordism word length (default 5)")
    v.add_argument("--grading-min", type=int, help="smallest chord grading (default -3)")
    v.add_argument("--grading-max", type=int, help="largest chord grading (default 4)")
    v.add_argument("--n", type=_n_arg, help="Legendrian dimensions, comma separated (default 1,2,3)")
    v.add_argument("--samples", type=int, help="random scenarios per family (default 400)")
    v.add_argument("--seed", type=int, help="random seed (default 0)")
    v.add_argument("--format", choices=("text", "summary"), help="report style (default text)")
    v.add_argument("--verbose", action="store_true", help="print one line per scenario")
    v.set_defaults(func=cmd_verify_signs)

    li = sub.add_parser("linearize", help="linearized differential and homology ranks over Q")
    li.add_argument("dga")
    li.add_argument("augmentation")
    li.set_defaults(func=cmd_linearize)
    return p


def _sweep_config(args) -> SweepConfig:
    d = SweepConfig.__dataclass_fields__

    def pick(flag, env, convert=int):
        value = getattr(args, flag)
        return value if value is not None else _env(env, d[flag if flag != "n" else "n_values"].default, convert)

    try:
        return SweepConfig(
            max_m=pick("max_m", "MAX_M"), max_r=pick("max_r", "MAX_R"), max_l=pick("max_l", "MAX_L"),
            grading_min=pick("grading_min", "GRADING_MIN"), grading_max=pick("grading_max", "GRADING_MAX"),
            n_values=pick("n", "N", _n_list), samples=pick("samples", "SAMPLES"), seed=pick("seed", "SEED"))
    except ScenarioError as exc:
        raise InputError(str(exc)) from None


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.command == "verify-signs":
            fmt = args.format or _env("FORMAT", "text", _format)
            args.config = RunConfig(args.command, [], _sweep_config(args), fmt)
        return args.func(args, out)
    except InputError as exc:
        print(f"lchsign: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
