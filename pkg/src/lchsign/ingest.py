"""Text formats for DGAs, cobordism maps and augmentations.

One directive per line, whitespace separated, ``#`` starts a comment::

    ring Z
    chord a 1
    chord b 0
    disk a -> b b sign -1

Cobordism tables use the same ``disk`` records with the positive chord in
the source and the word in the target. Names may carry ``src.``/``tgt.``
prefixes, and ``source <path>`` / ``target <path>`` point at the end DGAs.
Augmentation files hold ``aug <chord> <value>`` lines.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .dga_core import Augmentation, Dga, DgaMorphism, Element, _NAME, word_grading

RINGS = ("Z", "Z2")
_INT = re.compile(r"[+-]?[0-9]+\Z")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(message)
        self.line = line
        self.column = column
        self.message = message

    def __str__(self) -> str:
        return f"error:{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class DimensionWarning:
    line: int
    message: str

    def __str__(self) -> str:
        return f"warning:{self.line}: {self.message}"


@dataclass
class DgaDocument:
    """Parsed DGA text: ring, chord gradings and merged disk counts."""
    ring: str = "Z"
    chords: dict[str, int] = field(default_factory=dict)
    records: dict[tuple[str, tuple[str, ...]], int] = field(default_factory=dict)
    warnings: list[DimensionWarning] = field(default_factory=list, compare=False)

    def to_dga(self) -> Dga:
        diff: dict[str, dict] = {}
        for (pos, word), count in self.records.items():
            diff.setdefault(pos, {})[word] = count
        return Dga(self.chords.items(), {k: Element(v) for k, v in diff.items()})


@dataclass
class CobordismDocument:
    ring: str = "Z"
    source: str | None = None
    target: str | None = None
    records: dict[tuple[str, tuple[str, ...]], int] = field(default_factory=dict)
    warnings: list[DimensionWarning] = field(default_factory=list, compare=False)
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def to_morphism(self, source: Dga, target: Dga) -> DgaMorphism:
        images: dict[str, dict] = {}
        for (pos, word), count in self.records.items():
            images.setdefault(pos, {})[word] = count
        return DgaMorphism(source, target, {k: Element(v) for k, v in images.items()})


# ---------------------------------------------------------------------------
# tokenizing


def _decode(data: str | bytes) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        before = data[:exc.start]
        line = before.count(b"\n") + 1
        col = exc.start - (before.rfind(b"\n") + 1) + 1
        raise ParseError(line, col, "input is not valid UTF-8") from None


def _lines(text: str) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    """Yield (line number, [(column, token)]) for non-empty lines."""
    for lineno, raw in enumerate(text.split("\n"), 1):
        if raw.endswith("\r"):
            raw = raw[:-1]
        cut = raw.find("#")
        if cut >= 0:
            raw = raw[:cut]
        tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", raw)]
        if tokens:
            yield lineno, tokens


def _int(lineno: int, tok: tuple[int, str], what: str) -> int:
    col, text = tok
    if not _INT.match(text):
        raise ParseError(lineno, col, f"{what} must be an integer, got {text!r}")
    return int(text)


def _name(lineno: int, tok: tuple[int, str]) -> str:
    col, text = tok
    if not _NAME.match(text):
        raise ParseError(lineno, col, f"invalid chord name {text!r}")
    return text


def _disk(lineno: int, toks: list[tuple[int, str]], end_col: int):
    """Split ``disk <pos> -> <word> sign <int>`` into its pieces (raw tokens)."""
    if len(toks) < 2:
        raise ParseError(lineno, end_col, "disk record needs a positive chord")
    if len(toks) < 3 or toks[2][1] != "->":
        where = toks[2][0] if len(toks) > 2 else end_col
        raise ParseError(lineno, where, "expected '->' after the positive chord")
    try:
        at = next(i for i in range(3, len(toks)) if toks[i][1] == "sign")
    except StopIteration:
        raise ParseError(lineno, end_col, "disk record needs 'sign <count>'") from None
    if at != len(toks) - 2:
        where = toks[at + 2][0] if at + 2 < len(toks) else end_col
        raise ParseError(lineno, where, "expected exactly one count after 'sign'")
    count = _int(lineno, toks[at + 1], "count")
    if count == 0:
        raise ParseError(lineno, toks[at + 1][0], "count must be a nonzero integer")
    return toks[1], toks[3:at], count


def _ring(lineno: int, toks, seen_ring: bool, end_col: int) -> str:
    if seen_ring:
        raise ParseError(lineno, toks[0][0], "ring declared twice")
    if len(toks) != 2:
        raise ParseError(lineno, toks[2][0] if len(toks) > 2 else end_col, "expected 'ring Z' or 'ring Z2'")
    if toks[1][1] not in RINGS:
        raise ParseError(lineno, toks[1][0], f"unknown ring {toks[1][1]!r}")
    return toks[1][1]


def _end(text_line: list[tuple[int, str]]) -> int:
    col, tok = text_line[-1]
    return col + len(tok)


def _merge(records: dict, key, count: int, ring: str) -> None:
    total = records.get(key, 0) + count
    if ring == "Z2":
        total %= 2
    if total:
        records[key] = total
    else:
        records.pop(key, None)


# ---------------------------------------------------------------------------
# DGA documents


def parse_dga_document(data: str | bytes, rescale_n: int | None = None) -> DgaDocument:
    """Parse DGA text. ``rescale_n`` multiplies each count with positive
    chord a by (-1)^{(n-1)(|a|+1)} (alternative sign convention; off by default)."""
    text = _decode(data)
    doc = DgaDocument()
    seen_ring = False
    pending = []
    for lineno, toks in _lines(text):
        head = toks[0][1]
        end = _end(toks)
        if head == "ring":
            doc.ring = _ring(lineno, toks, seen_ring, end)
            seen_ring = True
        elif head == "chord":
            if len(toks) != 3:
                raise ParseError(lineno, toks[3][0] if len(toks) > 3 else end, "expected 'chord <name> <grading>'")
            name = _name(lineno, toks[1])
            if name in doc.chords:
                raise ParseError(lineno, toks[1][0], f"duplicate chord {name!r}")
            doc.chords[name] = _int(lineno, toks[2], "grading")
        elif head == "disk":
            pending.append((lineno, _disk(lineno, toks, end)))
        else:
            raise ParseError(lineno, toks[0][0], f"unknown directive {head!r}")
    for lineno, ((pcol, ptext), word_toks, count) in pending:
        pos = _name(lineno, (pcol, ptext))
        if pos not in doc.chords:
            raise ParseError(lineno, pcol, f"undefined chord {pos!r}")
        word = []
        for tok in word_toks:
            name = _name(lineno, tok)
            if name not in doc.chords:
                raise ParseError(lineno, tok[0], f"undefined chord {name!r}")
            word.append(name)
        word = tuple(word)
        if rescale_n is not None and ((rescale_n - 1) * (doc.chords[pos] + 1)) % 2:
            count = -count
        found = word_grading(word, doc.chords)
        if found != doc.chords[pos] - 1:
            doc.warnings.append(DimensionWarning(lineno, f"disk {pos} -> {' '.join(word) or '1'}: "
                                                 f"|{pos}| - |word| - 1 = {doc.chords[pos] - found - 1}, expected 0"))
        _merge(doc.records, (pos, word), count, doc.ring)
    return doc


def parse_dga(data: str | bytes, rescale_n: int | None = None) -> Dga:
    return parse_dga_document(data, rescale_n).to_dga()


def _record_lines(records: dict, prefix_pos: str = "", prefix_word: str = "") -> list[str]:
    out = []
    for (pos, word), count in sorted(records.items()):
        neg = " ".join(prefix_word + w for w in word)
        arrow = f"-> {neg} " if neg else "-> "
        out.append(f"disk {prefix_pos}{pos} {arrow}sign {count}")
    return out


def serialize_document(doc: DgaDocument) -> str:
    lines = [f"ring {doc.ring}"]
    lines += [f"chord {name} {doc.chords[name]}" for name in sorted(doc.chords)]
    lines += _record_lines(doc.records)
    return "\n".join(lines) + "\n"


def document_from_dga(dga: Dga) -> DgaDocument:
    records = {}
    for name in dga.names:
        for word, c in dga.d(name):
            records[(name, word)] = c
    return DgaDocument("Z", dga.gradings, records)


def serialize_dga(dga: Dga) -> str:
    return serialize_document(document_from_dga(dga))


# ---------------------------------------------------------------------------
# cobordism documents


def _strip(lineno: int, tok: tuple[int, str], prefix: str) -> tuple[int, str]:
    col, text = tok
    other = "tgt." if prefix == "src." else "src."
    if text.startswith(other):
        side = "source" if prefix == "src." else "target"
        raise ParseError(lineno, col, f"{text!r} is in the wrong place, expected a {side} chord")
    if text.startswith(prefix):
        return col + len(prefix), text[len(prefix):]
    return col, text


def parse_cobordism_document(data: str | bytes) -> CobordismDocument:
    """Syntax only; chord names are resolved by :func:`resolve_cobordism`."""
    text = _decode(data)
    doc = CobordismDocument()
    seen_ring = False
    for lineno, toks in _lines(text):
        head = toks[0][1]
        end = _end(toks)
        if head == "ring":
            doc.ring = _ring(lineno, toks, seen_ring, end)
            seen_ring = True
        elif head in ("source", "target"):
            if len(toks) != 2:
                raise ParseError(lineno, toks[2][0] if len(toks) > 2 else end, f"expected '{head} <path>'")
            if getattr(doc, head) is not None:
                raise ParseError(lineno, toks[0][0], f"{head} declared twice")
            setattr(doc, head, toks[1][1])
        elif head == "disk":
            pos_tok, word_toks, count = _disk(lineno, toks, end)
            pos_tok = _strip(lineno, pos_tok, "src.")
            word_toks = [_strip(lineno, t, "tgt.") for t in word_toks]
            pos = _name(lineno, pos_tok)
            word = tuple(_name(lineno, t) for t in word_toks)
            doc.positions.setdefault((pos, word), (lineno, pos_tok, word_toks))
            _merge(doc.records, (pos, word), count, doc.ring)
        else:
            raise ParseError(lineno, toks[0][0], f"unknown directive {head!r}")
    return doc


def resolve_cobordism(doc: CobordismDocument, source: Dga, target: Dga) -> DgaMorphism:
    """Check chord names against the end DGAs and build the morphism.

    Degree mismatches (|a| != |word|) are appended to ``doc.warnings``."""
    doc.warnings.clear()
    for key in sorted(doc.positions):
        lineno, pos_tok, word_toks = doc.positions[key]
        pos, word = key
        if pos not in source:
            raise ParseError(lineno, pos_tok[0], f"chord {pos!r} is not in the source DGA")
        for tok, name in zip(word_toks, word):
            if name not in target:
                raise ParseError(lineno, tok[0], f"chord {name!r} is not in the target DGA")
        found = word_grading(word, target.gradings)
        if found != source.grading(pos):
            doc.warnings.append(DimensionWarning(lineno, f"disk {pos} -> {' '.join(word) or '1'}: "
                                                 f"|{pos}| - |word| = {source.grading(pos) - found}, expected 0"))
    doc.warnings.sort(key=lambda w: w.line)
    return doc.to_morphism(source, target)


def parse_cobordism(data: str | bytes, source: Dga, target: Dga) -> DgaMorphism:
    return resolve_cobordism(parse_cobordism_document(data), source, target)


def document_from_morphism(phi: DgaMorphism, source: str | None = None,
                           target: str | None = None) -> CobordismDocument:
    records = {}
    for name in phi.source.names:
        for word, c in phi.image(name):
            records[(name, word)] = c
    return CobordismDocument("Z", source, target, records)


def serialize_cobordism_document(doc: CobordismDocument) -> str:
    lines = [f"ring {doc.ring}"]
    if doc.source is not None:
        lines.append(f"source {doc.source}")
    if doc.target is not None:
        lines.append(f"target {doc.target}")
    lines += _record_lines(doc.records, "src.", "tgt.")
    return "\n".join(lines) + "\n"


def serialize_morphism(phi: DgaMorphism, source: str | None = None, target: str | None = None) -> str:
    return serialize_cobordism_document(document_from_morphism(phi, source, target))


# ---------------------------------------------------------------------------
# augmentations


def parse_augmentation(data: str | bytes, dga: Dga | None = None) -> Augmentation:
    """``aug <chord> <value>`` lines; unlisted chords map to 0."""
    text = _decode(data)
    values: dict[str, int] = {}
    for lineno, toks in _lines(text):
        if toks[0][1] != "aug":
            raise ParseError(lineno, toks[0][0], f"unknown directive {toks[0][1]!r}")
        if len(toks) != 3:
            raise ParseError(lineno, toks[3][0] if len(toks) > 3 else _end(toks), "expected 'aug <chord> <value>'")
        name = _name(lineno, toks[1])
        if name in values:
            raise ParseError(lineno, toks[1][0], f"duplicate value for {name!r}")
        if dga is not None and name not in dga:
            raise ParseError(lineno, toks[1][0], f"undefined chord {name!r}")
        values[name] = _int(lineno, toks[2], "value")
        if values[name] and dga is not None and dga.grading(name) != 0:
            raise ParseError(lineno, toks[2][0], f"augmentation must vanish on {name!r}, which has grading {dga.grading(name)}")
    return Augmentation(values)


def serialize_augmentation(aug: Augmentation) -> str:
    return "".join(f"aug {k} {aug.values[k]}\n" for k in sorted(aug.values))
