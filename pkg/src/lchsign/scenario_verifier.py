"""Formal capped problems, their gluing sequences, and sign ledgers.

Each verifier assembles the two gluing sequences of a broken configuration
as pairs of SummandColumns (kernel column, cokernel column), replays the
rearrangements one move at a time through the Koszul engine, and compares
the accumulated sign with the closed-form expression. Dimensions are the
parity representatives fixed by the capping conditions and rigidity.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import _linalg as la
from .graded_lines import SummandColumn, StructureError, koszul_sign, _permutation

POSITIVE = "positive"
NEGATIVE = "negative"
SETTINGS = ("lagrangian_projection", "symplectization", "cobordism")


class ScenarioError(ValueError):
    """Scenario parameters violate a range or rigidity constraint."""


def _pow(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# capping systems and formal operators


@dataclass(frozen=True)
class CappingSystemParams:
    n: int
    d_A: int | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ScenarioError("n must be a positive integer")
        if self.d_A is None:
            object.__setattr__(self, "d_A", 1 if self.n == 1 else 2)
        if self.d_A not in (1, 2):
            raise ScenarioError("d_A must be 1 or 2")

    @property
    def aux(self) -> int:
        """Dimension of the R^{n+d_A} summand."""
        return self.n + self.d_A


def capping_parities(grading: int, polarity: str, params: CappingSystemParams) -> tuple[int, int]:
    """(kernel parity, cokernel parity) forced on a capping operator."""
    if polarity == POSITIVE:
        return 0, (grading + params.n + params.d_A + 1) % 2
    if polarity == NEGATIVE:
        return 1, grading % 2
    raise ScenarioError(f"unknown polarity {polarity!r}")


def glued_capping_sign(grading: int, params: CappingSystemParams) -> int:
    """Sign of the glued capping disk at a chord relative to canonical."""
    return _pow(grading + params.n + params.d_A + 1)


@dataclass(frozen=True)
class FormalCappingOp:
    chord_grading: int
    polarity: str
    ker_parity: int
    coker_parity: int
    params: CappingSystemParams
    orient: int = 1

    def __post_init__(self):
        expected = capping_parities(self.chord_grading, self.polarity, self.params)
        if (self.ker_parity % 2, self.coker_parity % 2) != expected:
            raise ScenarioError(
                f"capping operator at |p|={self.chord_grading} ({self.polarity}) is not admissible: "
                f"parities {(self.ker_parity, self.coker_parity)} != {expected}")
        if self.orient not in (1, -1):
            raise ScenarioError("orientation token must be +1 or -1")

    @classmethod
    def build(cls, grading: int, polarity: str, params: CappingSystemParams, orient: int = 1):
        k, c = capping_parities(grading, polarity, params)
        return cls(grading, polarity, k, c, params, orient)


@dataclass(frozen=True)
class FormalDiskOp:
    """The linearized problem of a disk with one positive puncture.

    Only disks with at least two negative punctures are modeled; then the
    kernel is R_t in the symplectization and zero otherwise.
    """
    pos_chord: int
    neg_chords: tuple[int, ...]
    setting: str
    rigid: bool = True

    def __post_init__(self):
        object.__setattr__(self, "neg_chords", tuple(self.neg_chords))
        if self.setting not in SETTINGS:
            raise ScenarioError(f"unknown setting {self.setting!r}")
        if len(self.neg_chords) < 2:
            raise ScenarioError("disks need at least two negative punctures here")
        if self.rigid and self.moduli_dim != 0:
            raise ScenarioError(
                f"rigid {self.setting} disk violates the dimension formula: "
                f"|a|={self.pos_chord}, sum |b|={sum(self.neg_chords)}")

    @property
    def moduli_dim(self) -> int:
        shift = 0 if self.setting == "cobordism" else 1
        return self.pos_chord - sum(self.neg_chords) - shift

    @property
    def punctures(self) -> int:
        return len(self.neg_chords)

    @property
    def ker_parity(self) -> int:
        return 1 if self.setting == "symplectization" else 0

    @property
    def coker_parity(self) -> int:
        # index + (m - 2) = dim of the unquotiented solution space
        return (self.punctures + self.moduli_dim) % 2


# ---------------------------------------------------------------------------
# conformal variations


@dataclass(frozen=True)
class ConformalSlot:
    """A signed basis (sign, j) for ∂_{p_j} of the conformal variations of a
    disk with m negative punctures; p_0 is the positive puncture."""
    m: int
    basis: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.m < 2:
            raise ScenarioError("need at least two negative punctures")
        if self.basis is None:
            object.__setattr__(self, "basis", tuple((1, j) for j in range(self.m, 2, -1)))
        object.__setattr__(self, "basis", tuple(tuple(x) for x in self.basis))
        idx = [j for _, j in self.basis]
        if len(idx) != self.m - 2 or len(set(idx)) != len(idx) or any(not 1 <= j <= self.m for j in idx):
            raise ScenarioError("basis must use m-2 distinct punctures among p_1..p_m")
        if any(s not in (1, -1) for s, _ in self.basis):
            raise ScenarioError("basis signs must be +1 or -1")

    @classmethod
    def omitting(cls, m: int, a: int, b: int) -> "ConformalSlot":
        """The basis omitting p_0, p_a, p_b: descending order, vectors strictly
        between a and b negated. It carries the default orientation."""
        a, b = sorted((a, b))
        return cls(m, tuple((-1 if a < j < b else 1, j) for j in range(m, 0, -1) if j not in (a, b)))

    def orientation(self) -> int:
        """Sign relative to the default basis (∂_{p_m}, ..., ∂_{p_3})."""
        idx = [j for _, j in self.basis]
        a, b = sorted(set(range(1, self.m + 1)) - set(idx))
        s = 1
        for sg, _ in self.basis:
            s *= sg
        s *= _perm_parity_sign([-j for j in idx])
        return s * _pow(sum(1 for j in idx if a < j < b))


def _perm_parity_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return _pow(inv)


def conformal_glue_sign(m1: int, m2: int, k: int) -> int:
    """Closed form for the sign of TC_{m2} ⊕ TC_{m1} ⊕ R -> TC_{m1+m2-1}."""
    _check_conformal(m1, m2, k)
    return _pow((m1 - 1) * k + 1)


def _check_conformal(m1, m2, k):
    if m1 < 2 or m2 < 2:
        raise ScenarioError("m1, m2 must be at least 2")
    if not 1 <= k <= m2:
        raise ScenarioError(f"k={k} out of range 1..{m2}")


# ---------------------------------------------------------------------------
# ledgers


@dataclass(frozen=True)
class LedgerStep:
    name: str
    sign: int
    note: str = ""
    # (dims, permutation) pairs of the block moves behind a reorder step
    moves: tuple = ()
    coefficient: int = 1


@dataclass(frozen=True)
class Ledger:
    name: str
    steps: tuple[LedgerStep, ...]
    closed_form: int

    @property
    def total(self) -> int:
        out = 1
        for s in self.steps:
            out *= s.sign
        return out

    @property
    def agrees(self) -> bool:
        return self.total == self.closed_form

    def render(self) -> str:
        lines = [f"{self.name}: total {self.total:+d}, closed form {self.closed_form:+d}"]
        for s in self.steps:
            lines.append(f"  {s.sign:+d}  {s.name}" + (f"  ({s.note})" if s.note else ""))
        return "\n".join(lines)


@dataclass(frozen=True)
class ScenarioResult:
    variant: str
    params: str
    ledgers: tuple[Ledger, ...]

    @property
    def ledger(self) -> Ledger:
        return self.ledgers[0]

    @property
    def sign(self) -> int:
        return self.ledger.total

    @property
    def agrees(self) -> bool:
        return all(l.agrees for l in self.ledgers)

    def __getitem__(self, name: str) -> Ledger:
        for l in self.ledgers:
            if l.name == name:
                return l
        raise KeyError(name)

    def line(self) -> str:
        parts = " ".join(f"{l.name}={l.total:+d}/{l.closed_form:+d}" for l in self.ledgers)
        return f"{self.variant} {self.params} {parts} {'ok' if self.agrees else 'MISMATCH'}"


def conformal_glue_ledger(m1: int, m2: int, k: int) -> ScenarioResult:
    """Replay the conformal gluing sign with signed puncture symbols.

    The glued disk lists punctures (p_0..p_{k-1}, q_1..q_{m1}, p_{k+1}..p_{m2}).
    The big disk's default basis is first rewritten in a basis omitting
    {p_0, p_k, p_j} (j a neighbour of k), which has the default orientation;
    the small disk keeps (∂_{q_m1}, ..., ∂_{q_3}); the outward normal is
    written last. Every admissible way of writing the normal (as ∂_{q_1},
    or as -∂_{p_{k-1}}, or as ∂_{p_{k+1}} = -∂_{q_m1}) is replayed and all
    must agree.
    """
    _check_conformal(m1, m2, k)
    labels = [("p", i) for i in range(k)] + [("q", i) for i in range(1, m1 + 1)] + \
             [("p", i) for i in range(k + 1, m2 + 1)]
    pos = {lab: j for j, lab in enumerate(labels)}
    m = m1 + m2 - 1
    small = [(1, ("q", i)) for i in range(m1, 2, -1)]

    def replay(j: int, normal):
        big = ConformalSlot.omitting(m2, k, j) if m2 > 2 else ConformalSlot(m2)
        rebase_sign = big.orientation()
        glued = [(s, pos[("p", i)]) for s, i in big.basis] + [(s, pos[lab]) for s, lab in small]
        glued.append((normal[0], pos[normal[1]]))
        idx = [x for _, x in glued]
        if len(set(idx)) != len(idx):
            return None
        return rebase_sign, ConformalSlot(m, tuple(glued)).orientation()

    reps = []
    j_for_q1 = k - 1 if k >= 2 else 2
    reps.append(("normal = +d q_1", j_for_q1, (1, ("q", 1))))
    if k >= 2:
        reps.append(("normal = -d p_{k-1}", k - 1, (-1, ("p", k - 1))))
    if k < m2:
        reps.append(("normal = +d p_{k+1}", k + 1, (1, ("p", k + 1))))
    results = []
    for name, j, normal in reps:
        if m2 == 2 or 1 <= j <= m2:
            r = replay(j, normal)
            if r is not None:
                results.append((name, r))
    if not results:
        raise ScenarioError("no admissible basis representation")
    name0, (rebase0, total0) = results[0]
    steps = [
        LedgerStep("rebase big disk", rebase0, "basis omitting p_0, p_k and a neighbour"),
        LedgerStep("concatenate and append outward normal", rebase0 * total0, name0),
    ]
    for name, (_, total) in results[1:]:
        steps.append(LedgerStep(f"alternative: {name}", total * total0,
                                "+1 iff this representation agrees"))
    return ScenarioResult("conformal", f"m1={m1} m2={m2} k={k}",
                          (Ledger("conformal", tuple(steps), conformal_glue_sign(m1, m2, k)),))


# ---------------------------------------------------------------------------
# gluing sequences


@dataclass(frozen=True)
class GluingSequence:
    """Middle two columns of a gluing sequence: kernels then cokernels."""
    kernels: SummandColumn
    cokernels: SummandColumn

    @classmethod
    def of(cls, kernels: Iterable[tuple[str, int]], cokernels: Iterable[tuple[str, int]]):
        return cls(SummandColumn.of(*kernels), SummandColumn.of(*cokernels))

    def lifted(self, extra: dict) -> "GluingSequence":
        def lift(col):
            return col.relabel_dims({s.label: s.dim + extra.get(s.label, 0) for s in col.summands})
        return GluingSequence(lift(self.kernels), lift(self.cokernels))


class _Replay:
    """Mutable scratchpad used while building one ledger."""

    def __init__(self, seq: GluingSequence):
        self.seq = seq
        self.steps: list[LedgerStep] = []

    def reorder(self, name: str, ker=None, coker=None, note: str = "") -> int:
        moves = []
        sign = 1
        cols = {}
        for key, col, target in (("k", self.seq.kernels, ker), ("c", self.seq.cokernels, coker)):
            if target is None:
                cols[key] = col
                continue
            target = list(target)
            perm = _permutation(col.labels, target)
            s = koszul_sign(col.dims, perm)
            moves.append((col.dims, tuple(perm)))
            sign *= s
            cols[key] = SummandColumn(tuple(col.summands[i] for i in perm), col.sign * s)
        self.seq = GluingSequence(cols["k"], cols["c"])
        self.steps.append(LedgerStep(name, sign, note, tuple(moves)))
        return sign

    def strip(self, name: str, pairs: Sequence[tuple[str, str]], coefficient: int = 1, note: str = "") -> None:
        """Drop kernel/cokernel pairs identified by the gluing map. They must
        sit at the bottom of both columns, in the same order."""
        kl, cl = self.seq.kernels.labels, self.seq.cokernels.labels
        npairs = len(pairs)
        if list(kl[len(kl) - npairs:]) != [p[0] for p in pairs] or \
                list(cl[len(cl) - npairs:]) != [p[1] for p in pairs]:
            raise StructureError(f"{name}: pairs are not trailing in both columns")
        for a, b in pairs:
            if self.seq.kernels[a].dim != self.seq.cokernels[b].dim:
                raise StructureError(f"{name}: {a} and {b} differ in dimension")
        ker = SummandColumn(self.seq.kernels.summands[:len(kl) - npairs], self.seq.kernels.sign)
        cok = SummandColumn(self.seq.cokernels.summands[:len(cl) - npairs], self.seq.cokernels.sign)
        self.seq = GluingSequence(ker, cok)
        self.steps.append(LedgerStep(name, coefficient, note, coefficient=coefficient))

    def add(self, name: str, sign: int, note: str = "") -> None:
        self.steps.append(LedgerStep(name, sign, note))

    def expect(self, other: GluingSequence) -> None:
        if (self.seq.kernels.labels, self.seq.cokernels.labels) != \
                (other.kernels.labels, other.cokernels.labels):
            raise RuntimeError("ledger replay did not reach the target sequence:\n"
                               f"  have {self.seq.kernels.labels} | {self.seq.cokernels.labels}\n"
                               f"  want {other.kernels.labels} | {other.cokernels.labels}")


def _after(order: Sequence, items: Sequence, anchor=None) -> list:
    """Move ``items`` (kept in the given order) to just after ``anchor``
    (to the top when anchor is None)."""
    rest = [x for x in order if x not in set(items)]
    at = 0 if anchor is None else rest.index(anchor) + 1
    return rest[:at] + list(items) + rest[at:]


def _bottom(order: Sequence, items: Sequence) -> list:
    rest = [x for x in order if x not in set(items)]
    return rest + list(items)


def _swap(order: Sequence, a, b) -> list:
    out = list(order)
    i, j = out.index(a), out.index(b)
    out[i], out[j] = out[j], out[i]
    return out


def _lift_table(seqs: Sequence[GluingSequence], rng: random.Random | None) -> dict:
    if rng is None:
        return {}
    labels = sorted({lab for s in seqs for col in (s.kernels, s.cokernels) for lab in col.labels})
    # R_t lines, including the kernels of symplectization disks, are genuinely
    # one-dimensional and get identified with each other
    fixed = ("R_t", "Ker u")
    return {lab: 2 * rng.randint(0, 2) for lab in labels if not lab.startswith(fixed)}


def _tokens_identity(n_tokens: int, ledger_rel: Callable, closed_rel: Callable) -> bool:
    """True iff two token relations agree for every assignment of ±1 tokens."""
    for tokens in itertools.product((1, -1), repeat=n_tokens):
        if ledger_rel(tokens) != closed_rel(tokens):
            return False
    return True


# ---------------------------------------------------------------------------
# scenarios


def _grading_range(values: Iterable[int]) -> None:
    for v in values:
        if not isinstance(v, int):
            raise ScenarioError("gradings must be integers")


@dataclass(frozen=True)
class DSquaredScenario:
    """Broken disk: A = u_1 in M(b_k; f_1..f_{m-1}) glued at the k-th
    negative puncture of B = u_2 in M(a; b_1..b_r), both in the
    symplectization."""
    b: tuple[int, ...]
    k: int
    f: tuple[int, ...]
    params: CappingSystemParams

    variant = "dsquared"

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "f", tuple(self.f))
        _grading_range(self.b + self.f)
        if self.r < 2 or self.m < 3:
            raise ScenarioError("need m > 2 and r > 1")
        if not 1 <= self.k <= self.r:
            raise ScenarioError(f"k={self.k} out of range 1..{self.r}")
        _ = (self.disk_A, self.disk_B)  # building the disks checks rigidity

    @property
    def m(self) -> int:
        return len(self.f) + 1

    @property
    def r(self) -> int:
        return len(self.b)

    @property
    def a(self) -> int:
        return sum(self.b) + 1

    @property
    def disk_A(self) -> FormalDiskOp:
        return FormalDiskOp(self.b[self.k - 1], self.f, "symplectization")

    @property
    def disk_B(self) -> FormalDiskOp:
        return FormalDiskOp(self.a, self.b, "symplectization")

    def describe(self) -> str:
        return (f"b={list(self.b)} k={self.k} f={list(self.f)} "
                f"n={self.params.n} dA={self.params.d_A}")


def _cap_dims(grading: int, params: CappingSystemParams):
    pos = capping_parities(grading, POSITIVE, params)
    neg = capping_parities(grading, NEGATIVE, params)
    return pos, neg


def dsquared_sequences(sc: DSquaredScenario) -> tuple[GluingSequence, GluingSequence]:
    """The two capped gluing sequences of the broken disk."""
    p = sc.params
    m, r, k = sc.m, sc.r, sc.k
    A, B = sc.disk_A, sc.disk_B
    cap_a_pos = FormalCappingOp.build(sc.a, POSITIVE, p)
    cap_bk_pos = FormalCappingOp.build(sc.b[k - 1], POSITIVE, p)
    negs_b = {j: FormalCappingOp.build(sc.b[j - 1], NEGATIVE, p) for j in range(1, r + 1)}
    negs_f = {j: FormalCappingOp.build(sc.f[j - 1], NEGATIVE, p) for j in range(1, m)}
    kb = [(f"Ker b{j}-", negs_b[j].ker_parity) for j in range(r, 0, -1)]
    kf = [(f"Ker f{j}-", negs_f[j].ker_parity) for j in range(m - 1, 0, -1)]
    cb = [(f"Coker b{j}-", negs_b[j].coker_parity) for j in range(r, 0, -1)]
    cf = [(f"Coker f{j}-", negs_f[j].coker_parity) for j in range(m - 1, 0, -1)]
    rt_b, rt_a = ("R_t^B", B.ker_parity), ("R_t^A", A.ker_parity)
    cok_b, cok_a = ("Coker B", B.coker_parity), ("Coker A", A.coker_parity)
    cap_a = ("Coker a+", cap_a_pos.coker_parity)
    cap_bk = ("Coker bk+", cap_bk_pos.coker_parity)
    rn = ("R^{n+dA}", p.aux)
    kbk, cbk = kb[r - k], cb[r - k]

    seq1 = GluingSequence.of(
        [rt_b] + kb + [rt_a] + kf,
        [cok_b, cap_a] + cb + [("R_t", 1), rn, cok_a, cap_bk] + cf)
    seq2 = GluingSequence.of(
        [rt_b, rt_a] + kb[:r - k] + kf + kb[r - k + 1:] + [("R_t cap", 1), kbk],
        [cok_b, ("R_t", 1), cok_a, cap_a] + cb[:r - k] + cf + cb[r - k + 1:]
        + [("R_t glue", 1), rn, cap_bk, cbk])
    return seq1, seq2


def dsquared_closed_form(sc: DSquaredScenario) -> int:
    return _pow(sc.m * sc.k + sum(sc.b[:sc.k - 1]) + sc.r + 1)


def dsquared_rearrangement_sign(sc: DSquaredScenario, lift: random.Random | None = None) -> ScenarioResult:
    """Replay the comparison of the two gluings of a broken disk.

    The main ledger compares the orientations induced by the two sequences
    (including the glued capping disk at b_k). A second ledger derives the
    total boundary-orientation exponent nu_3 = sigma~ + sigma_0 + index terms.
    """
    seq1, seq2 = dsquared_sequences(sc)
    extra = _lift_table((seq1, seq2), lift)
    seq1, seq2 = seq1.lifted(extra), seq2.lifted(extra)
    k, r = sc.k, sc.r
    kf = [f"Ker f{j}-" for j in range(sc.m - 1, 0, -1)]
    cf = [f"Coker f{j}-" for j in range(sc.m - 1, 0, -1)]

    # second sequence: drop the R_t pair of the glued capping disk at b_k
    two = _Replay(seq2)
    two.reorder("move R_t pair to the bottom",
                ker=_bottom(seq2.kernels.labels, ["R_t cap"]),
                coker=_bottom(seq2.cokernels.labels, ["R_t glue"]))
    two.strip("remove R_t pair", [("R_t cap", "R_t glue")])

    one = _Replay(seq1)
    one.reorder("sigma_1: R_t^A under R_t^B, R_t under Coker B",
                ker=_after(seq1.kernels.labels, ["R_t^A"], "R_t^B"),
                coker=_after(seq1.cokernels.labels, ["R_t"], "Coker B"))
    one.reorder("Coker A under R_t", coker=_after(one.seq.cokernels.labels, ["Coker A"], "R_t"))
    kl = list(one.seq.kernels.labels)
    kbk = f"Ker b{k}-"
    target = [x for x in kl if x not in kf]
    target = target[:target.index(kbk)] + kf + target[target.index(kbk) + 1:] + [kbk]
    one.reorder("sigma_2: exchange Ker f-block and Ker b_k-", ker=target)
    cl = list(one.seq.cokernels.labels)
    cbk = f"Coker b{k}-"
    target = [x for x in cl if x not in cf]
    target = target[:target.index(cbk)] + cf + target[target.index(cbk) + 1:] + [cbk]
    one.reorder("sigma_3: exchange Coker f-block and Coker b_k-", coker=target)
    one.expect(two.seq)
    glued = glued_capping_sign(sc.b[k - 1], sc.params)

    steps = two.steps + one.steps + [LedgerStep("glued capping disk at b_k", glued)]
    main = Ledger("sigma~", tuple(steps), dsquared_closed_form(sc))

    # nu_3: add sigma_0 (R_t past Coker A, then the identified pair) and the index correction
    sig0 = _Replay(GluingSequence.of([("R_t^B", 1), ("R_t^A", 1)],
                                     [("Coker B", sc.disk_B.coker_parity), ("R_t", 1),
                                      ("Coker A", sc.disk_A.coker_parity)]).lifted(extra))
    sig0.reorder("sigma_0: R_t past Coker A",
                 ker=["R_t^B", "R_t^A"], coker=["Coker B", "Coker A", "R_t"])
    # kernel R_t -> (t, t); complement R_t^A maps to t - s = +t
    coef = la.det_sign(la.to_matrix([[1, 0], [1, 1]]))
    sig0.strip("identify R_t^A with R_t", [("R_t^A", "R_t")], coef, "t -> (t,t), (s,t) -> (0,t-s,0)")
    glued_disk = FormalDiskOp(sc.a, sc.b[:k - 1] + sc.f + sc.b[k:], "symplectization", rigid=False)
    index = _pow(sc.disk_A.coker_parity + sc.disk_B.coker_parity + glued_disk.coker_parity)
    nu3_steps = steps + sig0.steps + [LedgerStep("index correction", index)]
    dA = sc.disk_A.coker_parity
    nu3_closed = _pow((dA - 1) * k + sum(sc.b[:k - 1]) + dA + sc.disk_B.coker_parity + 1)
    nu3 = Ledger("nu_3", tuple(nu3_steps), nu3_closed)
    return ScenarioResult(sc.variant, sc.describe(), (main, nu3))


@dataclass(frozen=True)
class BrokenPair:
    """A broken configuration over the word d: u_1 covers d_k..d_{k+length-1}
    and sits at the k-th negative puncture of u_2."""
    word: tuple[int, ...]
    k: int
    length: int
    params: CappingSystemParams

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        if self.length < 2 or not 1 <= self.k or self.k + self.length - 1 > len(self.word):
            raise ScenarioError("u_1 must cover at least two letters inside the word")
        if len(self.word) - self.length + 1 < 2:
            raise ScenarioError("u_2 needs at least two negative punctures")

    def scenario(self) -> DSquaredScenario:
        k, ln, d = self.k, self.length, self.word
        f = d[k - 1:k - 1 + ln]
        c = sum(f) + 1
        return DSquaredScenario(d[:k - 1] + (c,) + d[k - 1 + ln:], k, f, self.params)


@dataclass(frozen=True)
class CancellationVerdict:
    holds: bool
    ledger_relation: int
    closed_relation: int
    detail: str

    def line(self) -> str:
        return f"{self.detail} ledger={self.ledger_relation:+d} closed={self.closed_relation:+d} " \
               f"{'ok' if self.holds else 'MISMATCH'}"


def broken_boundary_sign(pair: BrokenPair) -> tuple[int, int]:
    """Sign s with: orientation of the moduli space at the end = s·μ1μ2·(outward
    normal). Returns (ledger value, closed value)."""
    sc = pair.scenario()
    res = dsquared_rearrangement_sign(sc)
    nu1 = conformal_glue_ledger(pair.length, sc.r, sc.k).ledger.total
    nu3 = res["nu_3"].total
    delta = sc.disk_A.coker_parity + sc.disk_B.coker_parity + 1
    closed = _pow(1 + sum(pair.word[:pair.k - 1]) + delta)
    return nu1 * nu3, closed


def dsquared_boundary_cancellation(first: BrokenPair, second: BrokenPair) -> CancellationVerdict:
    """Check that the two ends of a one-dimensional moduli space cancel.

    Opposite boundary orientations force s·μ1μ2 = -s'·μ1'μ2'. The ledger
    route derives s, s' from the replayed sequences and the conformal
    ledger; the closed route is the Leibniz-sign identity. They must impose
    the same relation for every choice of tokens.
    """
    if first.word != second.word or first.params != second.params:
        raise ScenarioError("configurations are over different words")
    s0, c0 = broken_boundary_sign(first)
    s1, c1 = broken_boundary_sign(second)
    d = first.word
    # required value of μ1μ2·μ1'μ2'
    ledger_rel = -s0 * s1
    closed_rel = -_pow(sum(d[:first.k - 1]) + sum(d[:second.k - 1]))
    same = _tokens_identity(4, lambda t: t[0] * t[1] * s0 == -t[2] * t[3] * s1,
                            lambda t: _pow(sum(d[:first.k - 1])) * t[0] * t[1]
                            == -_pow(sum(d[:second.k - 1])) * t[2] * t[3])
    detail = f"dsquared-pair d={list(d)} (k={first.k},len={first.length}) (k={second.k},len={second.length})"
    return CancellationVerdict(same and s0 == c0 and s1 == c1, ledger_rel, closed_rel, detail)


@dataclass(frozen=True)
class ChainMapTScenario:
    """u_0 in M(a; b_1..b_m) in the upper symplectization with cobordism
    disks v_i in M_L(b_i; b^i_1..b^i_{m_i}) attached at every negative end."""
    groups: tuple[tuple[int, ...], ...]
    params: CappingSystemParams

    variant = "chainmap_T"

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))
        if self.m < 2:
            raise ScenarioError("u_0 needs at least two negative punctures")
        if any(len(g) < 2 for g in self.groups):
            raise ScenarioError("every v_i needs m_i > 1")
        _grading_range(x for g in self.groups for x in g)
        _ = [self.disk_u0] + [self.disk_v(i) for i in range(1, self.m + 1)]

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(sum(g) for g in self.groups)

    @property
    def a(self) -> int:
        return sum(self.b) + 1

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(x for g in self.groups for x in g)

    @property
    def disk_u0(self) -> FormalDiskOp:
        return FormalDiskOp(self.a, self.b, "symplectization")

    def disk_v(self, i: int) -> FormalDiskOp:
        return FormalDiskOp(self.b[i - 1], self.groups[i - 1], "cobordism")

    def describe(self) -> str:
        return f"groups={[list(g) for g in self.groups]} n={self.params.n} dA={self.params.d_A}"


def chainmap_T_sequences(sc: ChainMapTScenario) -> tuple[GluingSequence, GluingSequence]:
    p, m = sc.params, sc.m
    u0 = sc.disk_u0
    cap_a = FormalCappingOp.build(sc.a, POSITIVE, p)
    pos = {i: FormalCappingOp.build(sc.b[i - 1], POSITIVE, p) for i in range(1, m + 1)}
    neg = {i: FormalCappingOp.build(sc.b[i - 1], NEGATIVE, p) for i in range(1, m + 1)}

    def cap_v(i):
        caps = [FormalCappingOp.build(x, NEGATIVE, p) for x in sc.groups[i - 1]]
        return sum(c.ker_parity for c in caps), sum(c.coker_parity for c in caps) % 2

    rev = range(m, 0, -1)
    k1 = [("Ker u0", u0.ker_parity), ("Ker a+", cap_a.ker_parity)] + \
         [(f"Ker b{i}-", neg[i].ker_parity) for i in rev]
    c1 = [("Coker u0", u0.coker_parity), ("Coker a+", cap_a.coker_parity)] + \
         [(f"Coker b{i}-", neg[i].coker_parity) for i in rev]
    for i in rev:
        v = sc.disk_v(i)
        kc, cc = cap_v(i)
        k1 += [(f"Ker v{i}", v.ker_parity), (f"Ker b{i}+", pos[i].ker_parity), (f"Ker cap v{i}", kc)]
        c1 += [(f"R_t,{i}", 1), (f"R^(n+dA),{i}", p.aux), (f"Coker v{i}", v.coker_parity),
               (f"Coker b{i}+", pos[i].coker_parity), (f"Coker cap v{i}", cc)]
    seq1 = GluingSequence.of(k1, c1)

    dims = dict(k1 + c1)
    k2 = ["Ker u0"] + [f"Ker v{i}" for i in rev] + ["Ker a+"] + [f"Ker cap v{i}" for i in rev]
    c2 = ["Coker u0"]
    for i in rev:
        c2 += [f"R_t,{i}", f"Coker v{i}"]
    c2 += ["Coker a+"] + [f"Coker cap v{i}" for i in rev]
    k2 = [(x, dims[x]) for x in k2]
    c2 = [(x, dims[x]) for x in c2]
    for i in rev:
        k2 += [(f"Ker b{i}+", dims[f"Ker b{i}+"]), (f"R_t cap {i}", 1), (f"Ker b{i}-", dims[f"Ker b{i}-"])]
        c2 += [(f"R_t glue {i}", 1), (f"R^(n+dA),{i}", p.aux),
               (f"Coker b{i}+", dims[f"Coker b{i}+"]), (f"Coker b{i}-", dims[f"Coker b{i}-"])]
    return seq1, GluingSequence.of(k2, c2)


def chainmap_T_sign(sc: ChainMapTScenario, lift: random.Random | None = None) -> ScenarioResult:
    """Ledgers: sigma (sequence comparison), sigma_T (lower map of the
    boundary diagram) and the boundary sign multiplying ε_0 μ_1..μ_m."""
    p, m = sc.params, sc.m
    seq1, seq2 = chainmap_T_sequences(sc)
    extra = _lift_table((seq1, seq2), lift)
    seq1, seq2 = seq1.lifted(extra), seq2.lifted(extra)
    rev = list(range(m, 0, -1))

    two = _Replay(seq2)
    ker_rt = [f"R_t cap {i}" for i in rev]
    cok_rt = [f"R_t glue {i}" for i in rev]
    two.reorder("move the R_t pairs to the bottom",
                ker=_bottom(seq2.kernels.labels, ker_rt), coker=_bottom(seq2.cokernels.labels, cok_rt))
    two.strip("remove the R_t pairs", list(zip(ker_rt, cok_rt)))

    one = _Replay(seq1)
    for i in rev:
        one.reorder(f"sigma_1: swap Ker b{i}- and Ker cap v{i}",
                    ker=_swap(one.seq.kernels.labels, f"Ker b{i}-", f"Ker cap v{i}"))
    anchor = "Coker u0"
    for i in rev:
        one.reorder(f"sigma_2: R_t,{i} and Coker v{i} up",
                    coker=_after(one.seq.cokernels.labels, [f"R_t,{i}", f"Coker v{i}"], anchor))
        anchor = f"Coker v{i}"
    for i in rev:
        one.reorder(f"sigma_3: swap Coker b{i}- and Coker cap v{i}",
                    coker=_swap(one.seq.cokernels.labels, f"Coker b{i}-", f"Coker cap v{i}"))
    one.reorder("collect the zero kernels Ker v_i", ker=two.seq.kernels.labels)
    one.expect(two.seq)
    steps = two.steps + one.steps
    closed_sigma = _pow(sum(i * (len(g) + 1) for i, g in enumerate(sc.groups, 1))
                        + sum(bi + p.n + p.d_A + 1 for bi in sc.b))
    sigma = Ledger("sigma", tuple(steps), closed_sigma)

    # nu_0: R_t of the glued problem against R_{t,i} ⊕ Coker v_i
    nu0_seq = GluingSequence.of(
        [("R_t h", 1)],
        [("Coker u0", sc.disk_u0.coker_parity)]
        + [x for i in rev for x in ((f"R_t,{i}", 1), (f"Coker v{i}", sc.disk_v(i).coker_parity))]
    ).lifted(extra)
    nu0 = _Replay(nu0_seq)
    target = ["Coker u0"]
    for i in rev:
        target += [f"Coker v{i}", f"R_t,{i}"]
    nu0.reorder("R_t,i below Coker v_i", coker=target)
    nu0.strip("identify R_t with R_t,1", [("R_t h", "R_t,1")], -1, "t -> (0,-t,0,...,-t,0)")

    t_steps = list(steps) + nu0.steps
    t_steps.append(LedgerStep("capping orientation of u0", _pow(sc.disk_u0.coker_parity)))
    for i in rev:
        t_steps.append(LedgerStep(f"glued capping disk at b{i}", glued_capping_sign(sc.b[i - 1], p)))
    sum_mi = sum(len(g) for g in sc.groups)
    closed_t = _pow(sum(i * (len(g) + 1) for i, g in enumerate(sc.groups, 1)) + 1 + sum_mi + m)
    sigma_t = Ledger("sigma_T", tuple(t_steps), closed_t)

    # nu_2: glue v_m, ..., v_1 into u_0 one at a time
    nu2_steps = []
    big = m
    for i in rev:
        mi = len(sc.groups[i - 1])
        led = conformal_glue_ledger(mi, big, i)
        nu2_steps.append(LedgerStep(f"conformal gluing of v{i}", led.ledger.total, f"m1={mi} m2={big} k={i}"))
        big += mi - 1
    boundary_steps = t_steps + nu2_steps
    l_plus_k = sum_mi + 1
    boundary = Ledger("boundary", tuple(boundary_steps), _pow(l_plus_k))
    return ScenarioResult(sc.variant, sc.describe(), (sigma, sigma_t, boundary))


@dataclass(frozen=True)
class ChainMapTtildeScenario:
    """v_0 in M_L(a; c_1..c_l) with u_j in M(c_j; f_1..f_k) in the lower
    symplectization attached at its j-th negative end."""
    c: tuple[int, ...]
    j: int
    f: tuple[int, ...]
    params: CappingSystemParams

    variant = "chainmap_Ttilde"

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        object.__setattr__(self, "f", tuple(self.f))
        _grading_range(self.c + self.f)
        if self.l < 2 or self.k < 2:
            raise ScenarioError("v_0 and u_j need at least two negative punctures")
        if not 1 <= self.j <= self.l:
            raise ScenarioError(f"j={self.j} out of range 1..{self.l}")
        _ = (self.disk_v0, self.disk_uj)

    @property
    def l(self) -> int:
        return len(self.c)

    @property
    def k(self) -> int:
        return len(self.f)

    @property
    def a(self) -> int:
        return sum(self.c)

    @property
    def word(self) -> tuple[int, ...]:
        return self.c[:self.j - 1] + self.f + self.c[self.j:]

    @property
    def disk_v0(self) -> FormalDiskOp:
        return FormalDiskOp(self.a, self.c, "cobordism")

    @property
    def disk_uj(self) -> FormalDiskOp:
        return FormalDiskOp(self.c[self.j - 1], self.f, "symplectization")

    def describe(self) -> str:
        return (f"c={list(self.c)} j={self.j} f={list(self.f)} "
                f"n={self.params.n} dA={self.params.d_A}")


def chainmap_Ttilde_sequences(sc: ChainMapTtildeScenario) -> tuple[GluingSequence, GluingSequence]:
    p, j = sc.params, sc.j
    v0, uj = sc.disk_v0, sc.disk_uj
    cap_a = FormalCappingOp.build(sc.a, POSITIVE, p)
    neg = {i: FormalCappingOp.build(sc.c[i - 1], NEGATIVE, p) for i in range(1, sc.l + 1)}
    pos_j = FormalCappingOp.build(sc.c[j - 1], POSITIVE, p)
    caps = [FormalCappingOp.build(x, NEGATIVE, p) for x in sc.f]
    kcap = sum(c.ker_parity for c in caps)
    ccap = sum(c.coker_parity for c in caps) % 2
    rev = range(sc.l, 0, -1)
    kc = [(f"Ker c{i}-", neg[i].ker_parity) for i in rev]
    cc = [(f"Coker c{i}-", neg[i].coker_parity) for i in rev]
    seq1 = GluingSequence.of(
        [("Ker v0", v0.ker_parity), ("Ker a+", cap_a.ker_parity)] + kc
        + [("Ker uj", uj.ker_parity), ("Ker cj+", pos_j.ker_parity), ("Ker cap uj", kcap)],
        [("Coker v0", v0.coker_parity), ("Coker a+", cap_a.coker_parity)] + cc
        + [("R_t", 1), ("R^(n+dA)", p.aux), ("Coker uj", uj.coker_parity),
           ("Coker cj+", pos_j.coker_parity), ("Coker cap uj", ccap)])
    at = sc.l - j
    seq2 = GluingSequence.of(
        [("Ker v0", v0.ker_parity), ("Ker uj", uj.ker_parity), ("Ker a+", cap_a.ker_parity)]
        + kc[:at] + [("Ker cap uj", kcap)] + kc[at + 1:]
        + [("Ker cj+", pos_j.ker_parity), ("R_t cap", 1), kc[at]],
        [("Coker v0", v0.coker_parity), ("R_t", 1), ("Coker uj", uj.coker_parity),
         ("Coker a+", cap_a.coker_parity)] + cc[:at] + [("Coker cap uj", ccap)] + cc[at + 1:]
        + [("R_t glue", 1), ("R^(n+dA)", p.aux), ("Coker cj+", pos_j.coker_parity), cc[at]])
    return seq1, seq2


def chainmap_Ttilde_sign(sc: ChainMapTtildeScenario, lift: random.Random | None = None) -> ScenarioResult:
    p, j, k, l = sc.params, sc.j, sc.k, sc.l
    seq1, seq2 = chainmap_Ttilde_sequences(sc)
    extra = _lift_table((seq1, seq2), lift)
    seq1, seq2 = seq1.lifted(extra), seq2.lifted(extra)

    two = _Replay(seq2)
    two.reorder("move the R_t pair to the bottom",
                ker=_bottom(seq2.kernels.labels, ["R_t cap"]),
                coker=_bottom(seq2.cokernels.labels, ["R_t glue"]))
    two.strip("remove the R_t pair", [("R_t cap", "R_t glue")])

    one = _Replay(seq1)
    one.reorder("sigma_0: Ker uj under Ker v0", ker=_after(seq1.kernels.labels, ["Ker uj"], "Ker v0"))
    one.reorder(f"sigma_1: swap Ker c{j}- and Ker cap uj",
                ker=_swap(one.seq.kernels.labels, f"Ker c{j}-", "Ker cap uj"))
    one.reorder("sigma_2: R_t and Coker uj under Coker v0",
                coker=_after(one.seq.cokernels.labels, ["R_t", "Coker uj"], "Coker v0"))
    one.reorder(f"sigma_3: swap Coker c{j}- and Coker cap uj",
                coker=_swap(one.seq.cokernels.labels, f"Coker c{j}-", "Coker cap uj"))
    one.expect(two.seq)
    steps = two.steps + one.steps
    pre = sum(sc.c[:j - 1])
    cj = sc.c[j - 1]
    closed = _pow((cj + p.n + p.d_A + 1) + j * (k + 1) + k + l + pre)
    sigma = Ledger("sigma~", tuple(steps), closed)

    # sigma~_0: t -> (0, t) into Ker v0 ⊕ Ker uj, then s -> (0, s, 0)
    s0 = _Replay(GluingSequence.of(
        [("Ker v0", sc.disk_v0.ker_parity), ("Ker uj", 1)],
        [("Coker v0", sc.disk_v0.coker_parity), ("R_t", 1), ("Coker uj", sc.disk_uj.coker_parity)]
    ).lifted(extra))
    s0.reorder("R_t past Coker uj", coker=["Coker v0", "Coker uj", "R_t"])
    s0.strip("identify Ker uj with R_t", [("Ker uj", "R_t")], 1, "t -> (0,t), s -> (0,s,0)")
    t_steps = list(steps) + s0.steps + [
        LedgerStep("capping orientation of uj", _pow(sc.disk_uj.coker_parity)),
        LedgerStep(f"glued capping disk at c{j}", glued_capping_sign(cj, p)),
    ]
    sigma_t = Ledger("sigma_T~", tuple(t_steps), _pow(j * (k + 1) + l + k + pre))
    conf = conformal_glue_ledger(k, l, j).ledger.total
    b_steps = t_steps + [LedgerStep(f"conformal gluing of uj", conf, f"m1={k} m2={l} k={j}")]
    boundary = Ledger("boundary", tuple(b_steps), _pow(1 + l + k + pre))
    return ScenarioResult(sc.variant, sc.describe(), (sigma, sigma_t, boundary))


def chainmap_cancellation(t_sc: ChainMapTScenario, tt_sc: ChainMapTtildeScenario) -> CancellationVerdict:
    """The two ends of M_L(a; word) for the chain-map identity.

    Tokens: ε_0, μ_1..μ_m on the T side, μ_0, ε_j on the T~ side. Opposite
    ends force s_T·ε_0Πμ = -s_T~·μ_0ε_j; the closed identity is
    ε_0Πμ = (-1)^{Σ_{i<j}|c_i|} μ_0ε_j.
    """
    if t_sc.word != tt_sc.word or t_sc.a != tt_sc.a or t_sc.params != tt_sc.params:
        raise ScenarioError("T and T~ scenarios are over different words")
    s_t = chainmap_T_sign(t_sc)["boundary"]
    s_tt = chainmap_Ttilde_sign(tt_sc)["boundary"]
    m = t_sc.m
    pre = sum(tt_sc.c[:tt_sc.j - 1])
    ntok = m + 3

    def prod(xs):
        out = 1
        for x in xs:
            out *= x
        return out

    same = _tokens_identity(
        ntok,
        lambda t: s_t.total * prod(t[:m + 1]) == -s_tt.total * t[m + 1] * t[m + 2],
        lambda t: prod(t[:m + 1]) == _pow(pre) * t[m + 1] * t[m + 2])
    detail = f"chainmap {t_sc.describe()} | {tt_sc.describe()}"
    return CancellationVerdict(same and s_t.agrees and s_tt.agrees,
                               -s_t.total * s_tt.total, _pow(pre), detail)


def trivial_cobordism_sign(grading: int, params: CappingSystemParams,
                           lift: random.Random | None = None) -> ScenarioResult:
    """Sign σ for the trivial strip over a chord of the given grading; σ ≡ 0.

    u_1 is the capped strip at the positive end, u_2 the one at the negative
    end; h, l, m label the chords of the three capping operators.
    """
    p = params
    h_pos = FormalCappingOp.build(grading, POSITIVE, p)
    m_neg = FormalCappingOp.build(grading, NEGATIVE, p)
    m_pos = FormalCappingOp.build(grading, POSITIVE, p)
    l_neg = FormalCappingOp.build(grading, NEGATIVE, p)
    d = dict([("Ker u1", 1), ("Ker h+", h_pos.ker_parity), ("Ker m-", m_neg.ker_parity),
              ("Ker u2", 1), ("Ker m+", m_pos.ker_parity), ("Ker l-", l_neg.ker_parity),
              ("Coker h+", h_pos.coker_parity), ("Coker m-", m_neg.coker_parity),
              ("R_t", 1), ("R^(n+dA)", p.aux), ("Coker m+", m_pos.coker_parity),
              ("Coker l-", l_neg.coker_parity), ("R_t cap", 1), ("R_t glue", 1)])
    seq1 = GluingSequence.of(
        [(x, d[x]) for x in ("Ker u1", "Ker h+", "Ker m-", "Ker u2", "Ker m+", "Ker l-")],
        [(x, d[x]) for x in ("Coker h+", "Coker m-", "R_t", "R^(n+dA)", "Coker m+", "Coker l-")])
    seq2 = GluingSequence.of(
        [(x, d[x]) for x in ("Ker u1", "Ker u2", "Ker h+", "Ker l-", "Ker m+", "R_t cap", "Ker m-")],
        [(x, d[x]) for x in ("R_t", "Coker h+", "Coker l-", "R_t glue", "R^(n+dA)", "Coker m+", "Coker m-")])
    extra = _lift_table((seq1, seq2), lift)
    seq1, seq2 = seq1.lifted(extra), seq2.lifted(extra)

    two = _Replay(seq2)
    two.reorder("move the R_t pair to the bottom",
                ker=_bottom(seq2.kernels.labels, ["R_t cap"]),
                coker=_bottom(seq2.cokernels.labels, ["R_t glue"]))
    two.strip("remove the R_t pair", [("R_t cap", "R_t glue")])
    one = _Replay(seq1)
    one.reorder("Ker u2 under Ker u1, R_t to the top",
                ker=_after(seq1.kernels.labels, ["Ker u2"], "Ker u1"),
                coker=_after(seq1.cokernels.labels, ["R_t"], None))
    one.reorder("swap the negative caps m- and l-",
                ker=_swap(one.seq.kernels.labels, "Ker m-", "Ker l-"),
                coker=_swap(one.seq.cokernels.labels, "Coker m-", "Coker l-"))
    one.expect(two.seq)
    sigma1 = Ledger("sigma_1", tuple(two.steps + one.steps),
                    _pow(grading + p.n + p.d_A + 1))
    sigma3 = glued_capping_sign(grading, p)
    total = Ledger("sigma", tuple(two.steps + one.steps) + (LedgerStep("glued capping disk", sigma3),), 1)
    return ScenarioResult("trivial_concat", f"|a|={grading} n={p.n} dA={p.d_A}", (total, sigma1))


@dataclass(frozen=True)
class ClosedDiskProblem:
    """A closed-disk problem known by its kernel and cokernel dimensions and
    its orientation token relative to the canonical orientation."""
    ker: int
    coker: int
    token: int = 1


def canonical_gluing_check(first: ClosedDiskProblem, second: ClosedDiskProblem, n: int,
                           coker_order: Sequence[str] | None = None,
                           ker_order: Sequence[str] | None = None) -> tuple[bool, int]:
    """Glue two closed-disk problems through
    [Ker B, Ker A] -> [Coker B, R^n, Coker A].

    Returns (verdict, transported token). The canonical orientations glue
    to the canonical orientation, so the transported token is the product
    of the input tokens times the Koszul cost of bringing a column given in
    another order back to the standard one; the verdict checks that this
    matches the glued problem's token tokA·tokB.
    """
    for prob in (first, second):
        if prob.ker - prob.coker != n:
            raise ScenarioError("closed disk problems here have index n")
    seq = GluingSequence.of([("Ker B", second.ker), ("Ker A", first.ker)],
                            [("Coker B", second.coker), ("R^n", n), ("Coker A", first.coker)])
    standard = (seq.kernels.labels, seq.cokernels.labels)
    given = _Replay(seq)
    given.reorder("given order", ker=ker_order or standard[0], coker=coker_order or standard[1])
    back = _Replay(given.seq)
    back.reorder("back to standard", ker=standard[0], coker=standard[1])
    # a sequence written in another order induces the standard orientation
    # times the cost of moving back
    transported = first.token * second.token * back.steps[0].sign * given.steps[0].sign
    glued_ker = first.ker + second.ker
    glued_coker = first.coker + second.coker + n
    if glued_ker - glued_coker != n:
        raise ScenarioError("index is not additive")
    return transported == first.token * second.token, transported


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    max_m: int = 5
    max_r: int = 5
    max_l: int = 5
    grading_min: int = -3
    grading_max: int = 4
    n_values: tuple[int, ...] = (1, 2, 3)
    seed: int = 0
    samples: int = 400
    conformal_max: int = 7

    def __post_init__(self):
        for name in ("max_m", "max_r", "max_l", "samples", "conformal_max"):
            if getattr(self, name) < 1:
                raise ScenarioError(f"{name} must be positive")
        if self.grading_min > self.grading_max:
            raise ScenarioError("empty grading range")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ScenarioError("n values must be positive")


@dataclass
class SweepReport:
    lines: list[str] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    first_failure: str | None = None

    def record(self, lemma: str, ok: bool, line: str, detail: Callable[[], str] | None = None):
        passed, failed = self.counts.get(lemma, (0, 0))
        self.counts[lemma] = (passed + ok, failed + (not ok))
        self.lines.append(line)
        if not ok and self.first_failure is None:
            self.first_failure = detail() if detail else line

    @property
    def ok(self) -> bool:
        return all(f == 0 for _, f in self.counts.values())

    def summary(self) -> str:
        out = []
        for lemma, (p, f) in self.counts.items():
            out.append(f"{lemma}.pass={p}")
            out.append(f"{lemma}.fail={f}")
        out.append(f"total.pass={sum(p for p, _ in self.counts.values())}")
        out.append(f"total.fail={sum(f for _, f in self.counts.values())}")
        out.append(f"status={'ok' if self.ok else 'fail'}")
        return "\n".join(out)


def _gradings(rng: random.Random, cfg: SweepConfig, count: int) -> tuple[int, ...]:
    return tuple(rng.randint(cfg.grading_min, cfg.grading_max) for _ in range(count))


def _params(rng: random.Random, cfg: SweepConfig) -> CappingSystemParams:
    return CappingSystemParams(rng.choice(cfg.n_values))


def random_dsquared(rng: random.Random, cfg: SweepConfig) -> DSquaredScenario:
    r = rng.randint(2, max(2, cfg.max_r))
    m = rng.randint(3, max(3, cfg.max_m))
    k = rng.randint(1, r)
    f = _gradings(rng, cfg, m - 1)
    b = list(_gradings(rng, cfg, r))
    b[k - 1] = sum(f) + 1
    return DSquaredScenario(tuple(b), k, f, _params(rng, cfg))


def random_chainmap_pair(rng: random.Random, cfg: SweepConfig) -> tuple[ChainMapTScenario, ChainMapTtildeScenario]:
    """A T scenario and a T~ scenario with the same glued word and |a|."""
    while True:
        l = rng.randint(2, max(2, cfg.max_l))
        k = rng.randint(2, max(2, cfg.max_m))
        j = rng.randint(1, l)
        total = l + k - 1
        # group sizes m_i >= 2 summing to the word length
        m_max = total // 2
        if m_max < 2:
            continue
        m = rng.randint(2, min(m_max, max(2, cfg.max_m)))
        sizes = [2] * m
        for _ in range(total - 2 * m):
            sizes[rng.randrange(m)] += 1
        word = _gradings(rng, cfg, total)
        # T~: c_j = Σf + 1 and |a| = Σc; T: |a| = Σ|b_i| + 1 = Σ word + 1
        p = _params(rng, cfg)
        f = word[j - 1:j - 1 + k]
        c = word[:j - 1] + (sum(f) + 1,) + word[j - 1 + k:]
        groups, at = [], 0
        for s in sizes:
            groups.append(word[at:at + s])
            at += s
        return ChainMapTScenario(tuple(groups), p), ChainMapTtildeScenario(c, j, f, p)


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Every scenario family over the configured bounds, deterministic in seed."""
    rng = random.Random(cfg.seed)
    rep = SweepReport()
    top = cfg.conformal_max
    for m1 in range(2, top + 1):
        for m2 in range(2, top + 1):
            for k in range(1, m2 + 1):
                res = conformal_glue_ledger(m1, m2, k)
                rep.record("conformal", res.agrees, res.line(), lambda res=res: _render(res))
    for n in cfg.n_values:
        for d_a in (1, 2):
            p = CappingSystemParams(n, d_a)
            for g in range(cfg.grading_min, cfg.grading_max + 1):
                res = trivial_cobordism_sign(g, p)
                rep.record("trivial", res.agrees, res.line(), lambda res=res: _render(res))
    for _ in range(cfg.samples):
        res = dsquared_rearrangement_sign(random_dsquared(rng, cfg))
        rep.record("dsquared", res.agrees, res.line(), lambda res=res: _render(res))
    for _ in range(cfg.samples):
        sc = random_dsquared(rng, cfg)
        word = sc.b[:sc.k - 1] + sc.f + sc.b[sc.k:]
        first = BrokenPair(word, sc.k, len(sc.f), sc.params)
        second = _other_pair(rng, word, sc.params)
        v = dsquared_boundary_cancellation(first, second)
        rep.record("dsquared_cancel", v.holds, v.line())
    for _ in range(cfg.samples):
        t_sc, tt_sc = random_chainmap_pair(rng, cfg)
        rt, rtt = chainmap_T_sign(t_sc), chainmap_Ttilde_sign(tt_sc)
        rep.record("chainmap_T", rt.agrees, rt.line(), lambda res=rt: _render(res))
        rep.record("chainmap_Ttilde", rtt.agrees, rtt.line(), lambda res=rtt: _render(res))
        v = chainmap_cancellation(t_sc, tt_sc)
        rep.record("chainmap_cancel", v.holds, v.line())
    return rep


def _other_pair(rng: random.Random, word: tuple[int, ...], params) -> BrokenPair:
    options = [(k, ln) for ln in range(2, len(word)) for k in range(1, len(word) - ln + 2)
               if len(word) - ln + 1 >= 2]
    k, ln = rng.choice(options)
    return BrokenPair(word, k, ln, params)


def _render(res: ScenarioResult) -> str:
    return "\n".join([f"{res.variant} {res.params}"] + [l.render() for l in res.ledgers])
