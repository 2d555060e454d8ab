"""Koszul signs for ordered lists of oriented blocks, and the orientation
convention for four-term exact sequences.

A block is a formal vector space known only through its label, its
dimension and a sign relative to a fixed reference basis. Orientations
of whole columns are tracked as sign tokens. The two ``*_oracle``
functions rebuild the same answers from explicit rational matrices.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from . import _linalg as la


class StructureError(ValueError):
    """Raised for malformed columns or inconsistent identification data."""


def _check_sign(s: int, what: str) -> None:
    if s not in (1, -1):
        raise StructureError(f"{what} must be +1 or -1, got {s!r}")


@dataclass(frozen=True)
class FormalSummand:
    label: Hashable
    dim: int
    orient: int = 1

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 0:
            raise StructureError(f"summand {self.label!r}: dimension must be a nonnegative integer")
        _check_sign(self.orient, f"orientation of {self.label!r}")
        if self.dim == 0 and self.orient != 1:
            raise StructureError(f"summand {self.label!r}: a zero space carries orientation +1")


@dataclass(frozen=True)
class SummandColumn:
    summands: tuple[FormalSummand, ...]
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        _check_sign(self.sign, "column sign")
        labels = [s.label for s in self.summands]
        if len(set(labels)) != len(labels):
            dup = next(x for x in labels if labels.count(x) > 1)
            raise StructureError(f"duplicate label {dup!r} in column")

    @classmethod
    def of(cls, *pairs: tuple[Hashable, int]) -> "SummandColumn":
        """Build a column from (label, dim) pairs."""
        return cls(tuple(FormalSummand(label, dim) for label, dim in pairs))

    @property
    def labels(self) -> tuple:
        return tuple(s.label for s in self.summands)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.summands)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def __getitem__(self, label) -> FormalSummand:
        for s in self.summands:
            if s.label == label:
                return s
        raise KeyError(label)

    def orientation(self) -> int:
        """Orientation of the column as one space, relative to the
        concatenation of the summands' reference bases in column order."""
        out = self.sign
        for s in self.summands:
            out *= s.orient
        return out

    def reorder(self, target_order: Sequence) -> "SummandColumn":
        """Return the column with summands in target_order and the Koszul
        cost folded into the sign."""
        perm = _permutation(self.labels, target_order)
        cost = koszul_sign(self.dims, perm)
        return SummandColumn(tuple(self.summands[i] for i in perm), self.sign * cost)

    def relabel_dims(self, dims: Mapping) -> "SummandColumn":
        """Copy with some dimensions replaced (orientations of new zero blocks reset)."""
        out = []
        for s in self.summands:
            d = dims.get(s.label, s.dim)
            out.append(FormalSummand(s.label, d, s.orient if d else 1))
        return SummandColumn(tuple(out), self.sign)


def _permutation(labels: Sequence, target_order: Sequence) -> list[int]:
    target = list(target_order)
    if len(set(target)) != len(target):
        raise StructureError("target order repeats a label")
    index = {lab: i for i, lab in enumerate(labels)}
    unknown = [t for t in target if t not in index]
    if unknown:
        raise StructureError(f"unknown label {unknown[0]!r} in target order")
    if len(target) != len(labels):
        missing = [lab for lab in labels if lab not in set(target)]
        raise StructureError(f"target order omits label {missing[0]!r}")
    return [index[t] for t in target]


def koszul_sign(dims: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of moving blocks so that new position p holds old block perm[p].

    Only odd blocks matter: the sign is (-1) to the number of inverted
    pairs of odd-dimensional blocks.
    """
    parity = 0
    # for each odd block, count odd blocks with a larger old index placed before it
    placed: list[int] = []
    for old in perm:
        if dims[old] % 2:
            parity += sum(1 for q in placed if q > old)
            placed.append(old)
    return -1 if parity % 2 else 1


def block_reorder_sign(column: SummandColumn, target_order: Sequence) -> int:
    """Koszul cost of putting the column's summands in target_order."""
    return koszul_sign(column.dims, _permutation(column.labels, target_order))


def block_reorder_oracle(dims: Sequence[int], permutation: Sequence[int]) -> int:
    """Determinant sign of the coordinate permutation realizing the block move.

    permutation[p] is the old index of the block that ends up at position p.
    """
    dims = list(dims)
    perm = list(permutation)
    if sorted(perm) != list(range(len(dims))):
        raise StructureError("not a permutation of the block indices")
    if any(d < 0 for d in dims):
        raise StructureError("negative block dimension")
    offsets = [sum(dims[:i]) for i in range(len(dims))]
    total = sum(dims)
    matrix = [[0] * total for _ in range(total)]
    row = 0
    for old in perm:
        for t in range(dims[old]):
            matrix[row][offsets[old] + t] = 1
            row += 1
    return la.det_sign(matrix)


# ---------------------------------------------------------------------------
# four-term exact sequences 0 -> V1 -> W1 -> W2 -> V2 -> 0


@dataclass(frozen=True)
class ExactSequenceData:
    """Block-level description of an exact sequence.

    alpha maps each V1 label to (W1 label, token); beta maps the remaining
    W1 labels to (W2 label, token); gamma maps the W2 labels outside the
    image of beta to (V2 label, token). A token is the sign of the block map
    with respect to the two reference bases.
    """
    v1: SummandColumn
    w1: SummandColumn
    w2: SummandColumn
    v2: SummandColumn
    alpha: Mapping = field(default_factory=dict)
    beta: Mapping = field(default_factory=dict)
    gamma: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, dict(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        _check_block_map("alpha", self.alpha, self.v1, self.w1, total=True)
        image_a = {t for t, _ in self.alpha.values()}
        complement = [lab for lab in self.w1.labels if lab not in image_a]
        if set(self.beta) != set(complement):
            raise StructureError("beta must be defined exactly on the W1 blocks outside the image of alpha")
        _check_block_map("beta", self.beta, self.w1, self.w2, total=False)
        image_b = {t for t, _ in self.beta.values()}
        rest = [lab for lab in self.w2.labels if lab not in image_b]
        if set(self.gamma) != set(rest):
            raise StructureError("gamma must be defined exactly on the W2 blocks outside the image of beta")
        _check_block_map("gamma", self.gamma, self.w2, self.v2, total=False)
        if {t for t, _ in self.gamma.values()} != set(self.v2.labels):
            raise StructureError("gamma is not onto V2")
        if self.w1.dim - self.v1.dim != self.w2.dim - self.v2.dim:
            raise StructureError("dimension count fails: dim W1 - dim V1 != dim W2 - dim V2")


def _check_block_map(name, mapping, src: SummandColumn, dst: SummandColumn, total: bool) -> None:
    src_labels = set(src.labels)
    seen = set()
    for s, (t, token) in mapping.items():
        if s not in src_labels:
            raise StructureError(f"{name}: unknown source block {s!r}")
        if t not in set(dst.labels):
            raise StructureError(f"{name}: unknown target block {t!r}")
        if t in seen:
            raise StructureError(f"{name}: target block {t!r} hit twice")
        seen.add(t)
        _check_sign(token, f"{name} token for {s!r}")
        if src[s].dim != dst[t].dim:
            raise StructureError(f"{name}: block {s!r} and {t!r} differ in dimension")
        if src[s].dim == 0 and token != 1:
            raise StructureError(f"{name}: map on the zero block {s!r} carries token +1")
    if total and set(mapping) != src_labels:
        raise StructureError(f"{name} must be defined on every block")


def _block_sign(col: SummandColumn, labels: Sequence) -> int:
    """Orientation of the basis formed by the reference bases of ``labels``
    (in that order) relative to the column's reference orientation."""
    return koszul_sign(col.dims, [col.labels.index(lab) for lab in labels])


def exact_sequence_transport(data: ExactSequenceData, unknown: str = "w2") -> int:
    """Orientation token of the ``unknown`` space induced by the other three.

    The known orientations are read from each column's orientation(). The
    basis recipe is (alpha(v), w) in W1 and (u, beta(w)) in W2 with gamma(u)
    a positive basis of V2; the dual factor is identified with the space
    itself, so det W1 (x) det W2* carries the product of the two tokens.
    """
    if unknown not in ("v1", "w1", "w2", "v2"):
        raise StructureError(f"unknown space {unknown!r}")
    # W1 basis: alpha images in V1 order, then complement in W1 order
    alpha_order = [data.alpha[lab][0] for lab in data.v1.labels]
    comp = [lab for lab in data.w1.labels if lab not in set(alpha_order)]
    s_alpha = 1
    for lab in data.v1.labels:
        s_alpha *= data.alpha[lab][1]
    k1 = _block_sign(data.w1, alpha_order + comp)
    # W2 basis: u blocks in V2 order (scaled so gamma(u) is the V2 reference), then beta(w)
    pre_gamma = {t: s for s, (t, _) in data.gamma.items()}
    u_order = [pre_gamma[lab] for lab in data.v2.labels]
    s_gamma = 1
    for lab in u_order:
        s_gamma *= data.gamma[lab][1]
    beta_order = [data.beta[lab][0] for lab in comp]
    s_beta = 1
    for lab in comp:
        s_beta *= data.beta[lab][1]
    k2 = _block_sign(data.w2, u_order + beta_order)
    # o(W1) o(W2) = o(V1) o(V2) * relation
    relation = s_alpha * k1 * s_gamma * s_beta * k2
    known = {"v1": data.v1.orientation(), "w1": data.w1.orientation(),
             "w2": data.w2.orientation(), "v2": data.v2.orientation()}
    known.pop(unknown)
    return relation * _prod(known.values())


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def exact_sequence_oracle(alpha, beta, gamma, bases=None, orientations=None,
                          rng: random.Random | None = None) -> int:
    """Orientation token of W2 built literally from explicit matrices.

    alpha, beta, gamma are matrices (lists of rows) for V1 -> W1 -> W2 -> V2.
    ``bases`` optionally maps "v1", "w1", "w2", "v2" to a list of reference
    basis vectors (default: standard bases). ``orientations`` gives the
    tokens of v1, w1, v2 relative to those references (default all +1).
    The complement w is drawn with ``rng`` when given, otherwise greedily
    from the standard basis; the answer must not depend on that choice.
    """
    dims = _exact_dims(alpha, beta, gamma)
    dv1, dw1, dw2, dv2 = dims
    A, B, C = (la.to_matrix(m) if m else [] for m in (alpha, beta, gamma))
    A = A if dw1 and dv1 else [[Fraction(0)] * dv1 for _ in range(dw1)]
    B = B if dw2 and dw1 else [[Fraction(0)] * dw1 for _ in range(dw2)]
    C = C if dv2 and dw2 else [[Fraction(0)] * dw2 for _ in range(dv2)]
    _check_exact(A, B, C, dims)
    bases = dict(bases or {})
    ref = {}
    for name, d in zip(("v1", "w1", "w2", "v2"), dims):
        vecs = bases.get(name)
        if vecs is None:
            vecs = [[int(i == j) for i in range(d)] for j in range(d)]
        ref[name] = [[Fraction(x) for x in v] for v in vecs]
        if len(ref[name]) != d or la.det_sign(la.columns_to_matrix(ref[name], d)) == 0:
            raise StructureError(f"reference basis of {name} is not a basis")
    orient = {"v1": 1, "w1": 1, "v2": 1}
    orient.update(orientations or {})

    # orientation tokens of the known spaces enter as plain factors at the end
    v = [vec[:] for vec in ref["v1"]]
    alpha_v = [_apply(A, x) for x in v]
    # w: complement of alpha(V1) in W1
    w = _complement(alpha_v, dw1, rng)
    # u: gamma(u) = reference basis of V2
    u = [la.solve(C, y) for y in ref["v2"]]
    beta_w = [_apply(B, x) for x in w]
    s1 = _relative_sign(alpha_v + w, ref["w1"], dw1)
    s2 = _relative_sign(u + beta_w, ref["w2"], dw2)
    return s1 * s2 * orient["v1"] * orient["v2"] * orient["w1"]


def _exact_dims(alpha, beta, gamma) -> tuple[int, int, int, int]:
    def shape(m):
        if not m:
            return None
        return len(m), len(m[0])
    sa, sb, sc = shape(alpha), shape(beta), shape(gamma)
    dw1 = sa[0] if sa else (sb[1] if sb else 0)
    dv1 = sa[1] if sa else 0
    dw2 = sb[0] if sb else (sc[1] if sc else 0)
    dv2 = sc[0] if sc else 0
    if sb and sb[1] != dw1 or sc and sc[1] != dw2:
        raise StructureError("matrix shapes do not compose")
    return dv1, dw1, dw2, dv2


def _check_exact(A, B, C, dims) -> None:
    dv1, dw1, dw2, dv2 = dims
    if la.rank(A) != dv1:
        raise StructureError("alpha is not injective (rank alpha < dim V1)")
    if la.rank(C) != dv2:
        raise StructureError("gamma is not surjective (rank gamma < dim V2)")
    if dw2 and dv1 and not la.is_zero(la.matmul(B, A)):
        raise StructureError("beta . alpha != 0")
    if dv2 and dw1 and not la.is_zero(la.matmul(C, B)):
        raise StructureError("gamma . beta != 0")
    if la.rank(B) != dw1 - dv1:
        raise StructureError("not exact at W1 (rank beta != dim W1 - dim V1)")
    if la.rank(B) != dw2 - dv2:
        raise StructureError("not exact at W2 (rank beta != dim W2 - dim V2)")


def _apply(m, x) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in m]


def _complement(vecs, dim, rng) -> list[list[Fraction]]:
    out = []
    current = [v[:] for v in vecs]
    candidates = [[Fraction(int(i == j)) for i in range(dim)] for j in range(dim)]
    if rng is not None:
        candidates = [[Fraction(rng.randint(-3, 3)) for _ in range(dim)] for _ in range(4 * dim)] + candidates
    for c in candidates:
        if len(current) == dim:
            break
        trial = current + [c]
        if la.rank(la.columns_to_matrix(trial, dim)) == len(trial):
            current = trial
            out.append(c)
    if len(current) != dim:
        raise StructureError("could not complete a basis")
    return out


def _relative_sign(vecs, ref, dim) -> int:
    if dim == 0:
        return 1
    s = la.det_sign(la.columns_to_matrix(vecs, dim))
    if s == 0:
        raise StructureError("constructed vectors are not a basis")
    return s * la.det_sign(la.columns_to_matrix(ref, dim))


def _unimodular(d: int, rng: random.Random) -> list[list[Fraction]]:
    """Random integer matrix with determinant +-1 (so its inverse is integral too)."""
    p = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    order = list(range(d))
    rng.shuffle(order)
    p = [p[i] for i in order]
    for _ in range(2 * d if d > 1 else 0):
        i, j = rng.sample(range(d), 2)
        c = rng.choice((-2, -1, 1, 2))
        p[i] = [a + c * b for a, b in zip(p[i], p[j])]
    if rng.random() < 0.5 and d:
        p[0] = [-a for a in p[0]]
    return p


def realize(data: ExactSequenceData, rng: random.Random | None = None):
    """Explicit matrices for block data, optionally in disguised coordinates.

    Returns (alpha, beta, gamma, bases) suitable for exact_sequence_oracle.
    Each space's reference basis is the concatenation of its blocks'
    reference bases. With ``rng`` every space gets a random unimodular
    change of coordinates, so the oracle sees dense integer matrices.
    """
    cols = {"v1": data.v1, "w1": data.w1, "w2": data.w2, "v2": data.v2}
    offsets = {}
    for name, col in cols.items():
        off, acc = {}, 0
        for s in col.summands:
            off[s.label] = acc
            acc += s.dim
        offsets[name] = off

    def block_matrix(mapping, src, dst):
        m = [[Fraction(0)] * cols[src].dim for _ in range(cols[dst].dim)]
        for s, (t, token) in mapping.items():
            # identity on the block, first coordinate scaled so the determinant sign is the token
            for i in range(cols[src][s].dim):
                m[offsets[dst][t] + i][offsets[src][s] + i] = Fraction(token if i == 0 else 1)
        return m

    A = block_matrix(data.alpha, "v1", "w1")
    B = block_matrix(data.beta, "w1", "w2")
    C = block_matrix(data.gamma, "w2", "v2")
    change = {}
    for name, col in cols.items():
        d = col.dim
        if rng is None:
            change[name] = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
            continue
        change[name] = _unimodular(d, rng)
    inv = {name: la.inverse(p) if p else [] for name, p in change.items()}

    def conj(m, src, dst):
        if not m or not m[0]:
            return m
        return la.matmul(la.matmul(change[dst], m), inv[src])

    bases = {name: [la.column(p, j) for j in range(cols[name].dim)] for name, p in change.items()}
    return conj(A, "v1", "w1"), conj(B, "w1", "w2"), conj(C, "w2", "v2"), bases
