"""Free unital noncommutative DGAs over the integers.

Elements are finite Z-linear combinations of words in chord names. The
differential is given on chords and extended by the signed Leibniz rule
d(xy) = d(x)y + (-1)^{|x|} x d(y). Morphisms are given on chords and
extended multiplicatively.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from . import _linalg as la

Word = tuple[str, ...]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class DgaError(ValueError):
    """Malformed algebra data (unknown chord, bad sign vector, ...)."""


@dataclass(frozen=True)
class Chord:
    name: str
    grading: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME.match(self.name):
            raise DgaError(f"invalid chord name {self.name!r}")
        if not isinstance(self.grading, int) or isinstance(self.grading, bool):
            raise DgaError(f"grading of {self.name} must be an integer")


class Element:
    """Immutable Z-linear combination of words."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[str], int] | Iterable[tuple[Sequence[str], int]] = ()):
        acc: dict[Word, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, c in items:
            w = tuple(word)
            acc[w] = acc.get(w, 0) + int(c)
        self._terms = {w: c for w, c in acc.items() if c}
        self._hash = None

    @classmethod
    def zero(cls) -> "Element":
        return cls()

    @classmethod
    def unit(cls) -> "Element":
        return cls({(): 1})

    @classmethod
    def word(cls, *names: str, coeff: int = 1) -> "Element":
        return cls({tuple(names): coeff})

    @property
    def terms(self) -> Mapping[Word, int]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[tuple[Word, int]]:
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Element({(): other})
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "Element") -> "Element":
        if isinstance(other, int):
            other = Element({(): other})
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0) + c
        return Element(out)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, other) -> "Element":
        if isinstance(other, int):
            return Element({w: c * other for w, c in self._terms.items()})
        out: dict[Word, int] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return Element(out)

    def __rmul__(self, other: int) -> "Element":
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def chords(self) -> set[str]:
        return {x for w in self._terms for x in w}

    def mod2(self) -> "Element":
        """Coefficients reduced mod 2, lifted to {0, 1}."""
        return Element({w: c % 2 for w, c in self._terms.items()})

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self:
            body = ".".join(w) if w else "1"
            if c == 1:
                parts.append(f"+ {body}")
            elif c == -1:
                parts.append(f"- {body}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def word_grading(word: Word, gradings: Mapping[str, int]) -> int:
    return sum(gradings[x] for x in word)


class Dga:
    """Chords with gradings and a differential on chords (absent means 0)."""

    __slots__ = ("_chords", "_diff")

    def __init__(self, chords: Iterable[Chord | tuple[str, int]], diff: Mapping[str, Element] | None = None):
        table: dict[str, Chord] = {}
        for ch in chords:
            ch = ch if isinstance(ch, Chord) else Chord(*ch)
            if ch.name in table:
                raise DgaError(f"duplicate chord {ch.name}")
            table[ch.name] = ch
        self._chords = table
        d = {}
        for name, value in (diff or {}).items():
            if name not in table:
                raise DgaError(f"differential given for unknown chord {name}")
            if not isinstance(value, Element):
                raise DgaError(f"differential of {name} must be an Element")
            unknown = value.chords() - table.keys()
            if unknown:
                raise DgaError(f"d{name} uses unknown chord {sorted(unknown)[0]}")
            if value:
                d[name] = value
        self._diff = d

    @property
    def chords(self) -> tuple[Chord, ...]:
        return tuple(self._chords[k] for k in sorted(self._chords))

    @property
    def names(self) -> list[str]:
        return sorted(self._chords)

    @property
    def gradings(self) -> dict[str, int]:
        return {k: c.grading for k, c in self._chords.items()}

    def grading(self, name: str) -> int:
        try:
            return self._chords[name].grading
        except KeyError:
            raise DgaError(f"unknown chord {name}") from None

    def d(self, name: str) -> Element:
        if name not in self._chords:
            raise DgaError(f"unknown chord {name}")
        return self._diff.get(name, Element())

    @property
    def diff(self) -> Mapping[str, Element]:
        return MappingProxyType(self._diff)

    def __contains__(self, name: str) -> bool:
        return name in self._chords

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dga):
            return NotImplemented
        return self._chords == other._chords and self._diff == other._diff

    def __hash__(self) -> int:
        return hash((frozenset(self._chords.values()), frozenset(self._diff.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{c.name}:{c.grading}" for c in self.chords)
        return f"Dga({body})"

    def mod2(self) -> "Dga":
        return Dga(self.chords, {k: v.mod2() for k, v in self._diff.items()})

    def check_element(self, x: Element) -> None:
        unknown = x.chords() - self._chords.keys()
        if unknown:
            raise DgaError(f"unknown chord {sorted(unknown)[0]}")


def leibniz_extend(dga: Dga, x: Element) -> Element:
    """d(x) for an arbitrary element."""
    dga.check_element(x)
    g = dga.gradings
    out: dict[Word, int] = {}
    for word, c in x.terms.items():
        sign = 1
        for i, name in enumerate(word):
            dn = dga.d(name)
            if dn:
                pre, post = word[:i], word[i + 1:]
                for w, cw in dn.terms.items():
                    key = pre + w + post
                    out[key] = out.get(key, 0) + sign * c * cw
            if g[name] % 2:
                sign = -sign
    return Element(out)


def d_squared_report(dga: Dga) -> list[tuple[str, Element]]:
    out = []
    for name in dga.names:
        dd = leibniz_extend(dga, dga.d(name))
        if dd:
            out.append((name, dd))
    return out


class DgaMorphism:
    """Algebra map given on source chords (absent means 0)."""

    __slots__ = ("source", "target", "_images")

    def __init__(self, source: Dga, target: Dga, images: Mapping[str, Element]):
        self.source = source
        self.target = target
        imgs = {}
        for name, value in images.items():
            if name not in source:
                raise DgaError(f"image given for {name}, which is not a source chord")
            target.check_element(value)
            if value:
                imgs[name] = value
        self._images = imgs

    def image(self, name: str) -> Element:
        if name not in self.source:
            raise DgaError(f"unknown chord {name}")
        return self._images.get(name, Element())

    @property
    def images(self) -> Mapping[str, Element]:
        return MappingProxyType(self._images)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DgaMorphism):
            return NotImplemented
        return (self.source, self.target, self._images) == (other.source, other.target, other._images)

    def __hash__(self) -> int:
        return hash((self.source, self.target, frozenset(self._images.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{k} -> {v!r}" for k, v in sorted(self._images.items()))
        return f"DgaMorphism({body})"


def morphism_apply(phi: DgaMorphism, x: Element) -> Element:
    phi.source.check_element(x)
    out = Element()
    cache: dict[str, Element] = {}
    for word, c in x.terms.items():
        term = Element.unit() * c
        for name in word:
            if name not in cache:
                cache[name] = phi.image(name)
            term = term * cache[name]
            if not term:
                break
        out = out + term
    return out


def check_chain_map(phi: DgaMorphism) -> tuple[bool, list[tuple[str, Element]]]:
    """(verdict, [(chord, Phi(d a) - d Phi(a))]) over all source chords."""
    bad = []
    for name in phi.source.names:
        lhs = morphism_apply(phi, phi.source.d(name))
        rhs = leibniz_extend(phi.target, phi.image(name))
        if lhs != rhs:
            bad.append((name, lhs - rhs))
    return not bad, bad


def compose(phi2: DgaMorphism, phi1: DgaMorphism) -> DgaMorphism:
    """phi2 after phi1."""
    if phi1.target != phi2.source:
        raise DgaError("cannot compose: target of the first map is not the source of the second")
    return DgaMorphism(phi1.source, phi2.target,
                       {name: morphism_apply(phi2, phi1.image(name)) for name in phi1.source.names})


def identity_morphism(dga: Dga) -> DgaMorphism:
    return DgaMorphism(dga, dga, {name: Element.word(name) for name in dga.names})


def capping_change_morphism(dga: Dga, signs: Mapping[str, int]) -> tuple[DgaMorphism, Dga]:
    """Phi(a) = s(a) a and the conjugated differential d' = Phi d Phi^{-1}."""
    missing = set(dga.names) - set(signs)
    if missing:
        raise DgaError(f"no sign given for chord {sorted(missing)[0]}")
    extra = set(signs) - set(dga.names)
    if extra:
        raise DgaError(f"sign given for unknown chord {sorted(extra)[0]}")
    if any(s not in (1, -1) for s in signs.values()):
        raise DgaError("capping signs must be +1 or -1")
    images = {name: Element.word(name, coeff=signs[name]) for name in dga.names}
    scale = DgaMorphism(dga, dga, images)
    new_diff = {name: morphism_apply(scale, dga.d(name)) * signs[name] for name in dga.names}
    new = Dga(dga.chords, new_diff)
    return DgaMorphism(dga, new, images), new


# ---------------------------------------------------------------------------
# tame moves


@dataclass(frozen=True)
class Substitution:
    """a -> sign*a + v, with v homogeneous of degree |a| and free of a."""
    generator: str
    sign: int
    v: Element


@dataclass(frozen=True)
class Stabilization:
    """New chords x (grading g) and y (grading g - 1) with dx = y."""
    x: str
    y: str
    grading: int


def apply_tame_moves(seed: Dga, moves: Sequence[Substitution | Stabilization]) -> Dga:
    """Conjugate the differential by each elementary automorphism in turn,
    or add a cancelling pair."""
    dga = seed
    for move in moves:
        if isinstance(move, Stabilization):
            if move.x in dga or move.y in dga or move.x == move.y:
                raise DgaError(f"stabilization reuses a chord name ({move.x}, {move.y})")
            chords = list(dga.chords) + [Chord(move.x, move.grading), Chord(move.y, move.grading - 1)]
            diff = dict(dga.diff)
            diff[move.x] = Element.word(move.y)
            dga = Dga(chords, diff)
            continue
        a, s, v = move.generator, move.sign, move.v
        if a not in dga:
            raise DgaError(f"unknown chord {a}")
        if s not in (1, -1):
            raise DgaError("substitution sign must be +1 or -1")
        if a in v.chords():
            raise DgaError(f"substitution for {a} references {a}")
        dga.check_element(v)
        g = dga.gradings
        if any(word_grading(w, g) != g[a] for w in v.terms):
            raise DgaError(f"substitution for {a} is not homogeneous of degree {g[a]}")
        fwd = {name: Element.word(name) for name in dga.names}
        fwd[a] = Element.word(a, coeff=s) + v
        psi = DgaMorphism(dga, dga, fwd)
        diff = {}
        for name in dga.names:
            if name == a:
                # psi^{-1}(a) = s (a - v)
                pre = (dga.d(a) - leibniz_extend(dga, v)) * s
            else:
                pre = dga.d(name)
            diff[name] = morphism_apply(psi, pre)
        dga = Dga(dga.chords, diff)
    return dga


def tame_move_morphism(dga: Dga, move: Substitution | Stabilization) -> tuple[DgaMorphism, Dga]:
    """The chain isomorphism (or inclusion, for a stabilization) into the moved DGA."""
    new = apply_tame_moves(dga, [move])
    images = {name: Element.word(name) for name in dga.names}
    if isinstance(move, Substitution):
        images[move.generator] = Element.word(move.generator, coeff=move.sign) + move.v
    return DgaMorphism(dga, new, images), new


def _homogeneous_words(dga: Dga, grading: int, avoid: str, max_len: int = 3) -> list[Word]:
    names = [n for n in dga.names if n != avoid]
    g = dga.gradings
    out = []
    for length in range(0, max_len + 1):
        for w in itertools.product(names, repeat=length):
            if word_grading(w, g) == grading:
                out.append(w)
    return out


def random_moves(seed: Dga, count: int, rng: random.Random, max_terms: int = 40) -> list[Substitution | Stabilization]:
    """A random sequence of valid moves starting from ``seed``.

    Substitutions use words of length at most 2; one that would push the
    differential past ``max_terms`` terms is replaced by a stabilization.
    """
    moves: list = []
    dga = seed
    fresh = itertools.count()
    for _ in range(count):
        move = None
        if rng.random() < 0.75 and dga.names:
            a = rng.choice(dga.names)
            words = _homogeneous_words(dga, dga.grading(a), a, max_len=2)
            if words:
                picked = rng.sample(words, min(len(words), rng.randint(1, 2)))
                v = Element({w: rng.choice([-2, -1, 1, 2]) for w in picked})
                move = Substitution(a, rng.choice([1, -1]), v)
                trial = apply_tame_moves(dga, [move])
                if sum(len(e) for e in trial.diff.values()) > max_terms:
                    move = None
        if move is None:
            i = next(fresh)
            while f"x{i}" in dga or f"y{i}" in dga:
                i = next(fresh)
            move = Stabilization(f"x{i}", f"y{i}", rng.randint(-1, 2))
        moves.append(move)
        dga = apply_tame_moves(dga, [move])
    return moves


# ---------------------------------------------------------------------------
# gradings


@dataclass(frozen=True)
class Violation:
    chord: str
    word: Word
    expected: int
    found: int

    def __str__(self) -> str:
        w = ".".join(self.word) or "1"
        return f"{self.chord}: word {w} has grading {self.found}, expected {self.expected}"


def grading_validate(obj: Dga | DgaMorphism) -> list[Violation]:
    """Words in d(a) must have grading |a| - 1; words in Phi(a) grading |a|."""
    out = []
    if isinstance(obj, Dga):
        g = obj.gradings
        for name in obj.names:
            for w, _ in obj.d(name):
                found = word_grading(w, g)
                if found != g[name] - 1:
                    out.append(Violation(name, w, g[name] - 1, found))
        return out
    gs, gt = obj.source.gradings, obj.target.gradings
    for name in obj.source.names:
        for w, _ in obj.image(name):
            found = word_grading(w, gt)
            if found != gs[name]:
                out.append(Violation(name, w, gs[name], found))
    return out


# ---------------------------------------------------------------------------
# augmentations and linearization


@dataclass(frozen=True)
class Augmentation:
    values: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType({k: int(v) for k, v in dict(self.values).items() if v}))

    def __call__(self, name: str) -> int:
        return self.values.get(name, 0)


def _check_aug(dga: Dga, aug: Augmentation) -> None:
    for name, value in aug.values.items():
        if name not in dga:
            raise DgaError(f"augmentation given on unknown chord {name}")
        if value and dga.grading(name) != 0:
            raise DgaError(f"augmentation is nonzero on {name}, which has grading {dga.grading(name)}")


def augment(aug: Augmentation, x: Element) -> int:
    """Multiplicative extension with aug(1) = 1."""
    total = 0
    for word, c in x.terms.items():
        term = c
        for name in word:
            term *= aug(name)
            if not term:
                break
        total += term
    return total


def augmentation_check(dga: Dga, aug: Augmentation) -> tuple[bool, dict[str, int]]:
    """(verdict, {chord: aug(d chord)} for the chords where it is nonzero)."""
    _check_aug(dga, aug)
    bad = {}
    for name in dga.names:
        value = augment(aug, dga.d(name))
        if value:
            bad[name] = value
    return not bad, bad


@dataclass(frozen=True)
class LinearBlock:
    """Matrix of the linearized differential from grading k to k-1."""
    grading: int
    columns: tuple[str, ...]
    rows: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def rank(self) -> int:
        return la.rank(la.to_matrix(self.matrix)) if self.rows and self.columns else 0


def linearized_differential(dga: Dga, aug: Augmentation) -> dict[int, LinearBlock]:
    """Length-one part of d after conjugating by a -> a + aug(a), per grading."""
    _check_aug(dga, aug)
    g = dga.gradings
    by_grading: dict[int, list[str]] = {}
    for name in dga.names:
        by_grading.setdefault(g[name], []).append(name)
    linear: dict[str, dict[str, int]] = {}
    for name in dga.names:
        row: dict[str, int] = {}
        for word, c in dga.d(name).terms.items():
            for i, x in enumerate(word):
                coeff = c
                for j, y in enumerate(word):
                    if j != i:
                        coeff *= aug(y)
                        if not coeff:
                            break
                if coeff:
                    row[x] = row.get(x, 0) + coeff
        linear[name] = row
    blocks = {}
    for k in sorted(by_grading):
        cols = tuple(by_grading[k])
        rows = tuple(by_grading.get(k - 1, []))
        matrix = tuple(tuple(linear[a].get(b, 0) for a in cols) for b in rows)
        blocks[k] = LinearBlock(k, cols, rows, matrix)
    return blocks


def linearized_square(blocks: Mapping[int, LinearBlock]) -> list[int]:
    """Gradings k where d_{k-1} d_k is nonzero."""
    bad = []
    for k, blk in blocks.items():
        lower = blocks.get(k - 1)
        if lower is None or not blk.rows or not lower.rows or not blk.columns:
            continue
        prod = la.matmul(la.to_matrix(lower.matrix), la.to_matrix(blk.matrix))
        if not la.is_zero(prod):
            bad.append(k)
    return bad


def homology_ranks(blocks: Mapping[int, LinearBlock]) -> dict[int, int]:
    """Ranks over Q of the linearized homology, per grading."""
    out = {}
    for k, blk in blocks.items():
        upper = blocks.get(k + 1)
        incoming = upper.rank() if upper is not None else 0
        out[k] = len(blk.columns) - blk.rank() - incoming
    return out
