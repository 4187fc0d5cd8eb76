"""Permutations of {1..n}.

A permutation is stored in one-line form: ``images[i-1]`` is the image of
``i``.  Cycles are a derived view.

Composition convention: ``compose(f, g)`` (also ``f * g``) applies ``g``
first and then ``f``, so ``(f * g)(i) == f(g(i))``.  This is the order under
which applying ``tau`` to the card sequence of ``sigma`` gives the card
sequence of ``tau * sigma``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegreeMismatch, NotAPermutation

__all__ = [
    "Permutation",
    "Cycle",
    "CycleDecomposition",
    "CycleType",
    "identity",
    "from_cycles",
    "compose",
    "inverse",
    "power",
    "decompose",
    "cycle_type",
    "conjugate_by_relabeling",
    "parse_permutation",
]


class Permutation:
    """An element of the symmetric group S_n in one-line form (1-based)."""

    __slots__ = ("_images", "_hash")

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        n = len(images)
        if n < 1:
            raise NotAPermutation("degree must be at least 1")
        if sorted(images) != list(range(1, n + 1)):
            raise NotAPermutation(f"{list(images)} is not a permutation of 1..{n}")
        self._images = images
        self._hash = hash(images)

    @classmethod
    def _trusted(cls, images: tuple) -> Permutation:
        # skips the bijection check; callers guarantee validity
        obj = cls.__new__(cls)
        obj._images = images
        obj._hash = hash(images)
        return obj

    @property
    def images(self) -> tuple:
        return self._images

    @property
    def degree(self) -> int:
        return len(self._images)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= len(self._images):
            raise IndexError(f"{i} outside 1..{len(self._images)}")
        return self._images[i - 1]

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._images == other._images

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Permutation):
        return (self.degree, self._images) < (other.degree, other._images)

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __pow__(self, e: int) -> Permutation:
        return power(self, e)

    def __invert__(self) -> Permutation:
        return inverse(self)

    def inverse(self) -> Permutation:
        return inverse(self)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self._images, 1))

    def cycles(self) -> CycleDecomposition:
        return decompose(self)

    def cycle_type(self) -> CycleType:
        return cycle_type(self)

    def oneline(self) -> str:
        return "[" + ",".join(map(str, self._images)) + "]"

    def cycle_string(self, include_fixed: bool = False) -> str:
        return decompose(self).render(include_fixed=include_fixed)

    def __str__(self):
        return self.cycle_string()

    def __repr__(self):
        return f"Permutation({list(self._images)})"


def identity(n: int) -> Permutation:
    if n < 1:
        raise NotAPermutation("degree must be at least 1")
    return Permutation._trusted(tuple(range(1, n + 1)))


def from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
    """Build a permutation of the given degree from disjoint cycles.

    Cycles of length one may be included or omitted.
    """
    images = list(range(1, degree + 1))
    seen = set()
    for cyc in cycles:
        cyc = [int(a) for a in cyc]
        for a in cyc:
            if not 1 <= a <= degree:
                raise NotAPermutation(f"cycle element {a} outside 1..{degree}")
            if a in seen:
                raise NotAPermutation(f"element {a} appears in more than one cycle")
            seen.add(a)
        for pos, a in enumerate(cyc):
            images[a - 1] = cyc[(pos + 1) % len(cyc)]
    return Permutation._trusted(tuple(images))


def _check_degrees(f: Permutation, g: Permutation):
    if f.degree != g.degree:
        raise DegreeMismatch(f"degrees differ: {f.degree} vs {g.degree}")


def compose(f: Permutation, g: Permutation) -> Permutation:
    """Return ``f * g``: apply ``g`` first, then ``f``."""
    _check_degrees(f, g)
    fi = f.images
    return Permutation._trusted(tuple(fi[x - 1] for x in g.images))


def inverse(f: Permutation) -> Permutation:
    out = [0] * f.degree
    for i, v in enumerate(f.images, 1):
        out[v - 1] = i
    return Permutation._trusted(tuple(out))


def power(f: Permutation, e: int) -> Permutation:
    if e < 0:
        return power(inverse(f), -e)
    result = identity(f.degree)
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


@dataclass(frozen=True)
class Cycle:
    """A cycle ``(i_1 i_2 ... i_r)`` stored with its smallest element first."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(int(a) for a in self.elements)
        if not elems:
            raise ValueError("a cycle needs at least one element")
        if len(set(elems)) != len(elems):
            raise ValueError(f"cycle {elems} repeats an element")
        k = elems.index(min(elems))
        object.__setattr__(self, "elements", elems[k:] + elems[:k])

    @property
    def length(self) -> int:
        return len(self.elements)

    @property
    def area(self) -> frozenset:
        """The cyclic area: the set of numbers the cycle runs through."""
        return frozenset(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __str__(self):
        return "(" + " ".join(map(str, self.elements)) + ")"


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple
    degree: int

    def nontrivial(self) -> tuple:
        return tuple(c for c in self.cycles if c.length > 1)

    def product(self) -> Permutation:
        return from_cycles((c.elements for c in self.cycles), self.degree)

    def cycle_containing(self, i: int) -> Cycle:
        for c in self.cycles:
            if i in c.elements:
                return c
        raise KeyError(i)

    def render(self, include_fixed: bool = False) -> str:
        shown = self.cycles if include_fixed else self.nontrivial()
        if not shown:
            return "()"
        return "".join(str(c) for c in shown)

    def __iter__(self):
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)

    def __str__(self):
        return self.render()


def decompose(f: Permutation) -> CycleDecomposition:
    """Disjoint cycles of ``f``, fixed points included, sorted by leading element."""
    n = f.degree
    images = f.images
    seen = [False] * (n + 1)
    cycles = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        elems = []
        a = start
        while not seen[a]:
            seen[a] = True
            elems.append(a)
            a = images[a - 1]
        # start is the smallest unseen element, so the cycle is already canonical
        cycles.append(Cycle(tuple(elems)))
    return CycleDecomposition(tuple(cycles), n)


@dataclass(frozen=True)
class CycleType:
    """Multiplicities ``m_i`` of cycles of each length ``i``."""

    multiplicities: tuple  # sorted (length, count) pairs with count > 0
    degree: int

    @classmethod
    def from_counts(cls, counts: dict, degree: int) -> CycleType:
        pairs = tuple(sorted((int(k), int(v)) for k, v in counts.items() if v))
        if sum(k * v for k, v in pairs) != degree:
            raise ValueError(f"cycle lengths {dict(pairs)} do not sum to {degree}")
        return cls(pairs, degree)

    def as_dict(self) -> dict:
        return dict(self.multiplicities)

    def count(self, length: int) -> int:
        return self.as_dict().get(length, 0)

    def __str__(self):
        return "<" + ", ".join(f"{k}^{v}" for k, v in self.multiplicities) + ">"


def cycle_type(f: Permutation) -> CycleType:
    counts: dict = {}
    for c in decompose(f):
        counts[c.length] = counts.get(c.length, 0) + 1
    return CycleType.from_counts(counts, f.degree)


def conjugate_by_relabeling(pi: Permutation, nu: Permutation) -> Permutation:
    """Return ``nu^-1 * pi * nu`` by renaming every ``j`` in the cycles of ``pi`` to ``nu^-1(j)``.

    No group multiplication is performed; the result is rebuilt from the
    relabelled cycle expression.
    """
    _check_degrees(pi, nu)
    nu_inv = inverse(nu).images
    relabelled = [[nu_inv[j - 1] for j in c.elements] for c in decompose(pi)]
    return from_cycles(relabelled, pi.degree)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, degree: int | None = None) -> Permutation:
    """Parse ``"[2,1,4,3]"`` (one-line) or ``"(1 2)(3 4)"`` (cycles).

    Cycle form needs an explicit ``degree``.  Inside a cycle, elements may
    be separated by spaces or commas; the compact ``(123)`` form is
    accepted only when ``degree <= 9``.  ``"()"`` and ``"id"`` denote the
    identity.
    """
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"unterminated one-line form: {text!r}")
        body = s[1:-1].replace(",", " ").split()
        perm = Permutation(int(tok) for tok in body)
        if degree is not None and perm.degree != degree:
            raise DegreeMismatch(f"expected degree {degree}, got {perm.degree}")
        return perm
    if degree is None:
        raise ValueError("cycle form needs an explicit degree")
    if s in ("id", "()", ""):
        return identity(degree)
    if _CYCLE_RE.sub("", s).strip():
        raise ValueError(f"cannot parse permutation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(s):
        toks = body.replace(",", " ").split()
        if len(toks) == 1 and len(toks[0]) > 1:
            if degree > 9:
                raise ValueError(f"compact cycle {body!r} is ambiguous for degree {degree}")
            toks = list(toks[0])
        if toks:
            cycles.append([int(t) for t in toks])
    return from_cycles(cycles, degree)
