"""Constraints, the public seed permutation and the secure grouping protocol.

A constraint ``(M, C)`` fixes how many groups of each size exist
(``M[k]`` groups of size ``k``) and which indices must share a group
(each set in ``C[k]`` lies inside one size-``k`` group, different sets in
different groups).  Group sizes weight the total: ``sum(k * M[k]) == n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import BadConstraint
from .perm import (
    Permutation,
    conjugate_by_relabeling,
    cycle_type,
    decompose,
    from_cycles,
    identity,
    power,
)
from .protocols import RandomizingSpec, permutation_randomizing
from .table import Table, Transcript

__all__ = [
    "Constraint",
    "Grouping",
    "PlayerView",
    "GroupingRun",
    "TraceStep",
    "validate_constraint",
    "fixing_set",
    "precompute_tau_simple",
    "precompute_tau_general",
    "tau_trace",
    "run_secure_grouping",
    "grouping_of_permutation",
    "permutation_satisfies_constraint",
    "grouping_satisfies_constraint",
    "parse_constraint",
    "load_constraint",
    "format_constraint",
]


def _sizes_from(M) -> dict:
    if isinstance(M, Mapping):
        items = M.items()
    else:
        items = enumerate(M, 1)
    return {int(k): int(v) for k, v in items if v}


@dataclass
class Constraint:
    """Public grouping constraint over indices ``1..n``.

    ``M`` may be given as a tuple ``(M(1), M(2), ...)`` or as a mapping.
    ``dummies`` only labels indices for display; the engine ignores it.
    """

    n: int
    M: dict
    C: dict = field(default_factory=dict)
    dummies: dict = field(default_factory=dict)

    def __post_init__(self):
        self.M = _sizes_from(self.M)
        self.C = {int(k): tuple(tuple(int(a) for a in s) for s in sets) for k, sets in self.C.items() if sets}
        if not isinstance(self.dummies, Mapping):
            self.dummies = {int(a): str(a) for a in self.dummies}

    @property
    def max_group_size(self) -> int:
        return max(self.M) if self.M else 0

    def sizes_tuple(self) -> tuple:
        return tuple(self.M.get(k, 0) for k in range(1, self.max_group_size + 1))

    def constraint_sets(self):
        for k in sorted(self.C):
            for s in self.C[k]:
                yield k, s

    def __str__(self):
        parts = [f"n={self.n}", "M=(" + ",".join(map(str, self.sizes_tuple())) + ")"]
        for k, s in self.constraint_sets():
            parts.append(f"C[{k}]∋{{{','.join(map(str, s))}}}")
        return " ".join(parts)


def _violations(c: Constraint) -> list:
    """(message, locator) pairs; locator is "n", "M", ("C", k, i) or "dummy"."""
    out = []
    if c.n < 1:
        out.append((f"n must be at least 1, got {c.n}", "n"))
    for k, m in c.M.items():
        if k < 1:
            out.append((f"group size {k} must be positive", "M"))
        if m < 0:
            out.append((f"M({k}) = {m} is negative", "M"))
    total = sum(k * m for k, m in c.M.items())
    if total != c.n:
        out.append((f"group sizes sum to {total} but n = {c.n}", "M"))
    owner: dict = {}
    for k in sorted(c.C):
        sets = c.C[k]
        if len(sets) > c.M.get(k, 0):
            out.append((f"|C_{k}| = {len(sets)} exceeds M({k}) = {c.M.get(k, 0)}", ("C", k, len(sets) - 1)))
        for i, s in enumerate(sets):
            where = ("C", k, i)
            if not 1 <= len(s) <= k:
                out.append((f"set {set(s) or '{}'} in C_{k} must have between 1 and {k} elements", where))
            if any(not 1 <= a <= c.n for a in s):
                out.append((f"set {set(s)} in C_{k} has elements outside 1..{c.n}", where))
            if list(s) != sorted(set(s)):
                out.append((f"set {list(s)} in C_{k} must be written in increasing order", where))
            for a in s:
                if a in owner and owner[a] != (k, i):
                    out.append((f"index {a} appears in more than one constraint set", where))
                owner.setdefault(a, (k, i))
    for a in c.dummies:
        if not 1 <= a <= c.n:
            out.append((f"dummy index {a} outside 1..{c.n}", "dummy"))
    return out


def validate_constraint(c: Constraint) -> list:
    """Return the violated conditions as messages; an empty list means valid."""
    return [msg for msg, _ in _violations(c)]


def _require_valid(c: Constraint):
    problems = validate_constraint(c)
    if problems:
        raise BadConstraint(problems)


def fixing_set(c: Constraint) -> frozenset:
    return frozenset(a for _, s in c.constraint_sets() for a in s)


def precompute_tau_simple(n: int, M) -> Permutation:
    """Seed permutation for constraints without pinned sets.

    Size-``i`` groups take consecutive blocks of numbers after all smaller
    groups: block ``j`` of size ``i`` is the cycle starting at
    ``a_{i-1} + (j-1) i + 1`` where ``a_i = a_{i-1} + i M(i)``.
    """
    sizes = _sizes_from(M)
    if any(k < 1 or m < 0 for k, m in sizes.items()) or sum(k * m for k, m in sizes.items()) != n:
        raise BadConstraint(f"group sizes {sizes} do not partition {n} indices")
    cycles = []
    a = 0
    for i in range(1, max(sizes, default=0) + 1):
        for j in range(1, sizes.get(i, 0) + 1):
            start = a + (j - 1) * i + 1
            cycles.append(range(start, start + i))
        a += i * sizes.get(i, 0)
    return from_cycles(cycles, n)


@dataclass(frozen=True)
class TraceStep:
    """State after one step of the general seed construction."""

    lam: int | None  # None for the initial state
    mu: int | None
    cycles: tuple  # cycles in construction order, as built
    remaining: tuple  # ((k, sets), ...) for k = 1..max size
    pool: tuple  # the unused indices B, ascending
    n: int

    def tau(self) -> Permutation:
        return from_cycles(self.cycles, self.n)

    def render(self) -> str:
        head = "(Initialize)" if self.lam is None else f"(λ={self.lam}, μ={self.mu})"
        shown = [c for c in self.cycles if len(c) > 1]
        if shown:
            tau = "".join("(" + " ".join(map(str, c)) + ")" for c in shown)
        elif self.cycles:
            tau = "(" + " ".join(map(str, self.cycles[-1])) + f") = id_{self.n}"
        else:
            tau = f"id_{self.n}"
        sets = []
        for k, ss in self.remaining:
            body = ",".join("{" + ",".join(map(str, s)) + "}" for s in ss)
            sets.append(f"C_{k} = " + ("{" + body + "}" if ss else "∅"))
        pool = "{" + ",".join(map(str, self.pool)) + "}" if self.pool else "∅"
        return f"{head} τ = {tau}, " + ", ".join(sets) + f", B = {pool}"


def tau_trace(c: Constraint) -> list:
    """Run the general seed construction, returning every intermediate state.

    Pinned sets of each size are consumed in order of their smallest
    element, and "the first elements of B" are the smallest ones.
    """
    _require_valid(c)
    k_max = c.max_group_size
    pending = {k: sorted(c.C.get(k, ()), key=min) for k in range(1, k_max + 1)}
    pool = sorted(set(range(1, c.n + 1)) - fixing_set(c))
    cycles: list = []

    def snapshot(lam, mu):
        remaining = tuple((k, tuple(pending[k])) for k in range(1, k_max + 1))
        return TraceStep(lam, mu, tuple(cycles), remaining, tuple(pool), c.n)

    steps = [snapshot(None, None)]
    for lam in range(1, k_max + 1):
        for mu in range(1, c.M.get(lam, 0) + 1):
            if pending[lam]:
                pinned = pending[lam].pop(0)
                take = lam - len(pinned)
                cycle = tuple(pinned) + tuple(pool[:take])
            else:
                take = lam
                cycle = tuple(pool[:take])
            del pool[:take]
            cycles.append(cycle)
            steps.append(snapshot(lam, mu))
    return steps


def precompute_tau_general(c: Constraint) -> Permutation:
    return tau_trace(c)[-1].tau()


class Grouping:
    """A partition of ``{1..n}``."""

    __slots__ = ("groups", "n")

    def __init__(self, groups: Iterable[Iterable[int]]):
        groups = frozenset(frozenset(int(a) for a in g) for g in groups)
        members = [a for g in groups for a in g]
        if any(not g for g in groups):
            raise ValueError("groups must be non-empty")
        if len(members) != len(set(members)):
            raise ValueError("groups overlap")
        n = len(members)
        if set(members) != set(range(1, n + 1)):
            raise ValueError(f"groups do not cover 1..{n}")
        self.groups = groups
        self.n = n

    def sorted_groups(self) -> list:
        return sorted((sorted(g) for g in self.groups), key=lambda g: g[0])

    def key(self) -> str:
        """Canonical text form, e.g. ``"1,5|2,3,6|4"``."""
        return "|".join(",".join(map(str, g)) for g in self.sorted_groups())

    def group_of(self, i: int) -> frozenset:
        for g in self.groups:
            if i in g:
                return g
        raise KeyError(i)

    def of_size(self, k: int) -> list:
        return [g for g in self.groups if len(g) == k]

    def sizes(self) -> dict:
        out: dict = {}
        for g in self.groups:
            out[len(g)] = out.get(len(g), 0) + 1
        return out

    def remainder_key(self, i: int) -> str:
        """Canonical form of the groups not containing ``i``."""
        return "|".join(",".join(map(str, g)) for g in self.sorted_groups() if i not in g)

    def __eq__(self, other):
        if not isinstance(other, Grouping):
            return NotImplemented
        return self.groups == other.groups

    def __hash__(self):
        return hash(self.groups)

    def __iter__(self):
        return iter(self.sorted_groups())

    def __len__(self):
        return len(self.groups)

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(map(str, g)) + "}" for g in self.sorted_groups()) + "}"

    def __repr__(self):
        return f"Grouping({self.key()!r})"


def grouping_of_permutation(pi: Permutation) -> Grouping:
    return Grouping(c.elements for c in decompose(pi))


def _target_type(c: Constraint) -> dict:
    return {k: m for k, m in c.M.items() if m}


def permutation_satisfies_constraint(pi: Permutation, c: Constraint) -> bool:
    """Whether ``pi`` has the constraint's cycle type and respects every pinned set.

    A pinned set ``a_1 < ... < a_h`` of ``C[k]`` must sit in one length-``k``
    cycle with ``pi(a_j) == a_{j+1}``, and distinct pinned sets must sit in
    distinct cycles.
    """
    if pi.degree != c.n:
        return False
    if cycle_type(pi).as_dict() != _target_type(c):
        return False
    dec = decompose(pi)
    used = set()
    for k, s in c.constraint_sets():
        cyc = dec.cycle_containing(s[0])
        if cyc.length != k or not set(s) <= cyc.area:
            return False
        if any(pi(a) != b for a, b in zip(s, s[1:])):
            return False
        if cyc.elements in used:
            return False
        used.add(cyc.elements)
    return True


def grouping_satisfies_constraint(g: Grouping, c: Constraint) -> bool:
    """Check a partition directly against the constraint's group counts and pinned sets."""
    if g.n != c.n:
        return False
    if g.sizes() != _target_type(c):
        return False
    for k in c.C:
        homes = []
        for s in c.C[k]:
            hits = [A for A in g.of_size(k) if set(s) <= A]
            if len(hits) != 1:
                return False
            homes.append(hits[0])
        if len(set(homes)) != len(homes):
            return False
    return True


@dataclass(frozen=True)
class PlayerView:
    player: int
    picked: tuple  # fronts of the i-th card of the rows for rho, rho^2, ..., rho^(k-1)

    @property
    def group(self) -> frozenset:
        return frozenset((self.player, *self.picked))

    def render(self) -> str:
        return f"Player {self.player}: group {{{','.join(map(str, sorted(self.group)))}}}"


@dataclass
class GroupingRun:
    constraint: Constraint
    tau: Permutation
    views: dict  # player -> PlayerView
    transcript: Transcript
    table: Table | None
    grouping: Grouping | None  # None in strict mode

    @property
    def secret_log(self):
        return self.table.secret_log if self.table is not None else None

    def sigma(self) -> Permutation:
        if self.table is None:
            return identity(self.constraint.n)
        return self.table.secret_log.latest("sigma").perm

    def rho(self) -> Permutation:
        return conjugate_by_relabeling(self.tau, self.sigma())


def run_secure_grouping(c: Constraint, seed=None, *, source=None, strict: bool = False) -> GroupingRun:
    """Run the whole protocol for one constraint.

    Randomness comes from ``source`` if given, else from a seeded source.
    The returned grouping is rebuilt from the hidden permutation for
    verification only; ``strict=True`` leaves it out so the player views
    are the only output.
    """
    _require_valid(c)
    tau = precompute_tau_general(c)
    k = c.max_group_size
    if k <= 1:
        views = {i: PlayerView(i, ()) for i in range(1, c.n + 1)}
        grouping = None if strict else grouping_of_permutation(tau)
        return GroupingRun(c, tau, views, Transcript(), None, grouping)

    table = Table(source=source, seed=seed)
    spec = RandomizingSpec(c.n, [power(tau, j) for j in range(1, k)], fixing_set(c))
    out_rows = permutation_randomizing(table, spec)
    hands = table.deal(out_rows)
    views = {i: PlayerView(i, tuple(hands[i])) for i in range(1, c.n + 1)}
    run = GroupingRun(c, tau, views, table.transcript, table, None)
    if not strict:
        run.grouping = grouping_of_permutation(run.rho())
    return run


# -- constraint files ------------------------------------------------------

_LINE_RE = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\[\s*(\d+)\s*\])?\s*=\s*(.*?)\s*$")
_SET_RE = re.compile(r"^\{\s*([\d\s,]*)\s*\}$")


def parse_constraint(text: str) -> Constraint:
    """Parse the line-oriented constraint format.

    ::

        n = 9
        M = 2,2,1
        C[2] = {8}
        C[3] = {9}
        dummy = 8,9

    ``dummy`` entries may carry names (``dummy = 8:Role B, 9:Role C``).
    Problems raise :class:`BadConstraint` with line-numbered messages.
    """
    n = None
    M = None
    C: dict = {}
    dummies: dict = {}
    lines: dict = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_RE.match(line)
        if not m:
            errors.append(f"line {lineno}: cannot parse {raw.strip()!r}")
            continue
        key, idx, value = m.group(1), m.group(2), m.group(3)
        try:
            if key == "n" and idx is None:
                n = int(value)
                lines["n"] = lineno
            elif key == "M" and idx is None:
                M = tuple(int(t) for t in value.replace(" ", "").strip("()").split(",") if t)
                lines["M"] = lineno
            elif key == "C" and idx is not None:
                k = int(idx)
                sm = _SET_RE.match(value)
                if not sm:
                    raise ValueError(f"expected a set like {{8,9}}, got {value!r}")
                elems = tuple(int(t) for t in sm.group(1).replace(",", " ").split())
                if not elems:
                    raise ValueError("constraint sets must be non-empty")
                if list(elems) != sorted(set(elems)):
                    raise ValueError(f"set {{{value.strip('{}')}}} must be written in increasing order")
                lines[("C", k, len(C.get(k, ())))] = lineno
                C.setdefault(k, []).append(elems)
            elif key == "dummy" and idx is None:
                for tok in value.split(","):
                    tok = tok.strip()
                    if not tok:
                        continue
                    num, _, name = tok.partition(":")
                    dummies[int(num)] = name.strip() or num.strip()
                lines["dummy"] = lineno
            else:
                raise ValueError(f"unknown key {key if idx is None else f'{key}[{idx}]'!r}")
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if n is None:
        errors.append("missing 'n = ...' line")
    if M is None:
        errors.append("missing 'M = ...' line")
    if errors:
        raise BadConstraint(errors)
    c = Constraint(n, M, C, dummies)
    problems = []
    for msg, where in _violations(c):
        lineno = lines.get(where)
        problems.append(f"line {lineno}: {msg}" if lineno else msg)
    if problems:
        raise BadConstraint(problems)
    return c


def load_constraint(path) -> Constraint:
    with open(path, encoding="utf-8") as fh:
        return parse_constraint(fh.read())


def format_constraint(c: Constraint) -> str:
    out = [f"n = {c.n}", "M = " + ",".join(map(str, c.sizes_tuple()))]
    for k, s in c.constraint_sets():
        out.append(f"C[{k}] = {{{','.join(map(str, s))}}}")
    if c.dummies:
        out.append("dummy = " + ", ".join(
            str(a) if name == str(a) else f"{a}:{name}" for a, name in sorted(c.dummies.items())
        ))
    return "\n".join(out) + "\n"
