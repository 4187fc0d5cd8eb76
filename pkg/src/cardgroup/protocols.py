"""Permutation division and permutation randomizing with a fixing set."""

from __future__ import annotations

from dataclasses import dataclass

from .cards import UP, CardSequence, permutation_of_sequence
from .errors import BadFixingSet, DegreeMismatch, WouldLeak
from .perm import Permutation, inverse
from .table import Opened, SecretEntry, Table


def permutation_division(table: Table, row_v: int, row_w: int) -> int:
    """Turn committed rows for ``v`` and ``w`` into a committed row for ``v^-1 w``.

    One shared Pile-Scramble Shuffle, opening the ``v`` row (which then
    shows ``r v``, uniform whatever ``v`` is), and a public rearrangement by
    ``(r v)^-1``.  Returns ``row_w``, which now holds ``v^-1 w``; ``row_v``
    is left open showing the identity.
    """
    v_seq, w_seq = table.row(row_v), table.row(row_w)
    if v_seq.degree != w_seq.degree:
        raise DegreeMismatch(f"rows {row_v} and {row_w} differ in length")
    if not (v_seq.is_committed() and w_seq.is_committed()):
        raise WouldLeak("division inputs must be fully face down")
    table.pile_scramble([row_v, row_w])
    table.open_row(row_v)
    rv = permutation_of_sequence(table.row(row_v))
    table.rearrange_publicly([row_v, row_w], inverse(rv))
    return row_w


@dataclass(frozen=True)
class RandomizingSpec:
    degree: int
    inputs: tuple
    fixing_set: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "fixing_set", frozenset(int(a) for a in self.fixing_set))
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if not self.inputs:
            raise ValueError("need at least one input permutation")
        for tau in self.inputs:
            if tau.degree != self.degree:
                raise DegreeMismatch(f"input of degree {tau.degree} in a degree-{self.degree} run")
        bad = sorted(a for a in self.fixing_set if not 1 <= a <= self.degree)
        if bad:
            raise BadFixingSet(f"fixing set elements {bad} outside 1..{self.degree}")

    @property
    def free(self) -> tuple:
        return tuple(a for a in range(1, self.degree + 1) if a not in self.fixing_set)


def permutation_randomizing(table: Table, spec: RandomizingSpec) -> list:
    """Commit ``sigma^-1 tau_i sigma`` for every input, with one hidden ``sigma``.

    ``sigma`` is uniform over the permutations fixing ``spec.fixing_set``.
    The 2k rows are laid out face up as ``1..n``; the free columns are
    turned down and scrambled together, then the fixed columns are turned
    down.  This is the same as scrambling the free cards alone and
    inserting card ``a`` at column ``a`` for each fixed ``a``.  Returns the
    k output row indices in input order.
    """
    n, k = spec.degree, len(spec.inputs)
    layout = CardSequence.of_values(range(1, n + 1), UP)
    rows = table.create_rows([layout] * (2 * k))
    sigma_rows, tau_rows = rows[:k], rows[k:]
    free = spec.free
    fixed = tuple(sorted(spec.fixing_set))
    if free:
        table.face_down(rows, free)
        table.pile_scramble_columns(rows, free)
    if fixed:
        table.face_down(rows, fixed)
    sigma = permutation_of_sequence(table.row(rows[0]), secret_access=True)
    table.secret_log.append(SecretEntry("sigma", sigma))

    for row, tau in zip(tau_rows, spec.inputs):
        table.rearrange_publicly([row], tau)
    for v_row, w_row in zip(sigma_rows, tau_rows):
        permutation_division(table, v_row, w_row)
    table.discard(sigma_rows)
    return list(tau_rows)


def shuffle_for_sigma(sigma: Permutation, fixing_set=()) -> Permutation:
    """The free-column shuffle that makes the randomizing protocol produce ``sigma``.

    Feed the result to a :class:`~cardgroup.table.ScriptedSource` to
    reproduce a run with a chosen hidden permutation.
    """
    fixed = set(fixing_set)
    if any(sigma(a) != a for a in fixed):
        raise BadFixingSet("sigma moves an element of the fixing set")
    free = [a for a in range(1, sigma.degree + 1) if a not in fixed]
    where = {a: i for i, a in enumerate(free, 1)}
    return Permutation(where[sigma(a)] for a in free)


def adversary_view(transcript) -> list:
    """The permutations revealed by every opened row, in order."""
    views = []
    for event in transcript:
        if isinstance(event, Opened):
            views.append(permutation_of_sequence(CardSequence.of_values(event.values, UP)))
    return views
