"""Card-based secure grouping: permutation algebra, committed card rows,
Pile-Scramble Shuffles and the grouping protocol, with brute-force oracles."""

from .cards import DOWN, UP, Card, CardSequence, Facing, apply_permutation, flip_all, permutation_of_sequence, sequence_of_permutation
from .errors import (
    BadConstraint,
    BadFixingSet,
    DegreeMismatch,
    HiddenCard,
    InsufficientSamples,
    NotAPermutation,
    ReplayDiverged,
    RowLengthMismatch,
    TooLargeForOracle,
    WouldLeak,
)
from .grouping import (
    Constraint,
    Grouping,
    PlayerView,
    fixing_set,
    grouping_of_permutation,
    parse_constraint,
    permutation_satisfies_constraint,
    precompute_tau_general,
    precompute_tau_simple,
    run_secure_grouping,
    validate_constraint,
)
from .perm import (
    Permutation,
    compose,
    conjugate_by_relabeling,
    cycle_type,
    decompose,
    from_cycles,
    identity,
    inverse,
    parse_permutation,
    power,
)
from .protocols import RandomizingSpec, adversary_view, permutation_division, permutation_randomizing
from .table import ScriptedSource, SeededSource, Table, Transcript, replay

__version__ = "0.1.0"
