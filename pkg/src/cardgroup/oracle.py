"""Brute-force oracles and statistical checks for the grouping protocol.

The enumerations here do not use the protocol: valid permutations come
from filtering all of S_n, valid groupings from filtering all set
partitions.  Monte-Carlo helpers run the real protocol with one child
seed per trial, so results do not depend on the number of workers.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cards import permutation_of_sequence
from .chisq import ChiSquareResult, conditional_uniformity, goodness_of_fit, independence
from .errors import InsufficientSamples, TooLargeForOracle
from .grouping import (
    Constraint,
    Grouping,
    _require_valid,
    grouping_of_permutation,
    grouping_satisfies_constraint,
    permutation_satisfies_constraint,
    run_secure_grouping,
)
from .perm import Permutation, identity
from .protocols import RandomizingSpec, adversary_view, permutation_division, permutation_randomizing
from .table import ScriptedSource, SeededSource, Table

MAX_PERMUTATION_ORACLE = 8
MAX_GROUPING_ORACLE = 10
MIN_EXPECTED_PER_GROUPING = 20


def enumerate_valid_permutations(c: Constraint) -> list:
    _require_valid(c)
    if c.n > MAX_PERMUTATION_ORACLE:
        raise TooLargeForOracle(f"n = {c.n} exceeds {MAX_PERMUTATION_ORACLE} for permutation enumeration")
    out = []
    for images in itertools.permutations(range(1, c.n + 1)):
        pi = Permutation._trusted(images)
        if permutation_satisfies_constraint(pi, c):
            out.append(pi)
    return out


def set_partitions(n: int):
    """Yield every partition of ``{1..n}`` as a list of lists (restricted growth order)."""

    def grow(i, blocks):
        if i > n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from grow(i + 1, blocks)
        blocks.pop()

    yield from grow(1, [])


def enumerate_valid_groupings(c: Constraint) -> list:
    _require_valid(c)
    if c.n > MAX_GROUPING_ORACLE:
        raise TooLargeForOracle(f"n = {c.n} exceeds {MAX_GROUPING_ORACLE} for partition enumeration")
    target = sorted(k for k, m in c.M.items() for _ in range(m))
    out = []
    for blocks in set_partitions(c.n):
        if sorted(map(len, blocks)) != target:
            continue
        g = Grouping(blocks)
        if grouping_satisfies_constraint(g, c):
            out.append(g)
    return sorted(out, key=Grouping.key)


@dataclass
class EnumerationReport:
    constraint: Constraint
    valid_permutations: int
    valid_groupings: int
    fiber_sizes: dict  # Grouping -> count
    method: str = "scan"  # "scan" filters all of S_n, "per-grouping" only the cycle orders of valid groupings

    @property
    def fibers_equal(self) -> bool:
        return len(set(self.fiber_sizes.values())) <= 1

    @property
    def fiber_size(self) -> int | None:
        sizes = set(self.fiber_sizes.values())
        return sizes.pop() if len(sizes) == 1 else None

    @property
    def matches_oracle(self) -> bool:
        return len(self.fiber_sizes) == self.valid_groupings and sum(self.fiber_sizes.values()) == self.valid_permutations

    def render(self) -> str:
        lines = [
            "[enumerate]",
            f"constraint = {self.constraint}",
            f"valid_permutations = {self.valid_permutations}",
            f"valid_groupings = {self.valid_groupings}",
            f"method = {self.method}",
            f"fibers_equal = {str(self.fibers_equal).lower()}",
            f"matches_oracle = {str(self.matches_oracle).lower()}",
        ]
        for g in sorted(self.fiber_sizes, key=Grouping.key):
            lines.append(f"fiber {g.key()} = {self.fiber_sizes[g]}")
        return "\n".join(lines) + "\n"


def _cycle_orders(block):
    first, *rest = sorted(block)
    for tail in itertools.permutations(rest):
        yield (first, *tail)


def _permutations_with_grouping(g: Grouping):
    """Every permutation whose cyclic areas are exactly the groups of ``g``."""
    blocks = g.sorted_groups()
    for cycles in itertools.product(*(_cycle_orders(b) for b in blocks)):
        images = [0] * g.n
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        yield Permutation._trusted(tuple(images))


def fiber_report(c: Constraint) -> EnumerationReport:
    """Fiber sizes of the valid groupings.

    Up to n = 8 every permutation of S_n is filtered, so a valid permutation
    landing on an invalid grouping would show up as an extra fiber.  For
    n = 9 and 10 only the cycle orders of each valid grouping are checked.
    """
    groupings = enumerate_valid_groupings(c)
    if c.n > MAX_PERMUTATION_ORACLE:
        sizes = {
            g: sum(permutation_satisfies_constraint(p, c) for p in _permutations_with_grouping(g))
            for g in groupings
        }
        return EnumerationReport(c, sum(sizes.values()), len(groupings), sizes, "per-grouping")
    perms = enumerate_valid_permutations(c)
    fibers = Counter(grouping_of_permutation(p) for p in perms)
    known = set(groupings)
    # groupings reached by no valid permutation count as empty fibers
    sizes = {g: fibers.get(g, 0) for g in groupings}
    for g, count in fibers.items():
        if g not in known:
            sizes[g] = count
    return EnumerationReport(c, len(perms), len(groupings), sizes)


def card_count(c: Constraint) -> int:
    """Number cards the protocol lays out: ``2 (k - 1) n`` for largest group size ``k``."""
    _require_valid(c)
    k = c.max_group_size
    return 2 * (k - 1) * c.n if k > 1 else 0


# -- Monte Carlo -----------------------------------------------------------


def trial_seed(seed: int, t: int) -> np.random.SeedSequence:
    """Seed of trial ``t``; the same child ``SeedSequence(seed).spawn`` would give."""
    return np.random.SeedSequence(seed, spawn_key=(t,))


def _digest(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def _grouping_chunk(c, seed, start, stop, source_factory):
    out = []
    for t in range(start, stop):
        source = source_factory(t) if source_factory else SeededSource(trial_seed(seed, t))
        run = run_secure_grouping(c, source=source)
        out.append((run.grouping, {i: v.picked for i, v in run.views.items()}, _digest(run.transcript.serialize())))
    return out


def simulate(c: Constraint, trials: int, seed: int = 0, workers: int = 1, source_factory=None) -> list:
    """Run the protocol ``trials`` times.

    Returns ``(grouping, picked values per player, transcript digest)`` per
    trial in trial order.  ``source_factory(t)`` replaces the seeded source
    of trial ``t``, e.g. to inject a biased generator.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if workers <= 1 or trials < 2 * workers:
        return _grouping_chunk(c, seed, 0, trials, source_factory)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_grouping_chunk, c, seed, int(a), int(b), source_factory)
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        out = []
        for f in futures:
            out.extend(f.result())
    return out


def uniformity_test(samples, c: Constraint, significance: float = 0.001) -> ChiSquareResult:
    """Goodness of fit of sampled groupings against uniform over the oracle's groupings."""
    cells = enumerate_valid_groupings(c)
    samples = list(samples)
    if len(cells) * MIN_EXPECTED_PER_GROUPING > len(samples):
        raise InsufficientSamples(
            f"{len(samples)} samples over {len(cells)} groupings; need {MIN_EXPECTED_PER_GROUPING} per grouping"
        )
    counts = Counter(samples)
    stray = sum(v for g, v in counts.items() if g not in set(cells))
    if len(cells) == 1:
        return ChiSquareResult(1, 0.0, 0, significance, 0.0, stray == 0, "uniformity", len(samples),
                               f"{stray} samples outside the oracle" if stray else "single valid grouping")
    res = goodness_of_fit([counts.get(g, 0) for g in cells], significance=significance,
                          min_expected=MIN_EXPECTED_PER_GROUPING, name="uniformity")
    if stray:
        return ChiSquareResult(res.cells, res.statistic, res.dof, significance, res.critical, False,
                               res.name, len(samples), f"{stray} samples outside the oracle")
    return res


def completions(c: Constraint, observer: int) -> dict:
    """For each group the observer can land in, the sorted keys of the other groups."""
    out: dict = {}
    for g in enumerate_valid_groupings(c):
        out.setdefault(g.group_of(observer), []).append(g.remainder_key(observer))
    return {k: sorted(v) for k, v in out.items()}


def transcript_independence_test(
    c: Constraint,
    trials: int,
    observer: int = 1,
    seed: int = 0,
    significance: float = 0.001,
    buckets: int = 6,
    workers: int = 1,
    source_factory=None,
    outcomes=None,
) -> ChiSquareResult:
    """Test that the rest of the grouping is uniform given what ``observer`` sees.

    The observer's information is taken to be the picked cards (which
    determine the observer's whole cycle, not just the group) together
    with the full public transcript, hashed into ``buckets`` classes.
    Within every (picked cards, bucket) class, the arrangement of the
    remaining indices must be uniform over its possibilities.
    """
    if trials < 2:
        raise InsufficientSamples("need at least two trials")
    options = completions(c, observer)
    if outcomes is None:
        outcomes = simulate(c, trials, seed, workers, source_factory)
    table: dict = {}
    stray = 0
    for grouping, picked, digest in outcomes:
        mine = frozenset((observer, *picked[observer]))
        rest = grouping.remainder_key(observer)
        choices = options.get(mine)
        if choices is None or rest not in choices or grouping.group_of(observer) != mine:
            stray += 1
            continue
        row = table.setdefault((picked[observer], digest % buckets), [0] * len(choices))
        row[choices.index(rest)] += 1
    res = conditional_uniformity(list(table.values()), significance, name="transcript-independence")
    note = f"observer={observer} rows={len(table)} buckets={buckets}"
    if stray:
        note += f" stray={stray}"
    return ChiSquareResult(res.cells, res.statistic, res.dof, significance, res.critical,
                           res.passed and not stray, res.name, len(outcomes), note)


def partner_uniformity(c: Constraint, outcomes, observer: int = 1, significance: float = 0.001) -> ChiSquareResult:
    """Given only the observer's own group, the rest of the grouping is uniform."""
    options = completions(c, observer)
    rows: dict = {}
    for grouping, _, _ in outcomes:
        mine = grouping.group_of(observer)
        rows.setdefault(mine, [0] * len(options[mine]))[options[mine].index(grouping.remainder_key(observer))] += 1
    return conditional_uniformity(list(rows.values()), significance, name="partner-conditional-uniformity")


def randomizing_view_test(tau: Permutation, trials: int, seed: int = 0, fixing=(), significance: float = 0.001):
    """Opened division rows of a one-input randomizing run: uniform, and independent of the output.

    Returns ``(uniformity, independence)``.
    """
    n = tau.degree
    spec = RandomizingSpec(n, [tau], frozenset(fixing))
    opened_counts: Counter = Counter()
    pairs: Counter = Counter()
    for t in range(trials):
        table = Table(source=SeededSource(trial_seed(seed, t)))
        (row,) = permutation_randomizing(table, spec)
        (rv,) = adversary_view(table.transcript)
        rho = permutation_of_sequence(table.row(row), secret_access=True)
        opened_counts[rv] += 1
        pairs[rv, rho] += 1
    perms = [Permutation._trusted(p) for p in itertools.permutations(range(1, n + 1))]
    uniform = goodness_of_fit([opened_counts.get(p, 0) for p in perms], significance=significance,
                              name="opened-uniformity")
    outputs = sorted({rho for _, rho in pairs})
    table = [[pairs.get((p, rho), 0) for rho in outputs] for p in perms]
    indep = independence(table, significance, name="opened-vs-output")
    return uniform, indep


def sigma_uniformity_test(n: int, fixing, trials: int, seed: int = 0, significance: float = 0.001) -> ChiSquareResult:
    """The hidden permutation of the randomizing protocol is uniform on the fixing subgroup."""
    fixing = frozenset(fixing)
    spec = RandomizingSpec(n, [identity(n)], fixing)
    counts: Counter = Counter()
    for t in range(trials):
        table = Table(source=SeededSource(trial_seed(seed, t)))
        permutation_randomizing(table, spec)
        counts[table.secret_log.latest("sigma").perm] += 1
    cells = [
        Permutation._trusted(p)
        for p in itertools.permutations(range(1, n + 1))
        if all(p[a - 1] == a for a in fixing)
    ]
    return goodness_of_fit([counts.get(p, 0) for p in cells], significance=significance, name="sigma-uniformity")


def division_outcomes(v: Permutation, w: Permutation) -> list:
    """Run the division protocol once for every possible hidden shuffle.

    Returns ``(r, opened r v, output)`` triples, one per element of S_n.
    """
    from .cards import sequence_of_permutation

    n = v.degree
    out = []
    for images in itertools.permutations(range(1, n + 1)):
        r = Permutation._trusted(images)
        table = Table(source=ScriptedSource([r]))
        rv_row, w_row = table.create_rows(
            [sequence_of_permutation(v), sequence_of_permutation(w)], public=False
        )
        permutation_division(table, rv_row, w_row)
        (opened,) = adversary_view(table.transcript)
        out.append((r, opened, permutation_of_sequence(table.row(w_row), secret_access=True)))
    return out

