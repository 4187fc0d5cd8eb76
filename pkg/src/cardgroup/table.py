"""The protocol table.

A :class:`Table` holds rows of cards and executes the public actions of a
card protocol: creating rows, turning cards face down, Pile-Scramble
Shuffles, opening rows, public rearrangements and dealing.  Every action
appends one event to the public :class:`Transcript`.  Hidden randomness
goes to the :class:`SecretLog`, which is never part of the transcript.

Rows are numbered from 1 and never renumbered; consumed rows are marked
dead instead of being removed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cards import DOWN, UP, Card, CardSequence, apply_permutation
from .errors import ReplayDiverged, RowLengthMismatch, WouldLeak
from .perm import Permutation, identity, parse_permutation


# -- randomness ------------------------------------------------------------


class SeededSource:
    """Deterministic, splittable source of uniformly random permutations.

    Draws use the swap-based (Fisher-Yates) shuffle on top of numpy's PCG64
    generator.  ``spawn`` derives independent child sources, which is how
    Monte-Carlo trials get their own streams.
    """

    def __init__(self, seed=None):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(seed)
        self._rng = np.random.Generator(np.random.PCG64(self._seq))

    def draw(self, m: int) -> Permutation:
        arr = list(range(1, m + 1))
        integers = self._rng.integers
        for i in range(m - 1, 0, -1):
            j = int(integers(0, i + 1))
            arr[i], arr[j] = arr[j], arr[i]
        return Permutation._trusted(tuple(arr))

    def spawn(self, count: int) -> list:
        return [SeededSource(child) for child in self._seq.spawn(count)]


class ScriptedSource:
    """Yields predetermined permutations, then defers to ``fallback``.

    Used to reproduce worked examples with a chosen hidden permutation and
    to enumerate every possible shuffle outcome in exhaustive tests.
    """

    def __init__(self, perms: Iterable[Permutation], fallback=None):
        self._queue = list(perms)
        self._pos = 0
        self.fallback = fallback

    @property
    def remaining(self) -> int:
        return len(self._queue) - self._pos

    def draw(self, m: int) -> Permutation:
        if self._pos < len(self._queue):
            perm = self._queue[self._pos]
            self._pos += 1
            if perm.degree != m:
                raise ReplayDiverged(f"scripted permutation has degree {perm.degree}, shuffle needs {m}")
            return perm
        if self.fallback is None:
            raise ReplayDiverged("scripted source exhausted")
        return self.fallback.draw(m)


class ConstantSource:
    """Always draws the identity.  A deliberately broken source for tests."""

    def draw(self, m: int) -> Permutation:
        return identity(m)


# -- transcript events -----------------------------------------------------


def _ints(xs) -> str:
    return ",".join(str(x) for x in xs)


def _parse_ints(s: str) -> tuple:
    return tuple(int(t) for t in s.split(",") if t)


@dataclass(frozen=True)
class RowsCreated:
    rows: tuple
    length: int
    fronts: tuple | None = None  # one tuple of values per row, or None when hidden

    def serialize(self) -> str:
        if self.fronts is None:
            return f"CREATE rows={_ints(self.rows)} length={self.length} hidden"
        if len(set(self.fronts)) == 1:
            shown = _ints(self.fronts[0])
        else:
            shown = "|".join(_ints(f) for f in self.fronts)
        return f"CREATE rows={_ints(self.rows)} fronts={shown}"


@dataclass(frozen=True)
class FacedDown:
    rows: tuple
    cols: tuple

    def serialize(self) -> str:
        return f"FLIP rows={_ints(self.rows)} cols={_ints(self.cols)} facing=down"


@dataclass(frozen=True)
class ShuffleApplied:
    rows: tuple
    cols: tuple

    def serialize(self) -> str:
        return f"SHUFFLE rows={_ints(self.rows)} cols={_ints(self.cols)}"


@dataclass(frozen=True)
class Opened:
    row: int
    values: tuple

    def serialize(self) -> str:
        return f"OPEN row={self.row} values={_ints(self.values)}"


@dataclass(frozen=True)
class Rearranged:
    rows: tuple
    perm: Permutation

    def serialize(self) -> str:
        return f"REARRANGE rows={_ints(self.rows)} perm={self.perm.oneline()}"


@dataclass(frozen=True)
class Discarded:
    rows: tuple

    def serialize(self) -> str:
        return f"DISCARD rows={_ints(self.rows)}"


@dataclass(frozen=True)
class Dealt:
    """Player ``i`` privately takes the card at column ``i`` of each row."""

    rows: tuple

    def serialize(self) -> str:
        return f"DEAL rows={_ints(self.rows)}"


def _fields(parts: Sequence[str]) -> dict:
    out = {}
    for p in parts:
        key, sep, val = p.partition("=")
        out[key] = val if sep else True
    return out


def parse_event(line: str):
    parts = line.split()
    if not parts:
        raise ValueError("empty event line")
    kind, f = parts[0], _fields(parts[1:])
    try:
        if kind == "CREATE":
            rows = _parse_ints(f["rows"])
            if "hidden" in f:
                return RowsCreated(rows, int(f["length"]))
            chunks = f["fronts"].split("|")
            fronts = tuple(_parse_ints(c) for c in chunks)
            if len(fronts) == 1:
                fronts = fronts * len(rows)
            return RowsCreated(rows, len(fronts[0]), fronts)
        if kind == "FLIP":
            return FacedDown(_parse_ints(f["rows"]), _parse_ints(f["cols"]))
        if kind == "SHUFFLE":
            return ShuffleApplied(_parse_ints(f["rows"]), _parse_ints(f["cols"]))
        if kind == "OPEN":
            return Opened(int(f["row"]), _parse_ints(f["values"]))
        if kind == "REARRANGE":
            return Rearranged(_parse_ints(f["rows"]), parse_permutation(f["perm"]))
        if kind == "DISCARD":
            return Discarded(_parse_ints(f["rows"]))
        if kind == "DEAL":
            return Dealt(_parse_ints(f["rows"]))
    except KeyError as exc:
        raise ValueError(f"event {line!r} lacks field {exc}") from None
    raise ValueError(f"unknown event kind {kind!r}")


@dataclass
class Transcript:
    """Everything publicly observable during a run, in order."""

    events: list = field(default_factory=list)

    def append(self, event):
        self.events.append(event)

    def serialize(self) -> str:
        return "".join(e.serialize() + "\n" for e in self.events)

    @classmethod
    def parse(cls, text: str) -> Transcript:
        events = [parse_event(line) for line in text.splitlines() if line.strip()]
        return cls(events)

    def of_kind(self, kind) -> list:
        return [e for e in self.events if isinstance(e, kind)]

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


@dataclass(frozen=True)
class SecretEntry:
    kind: str  # "shuffle" for a drawn r, "sigma" for a derived hidden permutation
    perm: Permutation
    rows: tuple = ()
    cols: tuple = ()

    def serialize(self) -> str:
        if self.kind == "shuffle":
            return f"SECRET shuffle rows={_ints(self.rows)} cols={_ints(self.cols)} perm={self.perm.oneline()}"
        return f"SECRET {self.kind} perm={self.perm.oneline()}"


@dataclass
class SecretLog:
    """Hidden randomness of a run.  Test and analysis code only."""

    entries: list = field(default_factory=list)

    def append(self, entry: SecretEntry):
        self.entries.append(entry)

    def shuffles(self) -> list:
        return [e for e in self.entries if e.kind == "shuffle"]

    def latest(self, kind: str) -> SecretEntry:
        for e in reversed(self.entries):
            if e.kind == kind:
                return e
        raise KeyError(kind)

    def serialize(self) -> str:
        return "".join(e.serialize() + "\n" for e in self.entries)

    @classmethod
    def parse(cls, text: str) -> SecretLog:
        entries = []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] != "SECRET" or len(parts) < 3:
                raise ValueError(f"bad secret log line {line!r}")
            f = _fields(parts[2:])
            entries.append(
                SecretEntry(
                    parts[1],
                    parse_permutation(f["perm"]),
                    _parse_ints(f.get("rows", "")),
                    _parse_ints(f.get("cols", "")),
                )
            )
        return cls(entries)

    def __len__(self):
        return len(self.entries)


# -- the table -------------------------------------------------------------


class Table:
    def __init__(self, source=None, seed=None):
        if source is None:
            source = SeededSource(seed)
        self.source = source
        self.rows: list = []
        self.dead: set = set()
        self.transcript = Transcript()
        self.secret_log = SecretLog()
        self.cards_used = 0

    # access

    def row(self, index: int) -> CardSequence:
        if not 1 <= index <= len(self.rows):
            raise IndexError(f"no row {index}")
        return self.rows[index - 1]

    def live_rows(self) -> list:
        return [i for i in range(1, len(self.rows) + 1) if i not in self.dead]

    def state(self) -> tuple:
        return (
            tuple(self.rows),
            frozenset(self.dead),
            self.transcript.serialize(),
            self.secret_log.serialize(),
        )

    def _check_live(self, rows):
        for r in rows:
            self.row(r)
            if r in self.dead:
                raise ValueError(f"row {r} has been consumed")

    def _set(self, index: int, seq: CardSequence):
        self.rows[index - 1] = seq

    def _record(self, event):
        self.transcript.append(event)

    # actions

    def create_rows(self, sequences: Sequence[CardSequence], public: bool = True) -> list:
        """Lay out new rows.  Public rows must be face up; hidden rows face down."""
        sequences = list(sequences)
        if not sequences:
            raise ValueError("no rows to create")
        length = sequences[0].degree
        if any(s.degree != length for s in sequences):
            raise RowLengthMismatch("rows created together must have equal length")
        for s in sequences:
            if public and not s.is_open():
                raise ValueError("public rows are laid out face up")
            if not public and not s.is_committed():
                raise WouldLeak("hidden rows must be laid out face down")
        start = len(self.rows) + 1
        self.rows.extend(sequences)
        indices = tuple(range(start, start + len(sequences)))
        self.cards_used += length * len(sequences)
        fronts = tuple(s.values for s in sequences) if public else None
        self._record(RowsCreated(indices, length, fronts))
        return list(indices)

    def face_down(self, rows: Sequence[int], cols: Sequence[int] | None = None):
        rows = tuple(rows)
        self._check_live(rows)
        for r in rows:
            seq = self.row(r)
            targets = tuple(range(1, seq.degree + 1)) if cols is None else tuple(cols)
            cards = list(seq.cards)
            for c in targets:
                cards[c - 1] = cards[c - 1].flipped(DOWN)
            self._set(r, CardSequence(cards))
        if cols is None:
            cols = range(1, self.row(rows[0]).degree + 1)
        self._record(FacedDown(rows, tuple(cols)))

    def pile_scramble(self, rows: Sequence[int]):
        """Apply one hidden uniformly random permutation to all given rows."""
        rows = tuple(rows)
        self._check_live(rows)
        length = self.row(rows[0]).degree
        self.pile_scramble_columns(rows, range(1, length + 1))

    def pile_scramble_columns(self, rows: Sequence[int], cols: Sequence[int]):
        """Scramble the given columns of the given rows by one hidden permutation.

        The column in ``cols[i]`` moves to ``cols[r(i+1) - 1]`` where ``r`` is
        drawn from the table's source.  Other columns stay put.
        """
        rows, cols = tuple(rows), tuple(cols)
        self._check_live(rows)
        if not rows or not cols:
            raise ValueError("nothing to shuffle")
        lengths = {self.row(r).degree for r in rows}
        if len(lengths) != 1:
            raise RowLengthMismatch(f"rows {rows} have lengths {sorted(lengths)}")
        (length,) = lengths
        if len(set(cols)) != len(cols) or not all(1 <= c <= length for c in cols):
            raise ValueError(f"bad column selection {cols}")
        for r in rows:
            seq = self.row(r)
            if any(seq[c].facing is UP for c in cols):
                raise WouldLeak(f"row {r} has face-up cards in the shuffled columns")
        perm = self.source.draw(len(cols))
        self._apply_scramble(rows, cols, perm)
        self.secret_log.append(SecretEntry("shuffle", perm, rows, cols))
        self._record(ShuffleApplied(rows, cols))

    def _apply_scramble(self, rows, cols, perm: Permutation):
        for r in rows:
            old = self.row(r).cards
            new = list(old)
            for i, c in enumerate(cols):
                new[cols[perm.images[i] - 1] - 1] = old[c - 1]
            self._set(r, CardSequence(new))

    def open_row(self, index: int) -> list:
        self._check_live((index,))
        seq = self.row(index)
        opened = CardSequence(Card(c.value, UP) for c in seq.cards)
        self._set(index, opened)
        values = opened.values
        self._record(Opened(index, values))
        return list(values)

    def rearrange_publicly(self, rows: Sequence[int], perm: Permutation):
        rows = tuple(rows)
        self._check_live(rows)
        for r in rows:
            self._set(r, apply_permutation(perm, self.row(r)))
        self._record(Rearranged(rows, perm))

    def discard(self, rows: Sequence[int]):
        rows = tuple(rows)
        self._check_live(rows)
        self.dead.update(rows)
        self._record(Discarded(rows))

    def deal(self, rows: Sequence[int]) -> dict:
        """Hand column ``i`` of every row to player ``i``.

        Returns ``{player: [value per row]}``; the values are private to
        each player and are not recorded in the transcript.
        """
        rows = tuple(rows)
        self._check_live(rows)
        length = self.row(rows[0]).degree
        if any(self.row(r).degree != length for r in rows):
            raise RowLengthMismatch("dealt rows must have equal length")
        hands = {i: [self.row(r)[i].value for r in rows] for i in range(1, length + 1)}
        self.dead.update(rows)
        self._record(Dealt(rows))
        return hands


# -- replay and auditing ---------------------------------------------------


def replay(transcript: Transcript, secret_log: SecretLog, inputs: Sequence[CardSequence] = ()) -> Table:
    """Rebuild a table by re-executing a transcript with its secret log.

    ``inputs`` supplies the contents of rows that were created hidden, in
    creation order.  Any disagreement raises :class:`ReplayDiverged`.
    """
    shuffles = iter(secret_log.shuffles())
    inputs = iter(inputs)
    table = Table(source=ScriptedSource([]))
    try:
        for event in transcript:
            if isinstance(event, RowsCreated):
                if event.fronts is None:
                    seqs = []
                    for _ in event.rows:
                        seq = next(inputs, None)
                        if seq is None:
                            raise ReplayDiverged("missing input for a hidden row")
                        seqs.append(seq)
                    got = table.create_rows(seqs, public=False)
                else:
                    got = table.create_rows([CardSequence.of_values(f, UP) for f in event.fronts])
                if tuple(got) != event.rows:
                    raise ReplayDiverged(f"row numbering diverged at {event.serialize()!r}")
            elif isinstance(event, FacedDown):
                table.face_down(event.rows, event.cols)
            elif isinstance(event, ShuffleApplied):
                entry = next(shuffles, None)
                if entry is None:
                    raise ReplayDiverged("secret log ran out of shuffles")
                if entry.rows != event.rows or entry.cols != event.cols:
                    raise ReplayDiverged(f"secret entry {entry.serialize()!r} does not match {event.serialize()!r}")
                table.source = ScriptedSource([entry.perm])
                table.pile_scramble_columns(event.rows, event.cols)
            elif isinstance(event, Opened):
                values = table.open_row(event.row)
                if tuple(values) != event.values:
                    raise ReplayDiverged(f"row {event.row} opened as {values}, transcript says {list(event.values)}")
            elif isinstance(event, Rearranged):
                table.rearrange_publicly(event.rows, event.perm)
            elif isinstance(event, Discarded):
                table.discard(event.rows)
            elif isinstance(event, Dealt):
                table.deal(event.rows)
            else:
                raise ReplayDiverged(f"unknown event {event!r}")
    except (IndexError, ValueError, WouldLeak) as exc:
        raise ReplayDiverged(str(exc)) from exc
    if next(shuffles, None) is not None:
        raise ReplayDiverged("secret log has unused shuffles")
    table.secret_log = SecretLog(list(secret_log.entries))
    return table


def audit_transcript(transcript: Transcript) -> list:
    """Check a transcript against a model of which cards are face up.

    Only facing is tracked, which is public.  Returns a list of problems:
    values shown for cards that are not face up, or shuffles over face-up
    cards.  An empty list means nothing hidden was serialized.
    """
    facing: dict = {}
    problems = []
    for n, event in enumerate(transcript, 1):
        if isinstance(event, RowsCreated):
            for r in event.rows:
                facing[r] = [UP if event.fronts is not None else DOWN] * event.length
        elif isinstance(event, FacedDown):
            for r in event.rows:
                for c in event.cols:
                    facing[r][c - 1] = DOWN
        elif isinstance(event, ShuffleApplied):
            for r in event.rows:
                if any(facing[r][c - 1] is UP for c in event.cols):
                    problems.append(f"event {n}: shuffle over face-up cards in row {r}")
        elif isinstance(event, Opened):
            if len(event.values) != len(facing[event.row]):
                problems.append(f"event {n}: opened value count differs from row length")
            facing[event.row] = [UP] * len(facing[event.row])
        elif isinstance(event, Rearranged):
            for r in event.rows:
                old = facing[r]
                new = [None] * len(old)
                for i, t in enumerate(event.perm.images):
                    new[t - 1] = old[i]
                facing[r] = new
        elif isinstance(event, Dealt):
            for r in event.rows:
                if any(f is UP for f in facing[r]):
                    problems.append(f"event {n}: dealt row {r} has face-up cards")
        text = event.serialize()
        if re.search(r"SECRET|sigma|secret", text):
            problems.append(f"event {n}: secret material in {text!r}")
    return problems
