"""Number cards, card sequences and the permutation <-> sequence encoding.

Positions are 1-based.  The card sequence for ``sigma`` shows
``sigma^-1(i)`` at position ``i``; equivalently card ``k`` sits at
position ``sigma(k)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import DegreeMismatch, HiddenCard, NotAPermutation
from .perm import Permutation, inverse


class Facing(enum.Enum):
    UP = "up"
    DOWN = "down"


UP = Facing.UP
DOWN = Facing.DOWN


@dataclass(frozen=True)
class Card:
    value: int
    facing: Facing = DOWN

    def flipped(self, facing: Facing) -> Card:
        return Card(self.value, facing)

    def __str__(self):
        return str(self.value) if self.facing is UP else "?"


class CardSequence:
    """An immutable row of cards."""

    __slots__ = ("cards",)

    def __init__(self, cards: Iterable[Card]):
        self.cards = tuple(cards)
        if not self.cards:
            raise ValueError("a card sequence needs at least one card")

    @classmethod
    def of_values(cls, values: Iterable[int], facing: Facing = DOWN) -> CardSequence:
        return cls(Card(int(v), facing) for v in values)

    @property
    def degree(self) -> int:
        return len(self.cards)

    @property
    def values(self) -> tuple:
        """Card fronts regardless of facing.  For engine and test code only."""
        return tuple(c.value for c in self.cards)

    @property
    def facings(self) -> tuple:
        return tuple(c.facing for c in self.cards)

    def is_committed(self) -> bool:
        return all(c.facing is DOWN for c in self.cards)

    def is_open(self) -> bool:
        return all(c.facing is UP for c in self.cards)

    def represents_permutation(self) -> bool:
        return sorted(self.values) == list(range(1, self.degree + 1))

    def __getitem__(self, position: int) -> Card:
        if not 1 <= position <= len(self.cards):
            raise IndexError(f"position {position} outside 1..{len(self.cards)}")
        return self.cards[position - 1]

    def __len__(self):
        return len(self.cards)

    def __iter__(self):
        return iter(self.cards)

    def __eq__(self, other):
        if not isinstance(other, CardSequence):
            return NotImplemented
        return self.cards == other.cards

    def __hash__(self):
        return hash(self.cards)

    def render(self) -> str:
        return " ".join(str(c) for c in self.cards)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"CardSequence({self.render()!r})"


def sequence_of_permutation(sigma: Permutation, facing: Facing = DOWN) -> CardSequence:
    inv = inverse(sigma).images
    return CardSequence(Card(v, facing) for v in inv)


def permutation_of_sequence(x: CardSequence, secret_access: bool = False) -> Permutation:
    """Decode the permutation a row represents.

    Face-down cards may only be read with ``secret_access=True``.
    """
    if not secret_access and not x.is_open():
        raise HiddenCard("row holds face-down cards")
    if not x.represents_permutation():
        raise NotAPermutation(f"fronts {list(x.values)} are not a permutation of 1..{x.degree}")
    # position i shows sigma^-1(i)
    return inverse(Permutation._trusted(x.values))


def apply_permutation(sigma: Permutation, x: CardSequence) -> CardSequence:
    """Move the card at position ``i`` to position ``sigma(i)``."""
    if sigma.degree != x.degree:
        raise DegreeMismatch(f"permutation degree {sigma.degree} vs row length {x.degree}")
    out = [None] * x.degree
    for i, target in enumerate(sigma.images):
        out[target - 1] = x.cards[i]
    return CardSequence(out)


def flip_all(x: CardSequence, facing: Facing) -> CardSequence:
    return CardSequence(c.flipped(facing) for c in x.cards)
