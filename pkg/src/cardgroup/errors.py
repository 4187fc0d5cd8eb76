"""Exception types raised by the engine."""


class CardGroupError(Exception):
    pass


class DegreeMismatch(CardGroupError, ValueError):
    pass


class NotAPermutation(CardGroupError, ValueError):
    pass


class HiddenCard(CardGroupError):
    """A face-down card was read without secret access."""


class RowLengthMismatch(CardGroupError, ValueError):
    pass


class WouldLeak(CardGroupError):
    """An action would expose or scramble face-up cards."""


class ReplayDiverged(CardGroupError):
    pass


class BadFixingSet(CardGroupError, ValueError):
    pass


class BadConstraint(CardGroupError, ValueError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class TooLargeForOracle(CardGroupError, ValueError):
    pass


class InsufficientSamples(CardGroupError, ValueError):
    pass
