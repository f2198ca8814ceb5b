"""Exception hierarchy shared by every module."""


class ApGameError(Exception):
    """Base class for all library errors."""


class ConfigError(ApGameError, ValueError):
    """Invalid game, sweep or solver configuration."""


class IllegalMove(ApGameError, ValueError):
    """A move that the rules of the game do not allow."""


class OccupiedCell(IllegalMove):
    pass


class OutOfRange(IllegalMove):
    pass


class WrongBatchSize(IllegalMove):
    pass


class NoLegalMove(ApGameError):
    """Raised by a strategy asked to move on a full board."""


class UnsupportedQuery(ApGameError, ValueError):
    """Pair-completion machinery requested for a family that has none."""


class DomainError(ApGameError, ValueError):
    """Closed-form bound evaluated outside its domain."""


class BoardTooLarge(ApGameError):
    pass


class SearchBudgetExceeded(ApGameError):
    pass


class NoCrossover(ApGameError):
    pass


class InsufficientData(ApGameError):
    pass


class NonMonotoneFrontier(ApGameError):
    pass
