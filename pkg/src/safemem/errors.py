"""Exception hierarchy shared by every safemem module."""


class SafememError(Exception):
    """Base class for all errors raised by safemem."""


class InputError(SafememError, ValueError):
    """Malformed or inconsistent input (unknown symbol, bad file, ...)."""


class EmptyObjectiveError(SafememError):
    """The objective is empty: the initial state already rejects."""


class NotWinningError(SafememError):
    """Eve has no winning strategy from the requested vertex."""


class MalformedStrategyError(SafememError):
    """A strategy lacks a move or update needed on a reachable configuration."""


class BudgetExceeded(SafememError):
    """A brute-force search was refused because the instance is too large."""
