"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class TimedMatchError(Exception):
    """Base class for all errors raised by :mod:`timedmatch`."""


class NonIncreasingTimestamps(TimedMatchError):
    """Timestamps of a word are not strictly increasing."""

    def __init__(self, index: int):
        super().__init__(f"timestamp at position {index} does not exceed its predecessor")
        self.index = index


class NonPositiveFirstStamp(TimedMatchError):
    """The first timestamp of a word is zero or negative."""


class ReservedLabel(TimedMatchError):
    """The terminal label ``$`` appeared where an input label was expected."""


class ShiftUnderflow(TimedMatchError):
    """Shifting a word would move a timestamp to zero or below."""


class OverlapError(TimedMatchError):
    """Absorbing concatenation of two words whose stamps overlap."""


class InvalidInterval(TimedMatchError):
    """An interval or segment request with ``lo >= hi``."""


class UnknownLabel(TimedMatchError):
    """A word carries a label outside the automaton's alphabet."""


class InvalidAutomaton(TimedMatchError):
    """The automaton is malformed or breaks the terminal-label discipline."""


class PreconditionViolation(TimedMatchError):
    """Arguments violate a documented precondition."""


class PreprocessResourceExceeded(TimedMatchError):
    """Region-state budget exhausted during preprocessing."""

    def __init__(self, cap: int):
        super().__init__(f"region-state budget of {cap} exhausted")
        self.cap = cap


StateLimitExceeded = PreprocessResourceExceeded


class NoAcceptedWord(TimedMatchError):
    """The automaton accepts no word at all."""


class EmptyConf(TimedMatchError):
    """A skip value was requested for an empty configuration set."""


class OutOfOrderEvent(TimedMatchError):
    """An online matcher received a stamp not larger than the previous one."""


class InvalidParams(TimedMatchError):
    """Generator parameters are out of range."""


class ParseError(TimedMatchError):
    """An input file could not be parsed."""
