"""Timed words over exact rational timestamps.

A word is stored on an integer grid: every stamp is ``tick / scale`` for a
common positive ``scale``.  The grid keeps the hot matching loops on plain
integers while every value stays exact.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from timedmatch.errors import (
    InvalidInterval,
    NonIncreasingTimestamps,
    NonPositiveFirstStamp,
    OverlapError,
    PreconditionViolation,
    ReservedLabel,
    ShiftUnderflow,
)

TERMINAL = "$"

RationalLike = Union[Fraction, int, str, float]


def as_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Floats go through their shortest decimal repr, so ``1.9`` becomes 19/10
    rather than the nearest binary fraction.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not timestamps")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite timestamp {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def common_scale(values: Iterable[Fraction]) -> int:
    scale = 1
    for v in values:
        d = v.denominator
        if scale % d:
            scale = scale * d // math.gcd(scale, d)
    return scale


@dataclass(frozen=True, eq=False)
class TimedWord:
    """A finite timed word: labels with strictly increasing positive stamps.

    Build words through :func:`validate_word` or :meth:`from_ticks`; the
    bare constructor trusts its arguments.
    """

    events: tuple[str, ...]
    ticks: tuple[int, ...]
    scale: int = 1

    @classmethod
    def from_ticks(cls, events: Sequence[str], ticks: Sequence[int], scale: int,
                   *, allow_terminal: bool = False) -> "TimedWord":
        """Validated construction from integer ticks on a ``1/scale`` grid."""
        if scale <= 0:
            raise PreconditionViolation("scale must be positive")
        events = tuple(events)
        ticks = tuple(int(t) for t in ticks)
        if len(events) != len(ticks):
            raise PreconditionViolation("events and stamps differ in length")
        _check_order(ticks)
        if not allow_terminal and TERMINAL in events:
            raise ReservedLabel("input words may not contain the terminal label")
        return cls(events, ticks, scale)

    @cached_property
    def stamps(self) -> tuple[Fraction, ...]:
        s = self.scale
        return tuple(Fraction(t, s) for t in self.ticks)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(zip(self.events, self.stamps))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimedWord):
            return NotImplemented
        if self.events != other.events:
            return False
        if self.scale == other.scale:
            return self.ticks == other.ticks
        return self.stamps == other.stamps

    def __hash__(self) -> int:
        return hash((self.events, self.stamps))

    def __repr__(self) -> str:
        body = ", ".join(f"({a}, {format_rational(t)})" for a, t in zip(self.events, self.stamps))
        return f"TimedWord[{body}]"

    @property
    def duration(self) -> Fraction:
        return self.stamps[-1] if self.ticks else Fraction(0)

    def rescaled(self, scale: int) -> tuple[int, ...]:
        """Ticks of this word on a finer grid; ``scale`` must be a multiple."""
        if scale % self.scale:
            raise PreconditionViolation("target scale is not a multiple of the word's scale")
        k = scale // self.scale
        return tuple(t * k for t in self.ticks)


def format_rational(q: Fraction) -> str:
    """Exact decimal text when the denominator allows it, ``p/q`` otherwise."""
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    sign = "-" if q < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")


def _check_order(ticks: Sequence[int]) -> None:
    if ticks and ticks[0] <= 0:
        raise NonPositiveFirstStamp("first timestamp must be positive")
    prev = 0
    for k, t in enumerate(ticks):
        if t <= prev and k:
            raise NonIncreasingTimestamps(k + 1)
        prev = t


def _from_rationals(events: Sequence[str], stamps: Sequence[Fraction],
                    allow_terminal: bool) -> TimedWord:
    scale = common_scale(stamps)
    ticks = [int(q * scale) for q in stamps]
    word = TimedWord.from_ticks(events, ticks, scale, allow_terminal=allow_terminal)
    word.__dict__["stamps"] = tuple(stamps)
    return word


def validate_word(events: Sequence[str], stamps: Sequence[RationalLike],
                  *, allow_terminal: bool = False) -> TimedWord:
    """Check and package a raw word.

    >>> validate_word(("a", "b"), ("2.0", "2.0"))
    Traceback (most recent call last):
    ...
    timedmatch.errors.NonIncreasingTimestamps: timestamp at position 2 does not exceed its predecessor
    """
    return _from_rationals(tuple(events), [as_rational(s) for s in stamps], allow_terminal)


def empty_word() -> TimedWord:
    return TimedWord((), (), 1)


def shift(w: TimedWord, delta: RationalLike) -> TimedWord:
    """Add ``delta`` to every stamp; fails if a stamp would become non-positive."""
    d = as_rational(delta)
    if w.ticks and w.stamps[0] + d <= 0:
        raise ShiftUnderflow(f"shifting by {d} moves the first stamp to {w.stamps[0] + d}")
    return _from_rationals(w.events, [t + d for t in w.stamps], TERMINAL in w.events)


def concat_absorbing(w1: TimedWord, w2: TimedWord) -> TimedWord:
    """Juxtapose two words whose stamps are already in order."""
    if w1.ticks and w2.ticks and w1.stamps[-1] >= w2.stamps[0]:
        raise OverlapError("second word must start strictly after the first ends")
    events = w1.events + w2.events
    return _from_rationals(events, list(w1.stamps + w2.stamps), TERMINAL in events)


def concat_nonabsorbing(w1: TimedWord, w2: TimedWord) -> TimedWord:
    """Append ``w2`` with its clock restarted at the end of ``w1``."""
    if not w2.ticks:
        return w1
    return concat_absorbing(w1, shift(w2, w1.duration))


def segment(w: TimedWord, t: RationalLike, t_end: RationalLike) -> TimedWord:
    """The events strictly inside ``(t, t_end)``, re-timed from ``t``, plus ``$`` at ``t_end``.

    >>> w = validate_word("abc", ("0.7", "1.2", "1.5"))
    >>> segment(w, "1.2", "1.5").events
    ('$',)
    """
    lo, hi = as_rational(t), as_rational(t_end)
    if lo >= hi:
        raise InvalidInterval(f"segment needs t < t' (got {lo}, {hi})")
    if lo < 0:
        raise PreconditionViolation("segment start must be non-negative")
    stamps = w.stamps
    first = bisect.bisect_right(stamps, lo)
    last = bisect.bisect_left(stamps, hi)
    events = w.events[first:last] + (TERMINAL,)
    times = [s - lo for s in stamps[first:last]] + [hi - lo]
    return _from_rationals(events, times, True)
