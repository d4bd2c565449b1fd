"""Intervals and two-dimensional zones over ``(t, t')``.

A zone is the set of pairs with ``t`` in one interval, ``t'`` in another and
``t' - t`` in a third.  Bounds are exact numbers (``int`` or ``Fraction``);
infinite bounds use ``math.inf`` and are always open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from timedmatch.core.words import format_rational
from timedmatch.errors import InvalidInterval

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: object
    lo_closed: bool
    hi: object
    hi_closed: bool

    @staticmethod
    def make(lo, lo_closed: bool, hi, hi_closed: bool) -> "Interval":
        """Build an interval, collapsing every empty one to :data:`EMPTY`."""
        if lo == -INF:
            lo_closed = False
        if hi == INF:
            hi_closed = False
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return EMPTY
        return Interval(lo, lo_closed, hi, hi_closed)

    @staticmethod
    def closed_open(lo, hi) -> "Interval":
        if lo >= hi:
            raise InvalidInterval(f"[{lo}, {hi}) is empty")
        return Interval.make(lo, True, hi, False)

    @staticmethod
    def open_closed(lo, hi) -> "Interval":
        if lo >= hi:
            raise InvalidInterval(f"({lo}, {hi}] is empty")
        return Interval.make(lo, False, hi, True)

    @property
    def is_empty(self) -> bool:
        return self is EMPTY

    def __contains__(self, v) -> bool:
        if self is EMPTY:
            return False
        if v < self.lo or (v == self.lo and not self.lo_closed):
            return False
        return not (v > self.hi or (v == self.hi and not self.hi_closed))

    def __and__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return Interval.make(lo, lc, hi, hc)

    def __add__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        return Interval.make(self.lo + other.lo, self.lo_closed and other.lo_closed,
                             self.hi + other.hi, self.hi_closed and other.hi_closed)

    def __sub__(self, other: "Interval") -> "Interval":
        if self is EMPTY or other is EMPTY:
            return EMPTY
        return Interval.make(self.lo - other.hi, self.lo_closed and other.hi_closed,
                             self.hi - other.lo, self.hi_closed and other.lo_closed)

    def as_tuple(self) -> tuple:
        return (self.lo, self.lo_closed, self.hi, self.hi_closed)

    def scaled_down(self, scale: int) -> "Interval":
        """Divide both bounds by ``scale``, producing exact fractions."""
        if self is EMPTY:
            return EMPTY
        lo = self.lo if self.lo in (INF, -INF) else Fraction(self.lo, scale) if scale != 1 else Fraction(self.lo)
        hi = self.hi if self.hi in (INF, -INF) else Fraction(self.hi, scale) if scale != 1 else Fraction(self.hi)
        return Interval(lo, self.lo_closed, hi, self.hi_closed)

    def __str__(self) -> str:
        if self is EMPTY:
            return "∅"
        lo = "-inf" if self.lo == -INF else format_rational(Fraction(self.lo))
        hi = "inf" if self.hi == INF else format_rational(Fraction(self.hi))
        return f"{'[' if self.lo_closed else '('}{lo}, {hi}{']' if self.hi_closed else ')'}"


EMPTY = Interval(1, False, 0, False)
UNBOUNDED = Interval(-INF, False, INF, False)
POSITIVE = Interval(0, False, INF, False)
NONNEGATIVE = Interval(0, True, INF, False)


@dataclass(frozen=True)
class Zone:
    """Pairs ``(t, t')`` with ``t`` in ``start``, ``t'`` in ``end`` and ``t' - t`` in ``gap``."""

    start: Interval
    end: Interval
    gap: Interval

    @property
    def is_empty(self) -> bool:
        return self.start is EMPTY or self.end is EMPTY or self.gap is EMPTY

    def __contains__(self, pair) -> bool:
        t, tp = pair
        return t in self.start and tp in self.end and (tp - t) in self.gap

    def normalize(self) -> "Zone":
        """Tighten every interval against the other two until nothing moves.

        >>> z = Zone(Interval(0, True, 10, True), Interval(0, True, 1, True), Interval(5, True, 6, True))
        >>> z.normalize().is_empty
        True
        """
        s, e, g = self.start, self.end, self.gap
        for _ in range(4):
            s2 = s & (e - g)
            e2 = e & (s2 + g)
            g2 = g & (e2 - s2)
            if EMPTY in (s2, e2, g2):
                return EMPTY_ZONE
            if (s2, e2, g2) == (s, e, g):
                break
            s, e, g = s2, e2, g2
        return Zone(s, e, g)

    def __and__(self, other: "Zone") -> "Zone":
        return Zone(self.start & other.start, self.end & other.end, self.gap & other.gap)

    def scaled_down(self, scale: int) -> "Zone":
        if self.is_empty:
            return EMPTY_ZONE
        return Zone(self.start.scaled_down(scale), self.end.scaled_down(scale),
                    self.gap.scaled_down(scale))

    def sort_key(self) -> tuple:
        return self.start.as_tuple() + self.end.as_tuple() + self.gap.as_tuple()

    def __str__(self) -> str:
        return f"<t∈{self.start}, t'∈{self.end}, t'-t∈{self.gap}>"


EMPTY_ZONE = Zone(EMPTY, EMPTY, EMPTY)


def zone_contains(z: Zone, t, tp) -> bool:
    return (t, tp) in z


def zone_normalize(z: Zone) -> Zone:
    return z.normalize()


def _half_spaces(iv: Interval) -> Iterator[tuple[Interval, Interval]]:
    """Yield ``(kept, complement)`` half-lines for each finite bound of ``iv``."""
    if iv.lo != -INF:
        yield (Interval.make(iv.lo, iv.lo_closed, INF, False),
               Interval.make(-INF, False, iv.lo, not iv.lo_closed))
    if iv.hi != INF:
        yield (Interval.make(-INF, False, iv.hi, iv.hi_closed),
               Interval.make(iv.hi, not iv.hi_closed, INF, False))


def zone_difference(z: Zone, w: Zone) -> list[Zone]:
    """Exact ``z \\ w`` as a list of pairwise disjoint normalized zones."""
    z = z.normalize()
    if z.is_empty:
        return []
    if (z & w).normalize().is_empty:
        return [z]
    pieces: list[Zone] = []
    current = z
    for dim in range(3):
        for kept, comp in _half_spaces((w.start, w.end, w.gap)[dim]):
            parts = [current.start, current.end, current.gap]
            parts[dim] = parts[dim] & comp
            piece = Zone(*parts).normalize()
            if not piece.is_empty:
                pieces.append(piece)
            parts = [current.start, current.end, current.gap]
            parts[dim] = parts[dim] & kept
            current = Zone(*parts).normalize()
            if current.is_empty:
                return pieces
    return pieces


def zone_covered(z: Zone, cover: Sequence[Zone]) -> bool:
    """True when the union of ``cover`` contains every point of ``z``."""
    remaining = [z.normalize()]
    remaining = [r for r in remaining if not r.is_empty]
    for w in cover:
        if not remaining:
            return True
        nxt: list[Zone] = []
        for r in remaining:
            nxt.extend(zone_difference(r, w))
        remaining = nxt
    return not remaining


def zone_set_covers(zones: Sequence[Zone], t, tp) -> bool:
    return any((t, tp) in z for z in zones)


def _scaled(v, scale: int):
    if v == INF or v == -INF:
        return v
    return Fraction(v, scale)


class MatchSet:
    """A finite union of normalized, non-empty, deduplicated zones.

    Matchers hand over zones as integer tuples on a ``1/scale`` grid;
    the ``Fraction`` form is built on first access.
    """

    __slots__ = ("_zones", "_raw", "_scale")

    def __init__(self, zones: Iterable[Zone] = ()):
        uniq = {z.normalize() for z in zones}
        uniq.discard(EMPTY_ZONE)
        self._zones: tuple[Zone, ...] | None = tuple(sorted(uniq, key=Zone.sort_key))
        self._raw = None
        self._scale = 1

    @classmethod
    def from_normalized(cls, zones: Iterable[Zone]) -> "MatchSet":
        """Skip re-normalization for zones that are already tight."""
        out = cls.__new__(cls)
        uniq = set(zones)
        uniq.discard(EMPTY_ZONE)
        out._zones = tuple(sorted(uniq, key=Zone.sort_key))
        out._raw = None
        out._scale = 1
        return out

    @classmethod
    def from_grid(cls, raw: Iterable[tuple], scale: int) -> "MatchSet":
        """Wrap normalized ``((lo, lc, hi, hc),) * 3`` tuples measured in ``1/scale`` units."""
        out = cls.__new__(cls)
        out._raw = tuple(sorted(set(raw)))
        out._scale = scale
        out._zones = None
        return out

    @property
    def zones(self) -> tuple[Zone, ...]:
        if self._zones is None:
            sc = self._scale
            self._zones = tuple(
                Zone(*(Interval(_scaled(lo, sc), lc, _scaled(hi, sc), hc) for lo, lc, hi, hc in built))
                for built in self._raw)
        return self._zones

    def __len__(self) -> int:
        return len(self._raw) if self._zones is None else len(self._zones)

    def __iter__(self):
        return iter(self.zones)

    def __contains__(self, pair) -> bool:
        return any(pair in z for z in self.zones)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatchSet):
            return NotImplemented
        if self._raw is not None and other._raw is not None and self._scale == other._scale:
            return self._raw == other._raw
        return self.zones == other.zones

    def __hash__(self) -> int:
        return hash(self.zones)

    def __repr__(self) -> str:
        return "MatchSet{" + ", ".join(map(str, self.zones)) + "}"

    def subsumed_by(self, other: "MatchSet") -> bool:
        theirs = set(other.zones)
        return all(z in theirs or zone_covered(z, other.zones) for z in self.zones)

    def equivalent(self, other: "MatchSet") -> bool:
        """Point-set equality, independent of how each side splits into zones."""
        if self == other:
            return True
        return self.subsumed_by(other) and other.subsumed_by(self)
