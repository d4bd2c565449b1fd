"""Randomized agreement checks between zone sets and direct simulation.

Samples live on an integer grid four times finer than the word's own grid,
so ``stamp ± 1`` grid step is a point strictly between a stamp and its
neighbours on the word's grid.  That is what reaches the open/closed
boundaries of zones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from timedmatch.core.automaton import TimedAutomaton, simulate
from timedmatch.core.words import TimedWord, segment
from timedmatch.core.zones import INF, Zone

_BIG = np.int64(2**62)


def sample_unit(word: TimedWord, zones: Sequence[Zone] = ()) -> int:
    """Grid denominator fine enough for ``stamp ± eps`` and every zone bound."""
    unit = 4 * word.scale
    for z in zones:
        for iv in (z.start, z.end, z.gap):
            for v in (iv.lo, iv.hi):
                if v not in (INF, -INF):
                    unit = math.lcm(unit, 4 * Fraction(v).denominator)
    return unit


def _on_grid(v, unit: int) -> int:
    if v == INF:
        return int(_BIG)
    if v == -INF:
        return -int(_BIG)
    q = Fraction(v) * unit
    if q.denominator != 1:
        raise ValueError(f"bound {v} is not on the 1/{unit} grid")
    return q.numerator


def _interval_mask(values: np.ndarray, lo: int, lc: bool, hi: int, hc: bool) -> np.ndarray:
    low = values >= lo if lc else values > lo
    high = values <= hi if hc else values < hi
    return low & high


def covers_many(zones: Sequence[Zone], ts: np.ndarray, tps: np.ndarray, unit: int) -> np.ndarray:
    """Vectorized ``zone_set_covers`` for pairs given in ``1/unit`` grid units."""
    hit = np.zeros(len(ts), dtype=bool)
    gaps = tps - ts
    for z in zones:
        if z.is_empty:
            continue
        m = ~hit
        for iv, vals in ((z.start, ts), (z.end, tps), (z.gap, gaps)):
            m &= _interval_mask(vals, _on_grid(iv.lo, unit), iv.lo_closed,
                                _on_grid(iv.hi, unit), iv.hi_closed)
        hit |= m
    return hit


def _zone_boxes(zones: Sequence[Zone], unit: int, horizon: int) -> np.ndarray:
    """Rows ``(t_lo, t_hi, end_lo, end_hi, gap_lo, gap_hi)`` with infinities clipped."""
    rows = []
    for z in zones:
        if z.is_empty:
            continue
        row = []
        for iv in (z.start, z.end, z.gap):
            row.append(max(_on_grid(iv.lo, unit), -horizon))
            row.append(min(_on_grid(iv.hi, unit), horizon))
        rows.append(row)
    return np.asarray(rows, dtype=np.int64).reshape(-1, 6)


def _near_range(rng, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """A bound of ``[lo, hi]``, a bound nudged by one step, or a point between."""
    k = len(lo)
    inner = lo + (rng.random(k) * (np.maximum(hi - lo, 0) + 1)).astype(np.int64)
    edge = np.where(rng.random(k) < 0.5, lo, hi) + rng.integers(-1, 2, k)
    return np.where(rng.random(k) < 0.6, edge, inner)


def sample_pairs(word: TimedWord, zones: Sequence[Zone], n: int, seed: int,
                 constants: Sequence[int] = (0, 1, 2), unit: int | None = None
                 ) -> tuple[np.ndarray, np.ndarray, int]:
    """Draw ``n`` pairs ``t < t'`` with ``t >= 0``, stratified toward boundaries.

    Returns grid numerators for ``t`` and ``t'`` and the grid denominator.
    The strata mix stamps, stamps ± eps, midpoints between stamps, offsets
    by guard constants, windows spanning a few events, points on or next to
    zone faces, and uniform points.
    """
    unit = unit or sample_unit(word, zones)
    rng = np.random.default_rng(seed)
    if n <= 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, unit
    step = unit // word.scale
    stamps = np.concatenate([[0], np.asarray(word.ticks, dtype=np.int64) * step])
    horizon = int(stamps[-1]) + (max(constants, default=0) + 2) * unit
    mids = (stamps[:-1] + stamps[1:]) // 2 if len(stamps) > 1 else stamps
    boxes = _zone_boxes(zones, unit, horizon)
    anchors = np.concatenate([stamps, mids, boxes[:, :4].ravel(), [horizon]])
    consts = np.asarray(list(constants) or [0], dtype=np.int64) * unit
    jitter = np.asarray([-1, 0, 1], dtype=np.int64)

    def near(k):
        return rng.choice(anchors, k) + rng.choice(jitter, k)

    ts = np.empty(0, dtype=np.int64)
    tps = np.empty(0, dtype=np.int64)
    while len(ts) < n:
        k = 2 * (n - len(ts)) + 8
        kind = rng.integers(0, 7, k)
        t = np.where(kind == 4, rng.integers(0, horizon + 1, k), near(k))
        off = rng.choice(consts, k) + rng.choice(jitter, k)
        first = rng.integers(0, len(stamps), k)
        span = np.minimum(first + rng.geometric(0.08, k), len(stamps))
        window_end = np.concatenate([stamps, [horizon]])[span]
        choices = [near(k), t + off, rng.choice(stamps, k) + off,
                   t + off + rng.integers(1, unit, k)]
        conds = [kind == 0, kind == 1, kind == 2, kind == 3]
        # local windows over a few consecutive events
        back = np.where(rng.random(k) < 0.5, rng.choice(jitter, k), -off)
        t = np.where(kind == 5, stamps[first] + back, t)
        conds.append(kind == 5)
        choices.append(window_end + np.where(rng.random(k) < 0.5, rng.choice(jitter, k), off))
        if len(boxes):
            box = boxes[rng.integers(0, len(boxes), k)]
            zt = _near_range(rng, box[:, 0], box[:, 1])
            lo = np.maximum(box[:, 2], zt + box[:, 4])
            hi = np.minimum(box[:, 3], zt + box[:, 5])
            t = np.where(kind == 6, zt, t)
            conds.append(kind == 6)
            choices.append(_near_range(rng, lo, np.maximum(lo, hi)))
        tp = np.select(conds, choices, default=rng.integers(0, horizon + 1, k))
        keep = (t >= 0) & (tp > t)
        ts = np.concatenate([ts, t[keep]])
        tps = np.concatenate([tps, tp[keep]])
    return ts[:n], tps[:n], unit


@dataclass
class OracleReport:
    samples: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        if self.ok:
            return f"{self.samples} samples, all agree"
        lines = [f"{self.samples} samples, {len(self.failures)} disagreements"]
        for t, tp, accepted, covered in self.failures[:5]:
            lines.append(f"  (t, t') = ({t}, {tp}): simulate={accepted} zones={covered}")
        return "\n".join(lines)


def sample_oracle_check(word: TimedWord, automaton: TimedAutomaton, zones: Sequence[Zone],
                        n: int, seed: int = 0) -> OracleReport:
    """Compare zone membership with simulation of the segment on ``n`` sampled pairs."""
    zones = list(zones)
    consts = sorted({0, 1} | set(automaton.max_constants().values())
                    | {a.const for tr in automaton.transitions for a in tr.guard.atoms})
    ts, tps, unit = sample_pairs(word, zones, n, seed, consts)
    covered = covers_many(zones, ts, tps, unit)
    report = OracleReport(len(ts))
    for t_num, tp_num, got in zip(ts.tolist(), tps.tolist(), covered.tolist()):
        t, tp = Fraction(t_num, unit), Fraction(tp_num, unit)
        accepted = simulate(automaton, segment(word, t, tp))
        if accepted != got:
            report.failures.append((t, tp, accepted, got))
    return report
