"""Seeded random timed words for the five benchmark shapes.

Every generator draws gaps in floating point and snaps them to a grid
(one microsecond unless asked otherwise), so the resulting words are exact
on a ``1/10**6`` grid.  A gap that would round to zero becomes one grid step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from timedmatch.core.words import TimedWord
from timedmatch.errors import InvalidParams

SCALE = 10**6


@dataclass(frozen=True)
class GenSpec:
    """What to generate.

    ``length`` caps the number of events and ``duration`` the last stamp;
    at least one of them must be given.  ``rate`` is the exponential rate
    for the shapes that use one.  ``level``, ``drift`` and ``noise``
    shape the driving signal of case 5.  ``grid`` is the snapping step in
    microseconds; coarse grids make exact unit distances between events
    likely.
    """

    case: int
    seed: int = 0
    length: int | None = None
    duration: float | None = None
    rate: float = 1.0
    sample_rate: float = 20.0
    level: float = 0.0
    drift: float = 0.97
    noise: float = 0.25
    grid: int = 1


def _ticks(gaps: np.ndarray, grid: int, hi: int | None = None) -> np.ndarray:
    """Snap gaps to multiples of ``grid`` ticks, keeping them in ``[grid, hi]``."""
    snapped = np.rint(gaps * (SCALE / grid)).astype(np.int64) * grid
    snapped = np.maximum(snapped, grid)
    if hi is not None:
        snapped = np.minimum(snapped, hi - (hi % grid))
    return np.cumsum(snapped)


def _budget(spec: GenSpec, mean_gap: float) -> int:
    """How many gaps to draw so that either limit is reached."""
    if spec.length is not None:
        return spec.length
    return int(spec.duration / mean_gap * 1.3) + 64


def _trim(events, ticks, spec: GenSpec) -> TimedWord:
    n = len(ticks)
    if spec.duration is not None:
        n = int(np.searchsorted(ticks, int(round(spec.duration * SCALE)), side="right"))
    if spec.length is not None:
        n = min(n, spec.length)
    return TimedWord.from_ticks(np.asarray(events)[:n].tolist(), ticks[:n].tolist(), SCALE)


def _check(spec: GenSpec) -> None:
    if spec.case not in (1, 2, 3, 4, 5):
        raise InvalidParams(f"unknown case {spec.case}")
    if spec.length is None and spec.duration is None:
        raise InvalidParams("give a length or a duration")
    if spec.length is not None and spec.length < 0:
        raise InvalidParams("length must be non-negative")
    if spec.duration is not None and spec.duration <= 0:
        raise InvalidParams("duration must be positive")
    if spec.rate <= 0 or spec.sample_rate <= 0:
        raise InvalidParams("rates must be positive")
    if spec.grid < 1:
        raise InvalidParams("grid must be at least one tick")
    if spec.case == 2 and spec.grid >= SCALE // 10:
        raise InvalidParams("case 2 gaps lie below 0.1, so the grid must be finer")
    if not 0 <= spec.drift < 1 or spec.noise <= 0:
        raise InvalidParams("case 5 needs 0 <= drift < 1 and noise > 0")


def generate(spec: GenSpec) -> TimedWord:
    _check(spec)
    rng = np.random.default_rng(spec.seed)
    if spec.case == 1:
        n = _budget(spec, 1.0)
        ticks = _ticks(rng.uniform(0.0, 2.0, n), spec.grid, hi=2 * SCALE - 1)
        events = np.where(np.arange(n) % 2 == 0, "a", "b")
        return _trim(events, ticks, spec)
    if spec.case == 2:
        n = _budget(spec, 0.05)
        ticks = _ticks(rng.uniform(0.0, 0.1, n), spec.grid, hi=SCALE // 10 - 1)
        return _trim(np.full(n, "a"), ticks, spec)
    if spec.case == 3:
        n = _budget(spec, 1.0 / spec.rate)
        ticks = _ticks(rng.exponential(1.0 / spec.rate, n), spec.grid)
        return _trim(np.full(n, "a"), ticks, spec)
    if spec.case == 4:
        return _interleaved(spec, rng)
    return _sampled_signal(spec, rng)


def _alternation(rng, rate: float, count: int, grid: int, on: str, off: str):
    ticks = _ticks(rng.exponential(1.0 / rate, count), grid)
    labels = np.where(np.arange(count) % 2 == 0, off, on)
    return labels, ticks


def _interleaved(spec: GenSpec, rng) -> TimedWord:
    """Two on/off alternations merged by time.  Both signals start on."""
    per = _budget(spec, 1.0 / spec.rate) + 2
    l1, t1 = _alternation(rng, spec.rate, per, spec.grid, "p", "np")
    l2, t2 = _alternation(rng, spec.rate, per, spec.grid, "q", "nq")
    labels = np.concatenate([l1, l2])
    ticks = np.concatenate([t1, t2])
    order = np.argsort(ticks, kind="stable")
    labels, ticks = labels[order], ticks[order]
    # where the two streams collide, push later events one tick forward
    idx = np.arange(len(ticks))
    ticks = np.maximum.accumulate(ticks - idx) + idx
    return _trim(labels, ticks, spec)


def _sampled_signal(spec: GenSpec, rng) -> TimedWord:
    """Samples of a thresholded mean-reverting random walk, labelled ``high`` or ``low``."""
    n = _budget(spec, 1.0 / spec.sample_rate)
    ticks = _ticks(rng.exponential(1.0 / spec.sample_rate, n), spec.grid)
    shocks = rng.normal(0.0, spec.noise, n)
    level = np.empty(n)
    v = 0.0
    for k in range(n):
        v = spec.drift * v + shocks[k]
        level[k] = v
    labels = np.where(level > spec.level, "high", "low")
    return _trim(labels, ticks, spec)
