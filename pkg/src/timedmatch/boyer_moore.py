"""Skip-ahead matching driven by tables computed on the region automaton.

The matcher visits match-start slots from right to left like the naive
scan, but after each slot it jumps left by a distance that provably cannot
step over a slot holding a match.  The distance depends only on which
automaton states survived longest in the scan, so it is tabulated per
state ahead of time.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from timedmatch.codecs import automaton_digest
from timedmatch.core.automaton import TimedAutomaton
from timedmatch.core.words import TimedWord
from timedmatch.core.zones import Interval, MatchSet
from timedmatch.errors import EmptyConf, NoAcceptedWord, ParseError
from timedmatch.naive import Engine, finish_zones, match_offline, word_grid
from timedmatch.region import (
    PairChecker,
    RegionAutomaton,
    RegionBudget,
    RegionRun,
    reachable_region_automaton,
)

CACHE_VERSION = 1


# ---------------------------------------------------------------------------
# Shortest lengths and prefix run sets
# ---------------------------------------------------------------------------

def shortest_lengths(ra: RegionAutomaton) -> tuple[int, dict]:
    """Length of the shortest accepted word and, per state, of the shortest run reaching it.

    Run lengths count nodes, so an initial state has length 1.
    """
    dist = [None] * len(ra)
    queue = deque()
    for k in ra.initial:
        if dist[k] is None:
            dist[k] = 1
            queue.append(k)
    while queue:
        k = queue.popleft()
        for _, dst in ra.edges[k]:
            if dist[dst] is None:
                dist[dst] = dist[k] + 1
                queue.append(dst)
    per_state: dict = {}
    for k, d in enumerate(dist):
        if d is None:
            continue
        s = ra.nodes[k][0]
        if s not in per_state or d < per_state[s]:
            per_state[s] = d
    finals = [per_state[s] for s in ra.automaton.accepting if s in per_state]
    if not finals:
        raise NoAcceptedWord("no accepting state is reachable")
    return min(finals) - 1, per_state


def _coreachable(ra: RegionAutomaton, targets: Iterable[int]) -> set[int]:
    back: list[list[int]] = [[] for _ in range(len(ra))]
    for k, edges in enumerate(ra.edges):
        for _, dst in edges:
            back[dst].append(k)
    seen = set(targets)
    queue = deque(seen)
    while queue:
        k = queue.popleft()
        for src in back[k]:
            if src not in seen:
                seen.add(src)
                queue.append(src)
    return seen


def _prefixes(ra: RegionAutomaton, length: int, alive: set[int],
              budget: RegionBudget) -> list[RegionRun]:
    """Runs of ``length`` nodes from an initial node that stay inside ``alive``."""
    found: set[RegionRun] = set()
    stack = [(k, (k,), ()) for k in ra.initial if k in alive]
    while stack:
        k, path, labels = stack.pop()
        budget.charge()
        if len(path) == length:
            found.add(RegionRun(tuple(ra.nodes[p] for p in path), labels))
            continue
        for label, dst in ra.edges[k]:
            if dst in alive:
                stack.append((dst, path + (dst,), labels + (label,)))
    return sorted(found, key=repr)


def prefix_run_sets(ra: RegionAutomaton, m: int, shortest: dict,
                    budget: RegionBudget | None = None) -> tuple[list[RegionRun], dict]:
    """Prefixes of accepting runs (``m`` nodes) and, per state, prefixes of runs reaching it.

    The per-state prefixes have ``min(m, shortest[s])`` nodes.
    """
    budget = budget or RegionBudget()
    by_state: dict = {}
    for k, (s, _) in enumerate(ra.nodes):
        by_state.setdefault(s, []).append(k)
    accepting = [k for s in ra.automaton.accepting for k in by_state.get(s, [])]
    accepted = _prefixes(ra, m, _coreachable(ra, accepting), budget)
    per_state = {}
    for s, ks in by_state.items():
        per_state[s] = _prefixes(ra, min(m, shortest[s]), _coreachable(ra, ks), budget)
    return accepted, per_state


# ---------------------------------------------------------------------------
# Shift distances
# ---------------------------------------------------------------------------

def shift_inside(run: RegionRun, accepted: Sequence[RegionRun], m: int, checker: PairChecker) -> int:
    """Least shift placing ``run`` entirely within some accepted prefix; capped at ``m``."""
    size = len(run)
    for n in range(1, m - size + 1):
        for other in accepted:
            if checker.feasible(run, other.window(n, n + size)):
                return n
    return m


def shift_overlap(run: RegionRun, accepted: Sequence[RegionRun], m: int, checker: PairChecker) -> int:
    """Least shift at which the tail of some accepted prefix agrees with a prefix of ``run``; capped at ``m``."""
    for n in range(max(1, m - len(run)), m):
        for other in accepted:
            if checker.feasible(run.window(0, m - n), other.window(n, m)):
                return n
    return m


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

@dataclass
class SkipTables:
    m: int
    shortest: dict
    per_state: dict
    positions: dict = field(default_factory=dict)
    digest: str = ""
    seconds: float = 0.0
    region_nodes: int = 0

    def delta2(self, states: Iterable[Hashable]) -> int:
        """Safe skip after a scan whose last surviving configurations sit in ``states``."""
        states = list(states)
        if not states:
            raise EmptyConf("no configuration to derive a skip from")
        return max(self.per_state.get(s, 1) for s in states)

    def delta1(self, label: str, position: int) -> int:
        """Label-based shift; may be zero or negative, callers clamp."""
        best = self.m + 1
        for k, labels in self.positions.items():
            if label in labels and k < best:
                best = k
        return best - position

    # -- serialization -------------------------------------------------------

    def to_json(self, automaton: TimedAutomaton) -> dict:
        names = {s: str(s) for s in automaton.states}
        return {
            "version": CACHE_VERSION,
            "digest": self.digest,
            "m": self.m,
            "shortest": {names[s]: v for s, v in self.shortest.items()},
            "per_state": {names[s]: v for s, v in self.per_state.items()},
            "positions": {str(k): sorted(v) for k, v in self.positions.items()},
            "seconds": self.seconds,
            "region_nodes": self.region_nodes,
        }

    @classmethod
    def from_json(cls, data: dict, automaton: TimedAutomaton) -> "SkipTables":
        if data.get("version") != CACHE_VERSION:
            raise ParseError("unsupported cache version")
        lookup = {str(s): s for s in automaton.states}
        try:
            return cls(
                m=data["m"],
                shortest={lookup[k]: v for k, v in data["shortest"].items()},
                per_state={lookup[k]: v for k, v in data["per_state"].items()},
                positions={int(k): frozenset(v) for k, v in data["positions"].items()},
                digest=data["digest"],
                seconds=data.get("seconds", 0.0),
                region_nodes=data.get("region_nodes", 0),
            )
        except KeyError as exc:
            raise ParseError(f"cache does not fit the automaton: {exc}") from exc

    def save(self, path: str | Path, automaton: TimedAutomaton) -> None:
        Path(path).write_text(json.dumps(self.to_json(automaton), indent=1) + "\n")


def load_tables(path: str | Path, automaton: TimedAutomaton) -> SkipTables | None:
    """Cached tables for ``automaton``, or None when the cache is missing or stale."""
    p = Path(path)
    if not p.exists():
        return None
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError:
        return None
    if data.get("digest") != automaton_digest(automaton):
        return None
    return SkipTables.from_json(data, automaton)


def preprocess(automaton: TimedAutomaton, cap: int | None = None) -> SkipTables:
    """Build the skip tables; the region budget bounds the whole computation."""
    automaton.check_assumption()
    began = time.perf_counter()
    budget = RegionBudget(cap)
    ra = reachable_region_automaton(automaton, budget)
    m, shortest = shortest_lengths(ra)
    accepted, per_state_runs = prefix_run_sets(ra, m, shortest, budget)
    checker = PairChecker(automaton, budget)
    per_state = {}
    for s in automaton.states:
        runs = per_state_runs.get(s)
        if s in automaton.accepting or not runs:
            per_state[s] = 1
            continue
        best = m
        for run in runs:
            best = min(best, shift_inside(run, accepted, m, checker),
                       shift_overlap(run, accepted, m, checker))
            if best == 1:
                break
        per_state[s] = max(best, 1)
    positions: dict[int, set] = {}
    for run in accepted:
        for k, label in enumerate(run.labels, 1):
            positions.setdefault(k, set()).add(label)
    return SkipTables(
        m=m, shortest=shortest, per_state=per_state,
        positions={k: frozenset(v) for k, v in positions.items()},
        digest=automaton_digest(automaton),
        seconds=time.perf_counter() - began,
        region_nodes=len(ra),
    )


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

def match_bm(word: TimedWord, automaton: TimedAutomaton, tables: SkipTables | None = None,
             *, use_delta1: bool = False, trace: list | None = None) -> MatchSet:
    """Skip-ahead matching; same result as :func:`timedmatch.naive.match_offline`.

    When ``trace`` is a list, one ``(slot, skip)`` pair is appended per
    visited slot.
    """
    if tables is None:
        tables = preprocess(automaton)
    eng = Engine(automaton, word.scale)
    eng.check_labels(word.events)
    ticks, labels = word_grid(word)
    n = len(word)
    out: list = []
    eng.immediate_zones(ticks, out)
    per_state = [tables.per_state.get(s, 1) for s in automaton.states]
    m = tables.m
    i = min(n, n - m + 2)
    while i > 0:
        last, j = eng.scan(ticks, labels, i, out)
        skip = 1
        for s, _rho, _tag in last:
            v = per_state[s]
            if v > skip:
                skip = v
        if use_delta1 and j <= n:
            skip = max(skip, tables.delta1(labels[j], j - i + 1))
        if trace is not None:
            trace.append((i, skip))
        i -= skip
    return finish_zones(out, word.scale)


def opt_skip(word: TimedWord, automaton: TimedAutomaton, i: int,
             matches: MatchSet | None = None) -> int:
    """Largest skip from slot ``i`` that steps over no match start.

    Returns ``i`` when no match starts left of slot ``i``; any skip of at
    least ``i`` ends the scan, so ``i`` stands in for infinity.
    """
    if matches is None:
        matches = match_offline(word, automaton)
    stamps = (0,) + word.stamps
    for k in range(i - 1, 0, -1):
        slot = Interval.make(stamps[k - 1], True, stamps[k], False)
        if any(not (slot & z.start).is_empty for z in matches):
            return i - k
    return i


def unsafe_skips(word: TimedWord, automaton: TimedAutomaton, trace: Sequence[tuple[int, int]],
                 matches: MatchSet | None = None) -> list[tuple[int, int, int]]:
    """``(slot, skip, opt)`` for every traced skip that steps over a match start."""
    if matches is None:
        matches = match_offline(word, automaton)
    bad = []
    for i, skip in trace:
        best = opt_skip(word, automaton, i, matches)
        if best < i and skip > best:
            bad.append((i, skip, best))
    return bad
