"""Clock regions, region automata, automaton products and pair feasibility.

A region over clocks ``x_0..x_{k-1}`` with maximal constants ``c_i`` is
encoded as

* ``codes[i]``: ``2n`` when ``x_i = n``, ``2n + 1`` when ``n < x_i < n + 1``,
  and ``2c_i + 1`` when ``x_i > c_i``;
* ``order``: the clocks with a non-zero fractional part that are still
  below their constant, grouped into blocks of equal fractional part and
  listed from smallest to largest fraction.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Hashable, Iterable, Iterator, Sequence

from timedmatch.core.automaton import Atom, ClockConstraint, TimedAutomaton, Transition
from timedmatch.errors import PreprocessResourceExceeded

CAP_ENV = "TIMEDMATCH_REGION_CAP"
DEFAULT_CAP = 10**6

LT, GT, LE, GE = 0, 1, 2, 3
_OPCODE = {"<": LT, ">": GT, "<=": LE, ">=": GE}


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


class RegionBudget:
    """Counts region states visited during preprocessing and stops at a cap.

    Every region state that is constructed counts once, including the
    transient time-successors examined while building transitions.
    """

    def __init__(self, cap: int | None = None):
        self.cap = default_cap() if cap is None else cap
        self.used = 0

    def charge(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.cap:
            raise PreprocessResourceExceeded(self.cap)


@dataclass(frozen=True, order=True)
class ClockRegion:
    codes: tuple[int, ...]
    order: tuple[tuple[int, ...], ...] = ()

    def describe(self, clocks: Sequence[str], bounds: Sequence[int]) -> str:
        parts = []
        for k, code in enumerate(self.codes):
            n, odd = divmod(code, 2)
            if odd and n == bounds[k]:
                parts.append(f"{clocks[k]}>{n}")
            elif odd:
                parts.append(f"{n}<{clocks[k]}<{n + 1}")
            else:
                parts.append(f"{clocks[k]}={n}")
        if len(self.order) > 1 or any(len(b) > 1 for b in self.order):
            chain = " < ".join("=".join(f"frac({clocks[k]})" for k in b) for b in self.order)
            parts.append(chain)
        return ", ".join(parts) or "true"


def zero_region(n_clocks: int) -> ClockRegion:
    return ClockRegion((0,) * n_clocks, ())


def region_of(valuation: Sequence[Fraction], bounds: Sequence[int]) -> ClockRegion:
    """The region containing a concrete valuation."""
    codes = []
    fracs: dict[Fraction, list[int]] = {}
    for k, v in enumerate(valuation):
        v = Fraction(v)
        c = bounds[k]
        if v > c:
            codes.append(2 * c + 1)
            continue
        n = math.floor(v)
        f = v - n
        if f == 0:
            codes.append(2 * n)
        else:
            codes.append(2 * n + 1)
            fracs.setdefault(f, []).append(k)
    order = tuple(tuple(fracs[f]) for f in sorted(fracs))
    return ClockRegion(tuple(codes), order)


def is_open(region: ClockRegion) -> bool:
    """True when no clock sits exactly on an integer, so time can pass within it."""
    return all(code & 1 for code in region.codes)


def next_region(region: ClockRegion, bounds: Sequence[int]) -> ClockRegion | None:
    """The region entered next as time elapses; None once every clock is above its constant."""
    codes = list(region.codes)
    on_int = [k for k, code in enumerate(codes) if not code & 1]
    if on_int:
        fresh = []
        for k in on_int:
            codes[k] += 1
            if codes[k] != 2 * bounds[k] + 1:
                fresh.append(k)
        order = ((tuple(fresh),) + region.order) if fresh else region.order
        return ClockRegion(tuple(codes), order)
    if region.order:
        for k in region.order[-1]:
            codes[k] += 1
        return ClockRegion(tuple(codes), region.order[:-1])
    return None


def time_successors(region: ClockRegion, bounds: Sequence[int]) -> list[ClockRegion]:
    """Regions reachable by letting a strictly positive amount of time pass, in elapse order.

    An open region is its own successor because a small delay stays inside it.
    """
    out = [region] if is_open(region) else []
    nxt = next_region(region, bounds)
    while nxt is not None:
        out.append(nxt)
        nxt = next_region(nxt, bounds)
    return out


def compile_guard(guard: ClockConstraint, clock_index: dict[str, int]) -> tuple:
    return tuple((clock_index[a.clock], _OPCODE[a.op], a.const) for a in guard.atoms)


def satisfies(region: ClockRegion, guard: tuple, bounds: Sequence[int]) -> bool:
    """Whether every valuation of ``region`` meets a compiled guard."""
    codes = region.codes
    for k, op, c in guard:
        code = codes[k]
        n, odd = divmod(code, 2)
        if odd and n == bounds[k]:
            ok = op in (GT, GE)
        elif not odd:
            ok = (n < c, n > c, n <= c, n >= c)[op]
        elif op in (LT, LE):
            ok = n + 1 <= c
        else:
            ok = n >= c
        if not ok:
            return False
    return True


def reset_region(region: ClockRegion, clocks: Iterable[int]) -> ClockRegion:
    clocks = set(clocks)
    if not clocks:
        return region
    codes = tuple(0 if k in clocks else code for k, code in enumerate(region.codes))
    order = tuple(b for b in (tuple(k for k in block if k not in clocks) for block in region.order) if b)
    return ClockRegion(codes, order)


def _ordered_partitions(items: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not items:
        yield ()
        return
    items = list(items)
    n = len(items)
    for mask in range(1, 1 << n):
        first = tuple(items[i] for i in range(n) if mask >> i & 1)
        rest = [items[i] for i in range(n) if not mask >> i & 1]
        for tail in _ordered_partitions(rest):
            yield (first,) + tail


def enumerate_regions(bounds: Sequence[int]) -> Iterator[ClockRegion]:
    """Every region for the given maximal constants."""
    for codes in cartesian(*[range(2 * c + 2) for c in bounds]):
        frac = [k for k, code in enumerate(codes) if code & 1 and code != 2 * bounds[k] + 1]
        for order in _ordered_partitions(frac):
            yield ClockRegion(tuple(codes), order)


# ---------------------------------------------------------------------------
# Region automata
# ---------------------------------------------------------------------------

Node = tuple  # (automaton state, ClockRegion)


@dataclass
class RegionAutomaton:
    """Explicit region automaton; nodes are ``(state, region)`` pairs numbered from 0."""

    automaton: TimedAutomaton
    bounds: tuple[int, ...]
    nodes: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    initial: list[int] = field(default_factory=list)
    edges: list[list[tuple[str, int]]] = field(default_factory=list)

    @property
    def accepting(self) -> set[int]:
        acc = self.automaton.accepting
        return {k for k, (s, _) in enumerate(self.nodes) if s in acc}

    def __len__(self) -> int:
        return len(self.nodes)

    def add(self, node) -> tuple[int, bool]:
        k = self.index.get(node)
        if k is not None:
            return k, False
        k = len(self.nodes)
        self.nodes.append(node)
        self.index[node] = k
        self.edges.append([])
        return k, True

    def dump(self) -> str:
        """One line per transition, for inspection."""
        clocks = self.automaton.clocks
        lines = []
        for k, (s, reg) in enumerate(self.nodes):
            for label, dst in self.edges[k]:
                s2, reg2 = self.nodes[dst]
                lines.append(f"({s}, {reg.describe(clocks, self.bounds)}) -{label}-> "
                             f"({s2}, {reg2.describe(clocks, self.bounds)})")
        return "\n".join(lines)


class _Stepper:
    """Discrete successors of region-automaton nodes."""

    def __init__(self, automaton: TimedAutomaton, budget: RegionBudget):
        self.automaton = automaton
        consts = automaton.max_constants()
        self.bounds = tuple(consts[x] for x in automaton.clocks)
        idx = {x: k for k, x in enumerate(automaton.clocks)}
        self.out: dict = {}
        for tr in automaton.transitions:
            self.out.setdefault(tr.source, []).append(
                (tr.label, tr.target, compile_guard(tr.guard, idx),
                 tuple(sorted(idx[x] for x in tr.resets))))
        self.budget = budget

    def successors(self, node) -> list[tuple[str, tuple]]:
        state, region = node
        edges = self.out.get(state)
        if not edges:
            return []
        chain = time_successors(region, self.bounds)
        self.budget.charge(len(chain))
        found = []
        seen = set()
        for mid in chain:
            for label, target, guard, resets in edges:
                if satisfies(mid, guard, self.bounds):
                    item = (label, (target, reset_region(mid, resets)))
                    if item not in seen:
                        seen.add(item)
                        found.append(item)
        return found


def max_constants(automaton: TimedAutomaton) -> dict[str, int]:
    return automaton.max_constants()


def reachable_region_automaton(automaton: TimedAutomaton,
                               budget: RegionBudget | None = None) -> RegionAutomaton:
    """The part of the region automaton reachable from the initial nodes."""
    budget = budget or RegionBudget()
    step = _Stepper(automaton, budget)
    ra = RegionAutomaton(automaton, step.bounds)
    zero = zero_region(len(automaton.clocks))
    queue = deque()
    for s in sorted(automaton.initial, key=repr):
        k, new = ra.add((s, zero))
        ra.initial.append(k)
        if new:
            budget.charge()
            queue.append(k)
    while queue:
        k = queue.popleft()
        for label, node in step.successors(ra.nodes[k]):
            dst, new = ra.add(node)
            if new:
                budget.charge()
                queue.append(dst)
            ra.edges[k].append((label, dst))
    return ra


def build_region_automaton(automaton: TimedAutomaton,
                           budget: RegionBudget | None = None) -> RegionAutomaton:
    """The full region automaton over every (state, region) pair."""
    budget = budget or RegionBudget()
    step = _Stepper(automaton, budget)
    ra = RegionAutomaton(automaton, step.bounds)
    for s in automaton.states:
        for reg in enumerate_regions(step.bounds):
            budget.charge()
            ra.add((s, reg))
    zero = zero_region(len(automaton.clocks))
    ra.initial = [ra.index[(s, zero)] for s in sorted(automaton.initial, key=repr)]
    for k, node in enumerate(ra.nodes):
        ra.edges[k] = [(label, ra.index[n]) for label, n in step.successors(node)]
    return ra


# ---------------------------------------------------------------------------
# Products and pair feasibility
# ---------------------------------------------------------------------------

def product(a: TimedAutomaton, b: TimedAutomaton) -> TimedAutomaton:
    """Synchronous product on shared labels; ``b``'s clashing clocks get primes appended."""
    rename = {}
    taken = set(a.clocks)
    for x in b.clocks:
        y = x
        while y in taken:
            y += "'"
        rename[x] = y
        taken.add(y)

    def moved(g: ClockConstraint) -> ClockConstraint:
        return ClockConstraint(tuple(Atom(rename[t.clock], t.op, t.const) for t in g.atoms))

    shared = a.alphabet & b.alphabet
    trans = []
    for ta in a.transitions:
        if ta.label not in shared:
            continue
        for tb in b.transitions:
            if tb.label != ta.label:
                continue
            trans.append(Transition((ta.source, tb.source), (ta.target, tb.target), ta.label,
                                    ta.guard & moved(tb.guard),
                                    ta.resets | frozenset(rename[x] for x in tb.resets)))
    states = [(p, q) for p in a.states for q in b.states]
    return TimedAutomaton(frozenset(shared), tuple(states),
                          frozenset((p, q) for p in a.initial for q in b.initial),
                          frozenset((p, q) for p in a.accepting for q in b.accepting),
                          tuple(a.clocks) + tuple(rename[x] for x in b.clocks), tuple(trans))


@dataclass(frozen=True)
class RegionRun:
    """A path of a region automaton: ``len(nodes) == len(labels) + 1``."""

    nodes: tuple[tuple[Hashable, ClockRegion], ...]
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def window(self, start: int, stop: int) -> "RegionRun":
        """Nodes ``start..stop-1`` with the labels between them."""
        return RegionRun(self.nodes[start:stop], self.labels[start:stop - 1])


def _merge_orders(p: tuple, q: tuple) -> Iterator[tuple]:
    """Every interleaving of two fraction orders, optionally fusing facing blocks."""
    if not p:
        yield q
        return
    if not q:
        yield p
        return
    for rest in _merge_orders(p[1:], q):
        yield (p[0],) + rest
    for rest in _merge_orders(p, q[1:]):
        yield (q[0],) + rest
    for rest in _merge_orders(p[1:], q[1:]):
        yield (tuple(sorted(p[0] + q[0])),) + rest


def joint_regions(left: ClockRegion, right: ClockRegion) -> Iterator[ClockRegion]:
    """Regions over the concatenated clocks whose two projections are ``left`` and ``right``."""
    k = len(left.codes)
    shifted = tuple(tuple(c + k for c in b) for b in right.order)
    for order in _merge_orders(left.order, shifted):
        yield ClockRegion(left.codes + right.codes, order)


def project(region: ClockRegion, lo: int, hi: int) -> ClockRegion:
    order = tuple(b for b in (tuple(c - lo for c in block if lo <= c < hi) for block in region.order) if b)
    return ClockRegion(region.codes[lo:hi], order)


class PairChecker:
    """Decides whether two region runs of one automaton share a timed word.

    The search walks the region automaton of the self-product layer by
    layer, keeping only joint regions that project onto the two runs.
    """

    def __init__(self, automaton: TimedAutomaton, budget: RegionBudget | None = None):
        self.automaton = automaton
        self.budget = budget or RegionBudget()
        self.k = len(automaton.clocks)
        consts = automaton.max_constants()
        single = tuple(consts[x] for x in automaton.clocks)
        self.bounds = single + single
        prod = product(automaton, automaton)
        idx = {x: n for n, x in enumerate(prod.clocks)}
        self.moves: dict = {}
        for tr in prod.transitions:
            key = (tr.source, tr.target, tr.label)
            self.moves.setdefault(key, []).append(
                (compile_guard(tr.guard, idx), tuple(sorted(idx[x] for x in tr.resets))))
        self.memo: dict = {}

    def feasible(self, left: RegionRun, right: RegionRun) -> bool:
        if len(left) != len(right):
            return False
        if left.labels != right.labels:
            return False
        key = (left, right)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._search(left, right)
        return hit

    def _search(self, left: RegionRun, right: RegionRun) -> bool:
        k, bounds, budget = self.k, self.bounds, self.budget
        layer = set(joint_regions(left.nodes[0][1], right.nodes[0][1]))
        budget.charge(len(layer))
        for step, label in enumerate(left.labels):
            (s1, _), (t1, want1) = left.nodes[step], left.nodes[step + 1]
            (s2, _), (t2, want2) = right.nodes[step], right.nodes[step + 1]
            moves = self.moves.get(((s1, s2), (t1, t2), label))
            if not moves:
                return False
            nxt = set()
            for reg in layer:
                chain = time_successors(reg, bounds)
                budget.charge(len(chain))
                for mid in chain:
                    for guard, resets in moves:
                        if not satisfies(mid, guard, bounds):
                            continue
                        after = reset_region(mid, resets)
                        if after in nxt:
                            continue
                        if project(after, 0, k) == want1 and project(after, k, 2 * k) == want2:
                            nxt.add(after)
            if not nxt:
                return False
            budget.charge(len(nxt))
            layer = nxt
        return True


def pair_feasible(automaton: TimedAutomaton, left: RegionRun, right: RegionRun) -> bool:
    """One-shot form of :meth:`PairChecker.feasible`."""
    return PairChecker(automaton).feasible(left, right)
