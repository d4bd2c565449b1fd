from fractions import Fraction
from itertools import product as cartesian

import pytest

from timedmatch.core.automaton import TimedAutomaton, edge, simulate
from timedmatch.core.words import TERMINAL, TimedWord
from timedmatch.errors import PreprocessResourceExceeded
from timedmatch.region import (
    CAP_ENV,
    ClockRegion,
    PairChecker,
    RegionBudget,
    RegionRun,
    build_region_automaton,
    default_cap,
    enumerate_regions,
    max_constants,
    pair_feasible,
    product,
    reachable_region_automaton,
    region_of,
    time_successors,
)
from timedmatch.boyer_moore import prefix_run_sets, shortest_lengths
from timedmatch.cases import two_alternations

F = Fraction


def test_max_constants(fig4, case1, wait2):
    assert max_constants(fig4) == {"x": 1, "y": 1}
    assert max_constants(case1) == {}
    assert max_constants(wait2) == {"t": 2}


def test_region_of_zero():
    assert region_of([0, 0], [1, 1]) == ClockRegion((0, 0), ())


def test_region_of_orders_fractions():
    r = region_of([F(1, 2), F(1, 5)], [1, 1])
    assert r.codes == (1, 1)
    assert r.order == ((1,), (0,))


def test_region_of_exceeded():
    assert region_of([F(5, 2)], [1]) == ClockRegion((3,), ())


def test_time_successors_of_zero():
    succ = time_successors(ClockRegion((0,), ()), [1])
    assert succ == [ClockRegion((1,), ((0,),)), ClockRegion((2,), ()), ClockRegion((3,), ())]


def test_time_successors_of_exceeded_is_itself():
    top = ClockRegion((3, 3), ())
    assert time_successors(top, [1, 1]) == [top]


def test_time_successors_of_integer_point():
    assert time_successors(ClockRegion((2,), ()), [1]) == [ClockRegion((3,), ())]


def test_time_successors_follow_concrete_elapse():
    bounds = [2, 1]
    for start in [(F(0), F(0)), (F(1, 3), F(0)), (F(3, 2), F(1, 4)), (F(1), F(1, 2))]:
        seen = []
        for k in range(1, 400):
            v = [s + F(k, 97) for s in start]
            r = region_of(v, bounds)
            if not seen or seen[-1] != r:
                seen.append(r)
        succ = time_successors(region_of(start, bounds), bounds)
        assert [r for r in seen] == [r for r in succ if r in seen]
        assert set(seen) <= set(succ)


@pytest.mark.parametrize("bounds", [[0], [1], [2], [1, 1], [2, 1], [2, 2], [0, 2]])
def test_region_enumeration_matches_grid(bounds):
    denom = 7
    axes = [[F(k, denom) for k in range(0, (c + 2) * denom)] for c in bounds]
    found = {region_of(v, bounds) for v in cartesian(*axes)}
    listed = list(enumerate_regions(bounds))
    assert len(listed) == len(set(listed))
    assert set(listed) == found


def test_guard_free_region_automaton_is_isomorphic(case1):
    ra = build_region_automaton(case1)
    assert len(ra) == len(case1.states)
    assert sum(len(e) for e in ra.edges) == len(case1.transitions)


def test_fig4_contains_listed_runs(fig4):
    ra = reachable_region_automaton(fig4)
    zero = ClockRegion((0, 0), ())
    s1_inside = ClockRegion((1, 0), ((0,),))
    s3 = ClockRegion((1, 1), ((1,), (0,)))
    for node in [("s0", zero), ("s1", s1_inside), ("s3", s3),
                 ("s1", ClockRegion((2, 0), ())), ("s1", ClockRegion((3, 0), ()))]:
        assert node in ra.index
    k0, k1, k3 = ra.index[("s0", zero)], ra.index[("s1", s1_inside)], ra.index[("s3", s3)]
    assert ("a", k1) in ra.edges[k0]
    assert ("c", k3) in ra.edges[k1]


def test_unreachable_state_has_no_regions():
    a = TimedAutomaton.build(states=["s", "f", "lost"], initial=["s"], accepting=["f"],
                             clocks=["x"], transitions=[edge("s", "f", "$", "x<1"),
                                                        edge("lost", "f", "$")])
    ra = reachable_region_automaton(a)
    assert all(s != "lost" for s, _ in ra.nodes)


def test_no_transitions_means_no_edges():
    a = TimedAutomaton.build(states=["s"], initial=["s"], accepting=[], clocks=["x"], transitions=[])
    ra = build_region_automaton(a)
    assert all(not e for e in ra.edges)


def test_dump_lists_transitions(fig4):
    text = reachable_region_automaton(fig4).dump()
    assert "(s0, x=0, y=0) -a-> (s1, 0<x<1, y=0)" in text


def test_budget_and_env(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "123")
    assert default_cap() == 123
    with pytest.raises(PreprocessResourceExceeded):
        reachable_region_automaton(two_alternations(), RegionBudget(500))


def _cosimulate(automaton, ra, events, stamps):
    """Concrete BFS whose every step must be an edge of the region automaton."""
    clocks = automaton.clocks
    bounds = ra.bounds
    frontier = {(s, tuple(F(0) for _ in clocks)) for s in automaton.initial}
    now = F(0)
    for label, stamp in zip(events, stamps):
        nxt = set()
        for state, val in frontier:
            moved = tuple(v + stamp - now for v in val)
            src = ra.index[(state, region_of(val, bounds))]
            for tr in automaton.outgoing(state):
                if tr.label == label and tr.guard.holds(dict(zip(clocks, moved))):
                    after = tuple(F(0) if x in tr.resets else v for x, v in zip(clocks, moved))
                    dst = ra.index[(tr.target, region_of(after, bounds))]
                    assert (label, dst) in ra.edges[src]
                    nxt.add((tr.target, after))
        frontier = nxt
        now = stamp
    return any(s in automaton.accepting for s, _ in frontier)


@pytest.mark.parametrize("fixture", ["fig4", "case2", "case3", "wait2"])
def test_region_automaton_cosimulates(fixture, request):
    import random
    automaton = request.getfixturevalue(fixture)
    ra = build_region_automaton(automaton)
    labels = sorted(automaton.alphabet - {TERMINAL})
    rng = random.Random(7)
    for _ in range(150):
        n = rng.randint(0, 6)
        events = [rng.choice(labels) for _ in range(n)] + [TERMINAL]
        stamps, t = [], F(0)
        for _ in events:
            t += F(rng.randint(1, 12), 4)
            stamps.append(t)
        w = TimedWord.from_ticks(events, [int(s * 4) for s in stamps], 4, allow_terminal=True)
        assert _cosimulate(automaton, ra, events, stamps) == simulate(automaton, w)


def test_product_structure(fig4):
    p = product(fig4, fig4)
    assert len(p.states) == len(fig4.states) ** 2
    assert p.clocks == ("x", "y", "x'", "y'")


def test_product_with_universal_automaton_is_a(case3):
    labels = case3.alphabet
    top = TimedAutomaton.build(states=["u"], initial=["u"], accepting=["u"], clocks=[],
                               transitions=[edge("u", "u", c) for c in labels])
    p = product(case3, top)
    assert len(p.transitions) == len(case3.transitions)
    assert {(t.source[0], t.target[0], t.label) for t in p.transitions} == \
        {(t.source, t.target, t.label) for t in case3.transitions}


def test_product_preserves_language(fig4):
    import random
    p = product(fig4, fig4)
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(0, 5)
        events = [rng.choice("abcd") for _ in range(n)] + [TERMINAL]
        ticks, t = [], 0
        for _ in events:
            t += rng.randint(1, 8)
            ticks.append(t)
        w = TimedWord.from_ticks(events, ticks, 4, allow_terminal=True)
        assert simulate(p, w) == simulate(fig4, w)


def _run(automaton, states_regions, labels):
    return RegionRun(tuple(states_regions), tuple(labels))


def test_pair_feasible_diagonal(fig4):
    ra = reachable_region_automaton(fig4)
    m, shortest = shortest_lengths(ra)
    accepted, per_state = prefix_run_sets(ra, m, shortest)
    checker = PairChecker(fig4)
    for runs in per_state.values():
        for r in runs:
            assert checker.feasible(r, r)


def test_pair_infeasible_on_conflicting_gaps(case3):
    zero = ClockRegion((0,), ())
    quick = ClockRegion((0,), ())
    r_fast = _run(case3, [("s0", zero), ("s1", zero), ("s2", quick)], ["a", "a"])
    r_other = _run(case3, [("s0", zero), ("s1", zero), ("s2", quick)], ["a", "a"])
    assert pair_feasible(case3, r_fast, r_other)
    # the same slot cannot be both a quick step and a long gap
    slow = _run(case3, [("s4", zero), ("s5", zero), ("s6", zero)], ["a", "a"])
    fast = _run(case3, [("s4", zero), ("s5", zero), ("s5", zero)], ["a", "a"])
    assert not pair_feasible(case3, slow, fast)


def test_pair_label_mismatch(fig4):
    zero = ClockRegion((0, 0), ())
    a = _run(fig4, [("s0", zero), ("s1", zero)], ["a"])
    b = _run(fig4, [("s0", zero), ("s1", zero)], ["b"])
    assert not pair_feasible(fig4, a, b)
    assert not pair_feasible(fig4, a, _run(fig4, [("s0", zero)], []))


def _follows(automaton, run, stamps):
    """Whether the timed word ``stamps`` drives ``automaton`` through exactly ``run``."""
    clocks = automaton.clocks
    bounds = [automaton.max_constants()[x] for x in clocks]
    val = tuple(F(0) for _ in clocks)
    if region_of(val, bounds) != run.nodes[0][1]:
        return False
    now = F(0)
    for k, label in enumerate(run.labels):
        moved = tuple(v + stamps[k] - now for v in val)
        now = stamps[k]
        src, (dst, want) = run.nodes[k][0], run.nodes[k + 1]
        options = [tr for tr in automaton.outgoing(src)
                   if tr.label == label and tr.target == dst and tr.guard.holds(dict(zip(clocks, moved)))]
        if not options:
            return False
        tr = options[0]
        val = tuple(F(0) if x in tr.resets else v for x, v in zip(clocks, moved))
        if region_of(val, bounds) != want:
            return False
    return True


def _initial_runs(ra, length):
    paths = [((k,), ()) for k in ra.initial]
    for _ in range(length - 1):
        paths = [(p + (d,), ls + (label,)) for p, ls in paths for label, d in ra.edges[p[-1]]]
    return [RegionRun(tuple(ra.nodes[k] for k in p), ls) for p, ls in paths]


@pytest.mark.parametrize("fixture", ["fig4", "case2", "case3", "wait2"])
def test_pair_feasible_has_witness(fixture, request):
    automaton = request.getfixturevalue(fixture)
    ra = reachable_region_automaton(automaton)
    runs = _initial_runs(ra, 3)
    checker = PairChecker(automaton)
    grid = [F(k, 6) for k in range(1, 19)]
    stamp_pairs = [(a, b) for a in grid for b in grid if b > a]
    for r1 in runs:
        for r2 in runs:
            if r1.labels != r2.labels:
                continue
            witness = any(_follows(automaton, r1, s) and _follows(automaton, r2, s)
                          for s in stamp_pairs)
            assert checker.feasible(r1, r2) == witness
