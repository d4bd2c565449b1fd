from fractions import Fraction

import pytest

from timedmatch.core.automaton import TimedAutomaton, edge
from timedmatch.core.zones import INF, Interval, MatchSet, Zone
from timedmatch.errors import OutOfOrderEvent, ReservedLabel, UnknownLabel
from timedmatch.naive import OnlineMatcher, match_offline, match_online
from timedmatch.wordgen import GenSpec, generate
from timedmatch.cases import case_automaton

from conftest import word


def test_case1_zone_appears_with_the_third_event(case1):
    m = OnlineMatcher(case1)
    assert m.feed("a", "1.0") == []
    assert m.feed("b", "2.0") == []
    emitted = m.feed("a", "3.0")
    assert MatchSet(emitted).equivalent(MatchSet([Zone(
        Interval.closed_open(0, 1), Interval.open_closed(2, 3), Interval.make(0, False, INF, False))]))
    assert m.finalize() == []
    assert m.events_seen == 3


def test_tail_appears_on_finalize(wait2):
    m = OnlineMatcher(wait2)
    assert m.feed("a", 1) == []
    tail = m.finalize()
    assert (0, 3) in MatchSet(tail)


def test_empty_stream_with_immediate_terminal():
    a = TimedAutomaton.build(states=["s", "f"], initial=["s"], accepting=["f"], clocks=[],
                             transitions=[edge("s", "f", "$")], alphabet=["a"])
    zones = MatchSet(OnlineMatcher(a).finalize())
    (z,) = zones.zones
    assert z.start == Interval.make(0, True, INF, False)
    assert z.end == Interval.make(0, False, INF, False)


def test_partial_results_cover_prefix(case3):
    w = generate(GenSpec(case=3, seed=5, length=400, rate=1.0))
    full = match_offline(w, case3)
    m = OnlineMatcher(case3)
    seen = []
    for k, (label, stamp) in enumerate(w, 1):
        seen.extend(m.feed(label, stamp))
        if k in (100, 250):
            prefix = MatchSet(seen)
            for z in full:
                cut = Zone(z.start, z.end & Interval.make(0, False, stamp, True), z.gap).normalize()
                if not cut.is_empty:
                    assert MatchSet([cut]).subsumed_by(prefix)
    seen.extend(m.finalize())
    assert MatchSet(seen).equivalent(full)


def test_rejects_out_of_order(case1):
    m = OnlineMatcher(case1)
    m.feed("a", 1)
    with pytest.raises(OutOfOrderEvent):
        m.feed("b", 1)


def test_rejects_bad_labels(case1):
    m = OnlineMatcher(case1)
    with pytest.raises(UnknownLabel):
        m.feed("z", 1)
    with pytest.raises(ReservedLabel):
        m.feed("$", 1)


@pytest.mark.parametrize("case, grid", [(1, 1), (2, 10000), (3, 1), (5, 1)])
def test_online_agrees_with_offline(case, grid):
    a = case_automaton(case)
    for seed in range(5):
        w = generate(GenSpec(case=case, seed=seed, length=120, rate=1.0, grid=grid))
        offline = match_offline(w, a)
        assert match_online(w, a).equivalent(offline)
        fractional = match_online(list(w), a)
        assert fractional.equivalent(offline)


def test_grid_mode_rejects_off_grid_stamps(case1):
    from timedmatch.errors import PreconditionViolation
    m = OnlineMatcher(case1, scale=10)
    with pytest.raises(PreconditionViolation):
        m.feed("a", Fraction(1, 3))
