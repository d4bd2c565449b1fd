import random
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from timedmatch.boyer_moore import match_bm, preprocess, unsafe_skips
from timedmatch.core.automaton import simulate
from timedmatch.core.oracle import sample_oracle_check
from timedmatch.core.words import (
    TERMINAL,
    TimedWord,
    concat_absorbing,
    concat_nonabsorbing,
    segment,
    shift,
    validate_word,
)
from timedmatch.core.zones import INF, Interval, Zone
from timedmatch.errors import NoAcceptedWord
from timedmatch.naive import match_offline, match_online

from randomized import random_automaton, random_word

gaps = st.lists(st.fractions(min_value=Fraction(1, 8), max_value=3, max_denominator=8),
                min_size=0, max_size=12)


def build(gs, labels="ab"):
    stamps, t = [], Fraction(0)
    for g in gs:
        t += g
        stamps.append(t)
    return validate_word([labels[k % len(labels)] for k in range(len(gs))], stamps)


def increasing(w):
    return all(a < b for a, b in zip(w.stamps, w.stamps[1:])) and (not w.stamps or w.stamps[0] > 0)


@given(gaps, st.fractions(min_value=0, max_value=40, max_denominator=8),
       st.fractions(min_value=Fraction(1, 8), max_value=10, max_denominator=8))
def test_segment_shape(gs, t, length):
    w = build(gs)
    seg = segment(w, t, t + length)
    assert increasing(seg)
    assert seg.events[-1] == TERMINAL and TERMINAL not in seg.events[:-1]
    assert seg.stamps[-1] == length
    assert len(seg) - 1 == sum(t < s < t + length for s in w.stamps)


@given(gaps, gaps, st.fractions(min_value=0, max_value=5, max_denominator=8))
def test_shift_and_concat_keep_order(g1, g2, d):
    w1, w2 = build(g1), build(g2)
    assert increasing(shift(w1, d))
    assert increasing(concat_nonabsorbing(w1, w2))
    if w2.stamps:
        assert increasing(concat_absorbing(w1, shift(w2, w1.duration)))


bounds = st.fractions(min_value=0, max_value=6, max_denominator=4)


@st.composite
def intervals(draw):
    lo = draw(bounds)
    hi = draw(st.one_of(st.just(INF), bounds))
    return Interval.make(lo, draw(st.booleans()), hi, draw(st.booleans()))


@given(intervals(), intervals(), intervals())
def test_normalize_keeps_membership(a, b, c):
    z = Zone(a, b, c)
    n = z.normalize()
    pts = [Fraction(k, 8) for k in range(0, 60, 3)]
    for t in pts:
        for tp in pts:
            assert ((t, tp) in z) == ((t, tp) in n)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10**9))
def test_random_automata_matchers_agree(seed):
    rng = random.Random(seed)
    a = random_automaton(rng)
    w = random_word(rng, 12)
    naive = match_offline(w, a)
    assert match_online(w, a).equivalent(naive)
    assert sample_oracle_check(w, a, naive.zones, 150, seed).ok
    try:
        tables = preprocess(a, cap=200_000)
    except NoAcceptedWord:
        return
    trace = []
    assert match_bm(w, a, tables, trace=trace).equivalent(naive)
    assert unsafe_skips(w, a, trace, naive) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_simulate_ignores_how_time_is_scaled(seed):
    rng = random.Random(seed)
    a = random_automaton(rng)
    w = random_word(rng, 8)
    events = w.events + (TERMINAL,)
    stamps = list(w.stamps) + [w.duration + Fraction(rng.randint(1, 8), 4)]
    fine = validate_word(events, stamps, allow_terminal=True)
    coarse = TimedWord.from_ticks(events, [int(s * 12) for s in stamps], 12, allow_terminal=True)
    assert simulate(a, fine) == simulate(a, coarse)
