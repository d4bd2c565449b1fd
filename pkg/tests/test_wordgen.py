import math
from fractions import Fraction

import pytest

from timedmatch.core.words import validate_word
from timedmatch.errors import InvalidParams
from timedmatch.wordgen import GenSpec, generate


def gaps(w):
    stamps = (Fraction(0),) + w.stamps
    return [b - a for a, b in zip(stamps, stamps[1:])]


def test_case1_alternates():
    w = generate(GenSpec(case=1, seed=3, length=20))
    assert len(w) == 20
    assert w.events == tuple("ab" * 10)
    assert all(0 < g < 2 for g in gaps(w))


def test_case2_gaps_below_a_tenth():
    w = generate(GenSpec(case=2, seed=4, length=2000))
    assert all(0 < g < Fraction(1, 10) for g in gaps(w))


def test_case3_length_follows_rate():
    lam, duration = 0.5, 10_000
    w = generate(GenSpec(case=3, seed=9, duration=duration, rate=lam))
    assert abs(len(w) - lam * duration) <= 3 * math.sqrt(lam * duration)
    assert w.stamps[-1] <= duration


def test_case4_each_signal_alternates():
    w = generate(GenSpec(case=4, seed=1, length=500, rate=0.2))
    for on, off in (("p", "np"), ("q", "nq")):
        seq = [e for e in w.events if e in (on, off)]
        assert all(a != b for a, b in zip(seq, seq[1:]))
        assert seq[0] == off


def test_case5_labels():
    w = generate(GenSpec(case=5, seed=2, length=1000))
    assert set(w.events) == {"high", "low"}


@pytest.mark.parametrize("case", [1, 2, 3, 4, 5])
def test_reproducible_and_valid(case):
    spec = GenSpec(case=case, seed=42, length=300)
    a, b = generate(spec), generate(spec)
    assert a == b and a.ticks == b.ticks
    assert validate_word(a.events, a.stamps) == a
    assert generate(GenSpec(case=case, seed=43, length=300)) != a


def test_coarse_grid():
    w = generate(GenSpec(case=2, seed=0, length=200, grid=10_000))
    assert all((g * 100).denominator == 1 for g in gaps(w))


@pytest.mark.parametrize("spec", [
    GenSpec(case=3, length=10, rate=0),
    GenSpec(case=3, length=10, rate=-1),
    GenSpec(case=6, length=10),
    GenSpec(case=1),
    GenSpec(case=1, length=-1),
    GenSpec(case=1, duration=0),
    GenSpec(case=5, length=10, drift=1.0),
    GenSpec(case=2, length=10, grid=100_000),
])
def test_invalid_params(spec):
    with pytest.raises(InvalidParams):
        generate(spec)
