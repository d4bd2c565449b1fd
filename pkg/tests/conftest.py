from __future__ import annotations

import pytest

from timedmatch.cases import (
    burst_between_gaps,
    long_high,
    simple_sequence,
    two_clock_example,
    unit_separated,
    wait_two,
)
from timedmatch.core.words import validate_word


def word(events, stamps, allow_terminal=False):
    return validate_word(list(events), [str(s) for s in stamps], allow_terminal=allow_terminal)


@pytest.fixture
def case1():
    return simple_sequence()


@pytest.fixture
def case2():
    return unit_separated()


@pytest.fixture
def case3():
    return burst_between_gaps()


@pytest.fixture
def case5():
    return long_high()


@pytest.fixture
def fig4():
    return two_clock_example()


@pytest.fixture
def wait2():
    return wait_two()
