import pytest

from timedmatch.core.automaton import Atom, ClockConstraint, TimedAutomaton, edge, simulate
from timedmatch.errors import InvalidAutomaton, ParseError, UnknownLabel

from conftest import word


def terminal_word(events, stamps):
    return word(events, stamps, allow_terminal=True)


def test_guard_parsing():
    g = ClockConstraint.parse("x<1 && y=1")
    assert g.atoms == (Atom("x", "<", 1), Atom("y", "<=", 1), Atom("y", ">=", 1))
    assert ClockConstraint.parse("0<x").atoms == (Atom("x", ">", 0),)
    assert ClockConstraint.parse("true").atoms == ()


def test_guard_parse_error():
    with pytest.raises(ParseError):
        ClockConstraint.parse("x != 1")


def test_guard_constants_must_be_natural():
    with pytest.raises(InvalidAutomaton):
        Atom("x", "<", -1)


def test_structure_is_validated():
    with pytest.raises(InvalidAutomaton):
        TimedAutomaton.build(states=["s"], initial=["t"], accepting=[], clocks=[], transitions=[])
    with pytest.raises(InvalidAutomaton):
        TimedAutomaton.build(states=["s"], initial=["s"], accepting=[], clocks=[],
                             transitions=[edge("s", "s", "a", "x<1")])


def test_assumption_check(case1):
    case1.check_assumption()
    bad = TimedAutomaton.build(states=["s", "f"], initial=["s"], accepting=["f"], clocks=[],
                               transitions=[edge("s", "f", "a")])
    with pytest.raises(InvalidAutomaton):
        bad.check_assumption()
    leaving = TimedAutomaton.build(states=["s", "f"], initial=["s"], accepting=["f"], clocks=[],
                                   transitions=[edge("s", "f", "$"), edge("f", "s", "a")])
    with pytest.raises(InvalidAutomaton):
        leaving.check_assumption()


def test_max_constants(fig4, case1, wait2):
    assert fig4.max_constants() == {"x": 1, "y": 1}
    assert case1.max_constants() == {}
    assert wait2.max_constants() == {"t": 2}


def test_simulate_accepts_after_enough_delay(wait2):
    assert simulate(wait2, terminal_word(["a", "$"], ["0.5", "3.0"]))


def test_simulate_rejects_early_terminal(wait2):
    assert not simulate(wait2, terminal_word(["a", "$"], ["0.5", "1.0"]))


def test_simulate_empty_word_without_initial_acceptance(case1):
    assert not simulate(case1, word([], []))


def test_simulate_boundary_is_exact(case2):
    w = terminal_word(["a", "a", "a", "$"], ["0.5", "1", "1.5", "2"])
    # x = 1 at 1.0 and y = 1 at 1.5 (y reset at 0.5)
    assert simulate(case2, w)
    shifted = terminal_word(["a", "a", "a", "$"], ["0.5", "1.000001", "1.5", "2"])
    assert not simulate(case2, shifted)


def test_simulate_unknown_label(case1):
    with pytest.raises(UnknownLabel):
        simulate(case1, word("z", ["1"]))


def test_simulate_depends_only_on_gaps_from_origin(case3):
    events = ["a"] * 6 + ["$"]
    base = ["2", "2.5", "3", "3.5", "4", "5.5", "6.5"]
    assert simulate(case3, terminal_word(events, base))
    assert not simulate(case3, terminal_word(events, ["0.5", "1", "1.5", "2", "2.5", "4", "5"]))
