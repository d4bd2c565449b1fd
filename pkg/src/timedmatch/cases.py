"""Reference pattern automata used by the benchmarks, tests and CLI."""

from __future__ import annotations

from timedmatch.core.automaton import TimedAutomaton, edge


def simple_sequence() -> TimedAutomaton:
    """``a`` then ``b`` then the end of the segment, with no timing constraint."""
    return TimedAutomaton.build(
        states=["s0", "s1", "s2", "s3"], initial=["s0"], accepting=["s3"], clocks=[],
        transitions=[edge("s0", "s1", "a"), edge("s1", "s2", "b"), edge("s2", "s3", "$")],
    )


def unit_separated() -> TimedAutomaton:
    """Two ``a`` events exactly one time unit apart, with anything around them."""
    return TimedAutomaton.build(
        states=["s0", "s1", "s2", "s3"], initial=["s0"], accepting=["s3"], clocks=["x", "y"],
        transitions=[
            edge("s0", "s0", "a", resets=["y"]),
            edge("s0", "s1", "a", "x=1"),
            edge("s1", "s1", "a"),
            edge("s1", "s2", "a", "y=1"),
            edge("s2", "s3", "$"),
        ],
    )


def burst_between_gaps() -> TimedAutomaton:
    """A long gap, at least five rapid ``a`` events, long gaps again, then one unit of quiet."""
    rapid = "0<x && x<1"
    return TimedAutomaton.build(
        states=[f"s{k}" for k in range(8)], initial=["s0"], accepting=["s7"], clocks=["x"],
        transitions=[
            edge("s0", "s1", "a", "x>1", ["x"]),
            edge("s1", "s2", "a", rapid, ["x"]),
            edge("s2", "s3", "a", rapid, ["x"]),
            edge("s3", "s4", "a", rapid, ["x"]),
            edge("s4", "s5", "a", rapid, ["x"]),
            edge("s5", "s5", "a", rapid, ["x"]),
            edge("s5", "s6", "a", "x>1", ["x"]),
            edge("s6", "s6", "a", "x>1", ["x"]),
            edge("s6", "s7", "$", "x=1"),
        ],
    )


def two_alternations(period: int = 10, window: int = 80) -> TimedAutomaton:
    """Two independent on/off alternations, every phase at most ``period`` long.

    Labels ``p``/``np`` switch the first signal on and off, ``q``/``nq`` the
    second.  The segment opens with both signals on, closes with both off,
    and lasts at most ``window``.  Clock ``z`` is never reset, so bounding it
    on every edge only prunes runs that could not finish inside the window.
    """
    both = f"z<={window}"
    states = ["p.q", "np.q", "p.nq", "np.nq", "done"]
    trans = []
    for first in ("p", "np"):
        for second in ("q", "nq"):
            here = f"{first}.{second}"
            flip1 = "np" if first == "p" else "p"
            flip2 = "nq" if second == "q" else "q"
            trans.append(edge(here, f"{flip1}.{second}", flip1, f"x<={period} && {both}", ["x"]))
            trans.append(edge(here, f"{first}.{flip2}", flip2, f"y<={period} && {both}", ["y"]))
    trans.append(edge("np.nq", "done", "$", f"x<={period} && y<={period} && {both}"))
    return TimedAutomaton.build(states=states, initial=["p.q"], accepting=["done"],
                                clocks=["x", "y", "z"], transitions=trans)


def long_high() -> TimedAutomaton:
    """A ``low`` sample followed by ``high`` samples lasting more than one time unit."""
    quick = "0<x && x<1"
    return TimedAutomaton.build(
        states=[f"s{k}" for k in range(8)], initial=["s0"], accepting=["s7"], clocks=["x"],
        transitions=[
            edge("s0", "s1", "low", resets=["x"]),
            edge("s1", "s2", "high", quick),
            edge("s2", "s3", "high", quick),
            edge("s3", "s4", "high", quick),
            edge("s4", "s5", "high", quick),
            edge("s5", "s5", "high"),
            edge("s5", "s6", "high", "x>1"),
            edge("s6", "s7", "$"),
        ],
    )


def two_clock_example() -> TimedAutomaton:
    """Small two-clock automaton with a self loop, used for preprocessing checks."""
    return TimedAutomaton.build(
        states=["s0", "s1", "s2", "s3", "s4"], initial=["s0"], accepting=["s4"], clocks=["x", "y"],
        transitions=[
            edge("s0", "s1", "a", resets=["y"]),
            edge("s1", "s2", "b", "y=1"),
            edge("s1", "s3", "c", "x<1"),
            edge("s3", "s1", "a", "y<1", ["y"]),
            edge("s2", "s3", "c", "x<1"),
            edge("s3", "s3", "d", "x>1"),
            edge("s3", "s4", "$", "x=1"),
        ],
    )


def wait_two() -> TimedAutomaton:
    """An ``a`` and then at least two time units before the segment ends."""
    return TimedAutomaton.build(
        states=["s0", "s1", "s2"], initial=["s0"], accepting=["s2"], clocks=["t"],
        transitions=[edge("s0", "s1", "a", resets=["t"]), edge("s1", "s2", "$", "t>=2")],
    )


CASES = {
    1: simple_sequence,
    2: unit_separated,
    3: burst_between_gaps,
    4: two_alternations,
    5: long_high,
}


def case_automaton(case: int) -> TimedAutomaton:
    return CASES[case]()
