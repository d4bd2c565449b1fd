"""Timed words, timed automata, zones and the sampling oracle."""

from timedmatch.core.automaton import (
    TRUE,
    Atom,
    ClockConstraint,
    TimedAutomaton,
    Transition,
    edge,
    simulate,
)
from timedmatch.core.words import (
    TERMINAL,
    TimedWord,
    as_rational,
    concat_absorbing,
    concat_nonabsorbing,
    empty_word,
    format_rational,
    segment,
    shift,
    validate_word,
)
from timedmatch.core.zones import (
    EMPTY,
    EMPTY_ZONE,
    INF,
    Interval,
    MatchSet,
    Zone,
    zone_contains,
    zone_covered,
    zone_difference,
    zone_normalize,
    zone_set_covers,
)

__all__ = [
    "TRUE", "Atom", "ClockConstraint", "TimedAutomaton", "Transition", "edge", "simulate",
    "TERMINAL", "TimedWord", "as_rational", "concat_absorbing", "concat_nonabsorbing",
    "empty_word", "format_rational", "segment", "shift", "validate_word",
    "EMPTY", "EMPTY_ZONE", "INF", "Interval", "MatchSet", "Zone", "zone_contains",
    "zone_covered", "zone_difference", "zone_normalize", "zone_set_covers",
]
