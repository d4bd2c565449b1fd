"""Timed automata with conjunctive integer guards and a concrete simulator."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from timedmatch.core.words import TERMINAL, TimedWord
from timedmatch.errors import InvalidAutomaton, ParseError, UnknownLabel

OPS = ("<", ">", "<=", ">=")


@dataclass(frozen=True, order=True)
class Atom:
    """A single bound ``clock op const``."""

    clock: str
    op: str
    const: int

    def __post_init__(self):
        if self.op not in OPS:
            raise InvalidAutomaton(f"unknown comparison {self.op!r}")
        if not isinstance(self.const, int) or isinstance(self.const, bool) or self.const < 0:
            raise InvalidAutomaton(f"guard constant must be a natural number, got {self.const!r}")

    def holds(self, value) -> bool:
        c = self.const
        if self.op == "<":
            return value < c
        if self.op == ">":
            return value > c
        if self.op == "<=":
            return value <= c
        return value >= c

    def __str__(self) -> str:
        return f"{self.clock}{self.op}{self.const}"


_ATOM_RE = re.compile(r"^\s*([A-Za-z_][\w']*)\s*(<=|>=|==|=|<|>)\s*(\d+)\s*$")
_REVERSED_RE = re.compile(r"^\s*(\d+)\s*(<=|>=|==|=|<|>)\s*([A-Za-z_][\w']*)\s*$")
_FLIP = {"<": ">", ">": "<", "<=": ">=", ">=": "<=", "=": "=", "==": "=="}


@dataclass(frozen=True)
class ClockConstraint:
    """A conjunction of atoms; the empty conjunction is ``true``."""

    atoms: tuple[Atom, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "ClockConstraint":
        """Parse ``"x<1 && y=1"`` style text.  ``=`` expands to two atoms."""
        text = text.strip()
        if text in ("", "true"):
            return cls()
        atoms: list[Atom] = []
        for part in re.split(r"&&|,|\band\b|∧", text):
            m = _ATOM_RE.match(part)
            if m:
                clock, op, const = m.group(1), m.group(2), int(m.group(3))
            else:
                m = _REVERSED_RE.match(part)
                if not m:
                    raise ParseError(f"cannot parse guard atom {part!r}")
                clock, op, const = m.group(3), _FLIP[m.group(2)], int(m.group(1))
            if op in ("=", "=="):
                atoms += [Atom(clock, "<=", const), Atom(clock, ">=", const)]
            else:
                atoms.append(Atom(clock, op, const))
        return cls(tuple(atoms))

    @property
    def clocks(self) -> frozenset[str]:
        return frozenset(a.clock for a in self.atoms)

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return all(a.holds(valuation[a.clock]) for a in self.atoms)

    def __and__(self, other: "ClockConstraint") -> "ClockConstraint":
        return ClockConstraint(self.atoms + other.atoms)

    def __str__(self) -> str:
        return " && ".join(map(str, self.atoms)) or "true"


TRUE = ClockConstraint()


@dataclass(frozen=True)
class Transition:
    source: Hashable
    target: Hashable
    label: str
    guard: ClockConstraint = TRUE
    resets: frozenset[str] = frozenset()


def edge(source, target, label: str, guard: str | ClockConstraint = "true",
         resets: Iterable[str] = ()) -> Transition:
    """Shorthand used by fixtures: guards may be given as text."""
    if isinstance(guard, str):
        guard = ClockConstraint.parse(guard)
    return Transition(source, target, label, guard, frozenset(resets))


@dataclass(frozen=True)
class TimedAutomaton:
    alphabet: frozenset[str]
    states: tuple[Hashable, ...]
    initial: frozenset[Hashable]
    accepting: frozenset[Hashable]
    clocks: tuple[str, ...]
    transitions: tuple[Transition, ...]
    _out: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        states = set(self.states)
        if len(states) != len(self.states):
            raise InvalidAutomaton("duplicate state names")
        if len(set(self.clocks)) != len(self.clocks):
            raise InvalidAutomaton("duplicate clock names")
        if not self.initial <= states or not self.accepting <= states:
            raise InvalidAutomaton("initial and accepting states must be states")
        clocks = set(self.clocks)
        for tr in self.transitions:
            if tr.source not in states or tr.target not in states:
                raise InvalidAutomaton(f"transition {tr} mentions an unknown state")
            if tr.label not in self.alphabet:
                raise InvalidAutomaton(f"label {tr.label!r} is not in the alphabet")
            if not tr.guard.clocks <= clocks or not tr.resets <= clocks:
                raise InvalidAutomaton(f"transition {tr} mentions an unknown clock")
        for tr in self.transitions:
            self._out.setdefault(tr.source, []).append(tr)

    @classmethod
    def build(cls, *, states: Sequence, initial: Iterable, accepting: Iterable,
              clocks: Sequence[str], transitions: Sequence[Transition],
              alphabet: Iterable[str] | None = None) -> "TimedAutomaton":
        labels = {tr.label for tr in transitions}
        sigma = frozenset(alphabet) | labels if alphabet is not None else frozenset(labels)
        return cls(sigma, tuple(states), frozenset(initial), frozenset(accepting),
                   tuple(clocks), tuple(transitions))

    def outgoing(self, state) -> list[Transition]:
        return self._out.get(state, [])

    def check_assumption(self) -> None:
        """Enforce the terminal-label discipline the matchers rely on.

        Every ``$`` edge must enter an accepting state, no other label may,
        and nothing may leave an accepting state.
        """
        for tr in self.transitions:
            if tr.source in self.accepting:
                raise InvalidAutomaton(f"transition leaves accepting state {tr.source!r}")
            if (tr.label == TERMINAL) != (tr.target in self.accepting):
                raise InvalidAutomaton(
                    f"edge {tr.source!r} -{tr.label}-> {tr.target!r} breaks the terminal-label rule")

    def max_constants(self) -> dict[str, int]:
        """Largest constant each clock is compared with; unused clocks get 0."""
        out = {x: 0 for x in self.clocks}
        for tr in self.transitions:
            for a in tr.guard.atoms:
                out[a.clock] = max(out[a.clock], a.const)
        return out


def simulate(automaton: TimedAutomaton, word: TimedWord) -> bool:
    """Decide membership by breadth-first search over concrete valuations.

    Valuations are kept as integer multiples of ``1/word.scale``, which is
    exact because every stamp lies on that grid.
    """
    clocks = automaton.clocks
    index = {x: k for k, x in enumerate(clocks)}
    scale = word.scale
    zero = (0,) * len(clocks)
    frontier = {(s, zero) for s in automaton.initial}
    now = 0
    for label, tick in zip(word.events, word.ticks):
        if label not in automaton.alphabet:
            raise UnknownLabel(f"label {label!r} is not in the automaton's alphabet")
        delay = tick - now
        now = tick
        nxt = set()
        for state, val in frontier:
            moved = tuple(v + delay for v in val)
            for tr in automaton.outgoing(state):
                if tr.label != label:
                    continue
                if not all(_compare(a.op, moved[index[a.clock]], a.const * scale)
                           for a in tr.guard.atoms):
                    continue
                if tr.resets:
                    reset = list(moved)
                    for x in tr.resets:
                        reset[index[x]] = 0
                    nxt.add((tr.target, tuple(reset)))
                else:
                    nxt.add((tr.target, moved))
        frontier = nxt
        if not frontier:
            return False
    return any(s in automaton.accepting for s, _ in frontier)


def _compare(op: str, a: int, b: int) -> bool:
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    return a >= b
