"""Zone-based pattern matching without skipping: offline and online variants.

Both variants run the same configuration engine.  A configuration is a
state, the absolute time each clock was last reset (``None`` while a clock
has not been reset since the match start), and the interval of admissible
match starts.  Offline matching runs on the word's integer tick grid;
online matching uses the incoming ``Fraction`` stamps directly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from timedmatch.core.automaton import ClockConstraint, TimedAutomaton
from timedmatch.core.words import TERMINAL, TimedWord, as_rational
from timedmatch.core.zones import EMPTY, INF, Interval, MatchSet, Zone
from timedmatch.errors import OutOfOrderEvent, PreconditionViolation, ReservedLabel, UnknownLabel

LT, GT, LE, GE = 0, 1, 2, 3
_OPCODE = {"<": LT, ">": GT, "<=": LE, ">=": GE}

OPEN_POSITIVE = (0, False, INF, False)


# ---------------------------------------------------------------------------
# Reset maps and constraint solving (public, Fraction based)
# ---------------------------------------------------------------------------

def reset(rho: Mapping[str, Fraction], clock: str, t) -> dict[str, Fraction]:
    """Record that ``clock`` was reset at absolute time ``t``."""
    out = dict(rho)
    out[clock] = as_rational(t)
    return out


def eval_clocks(rho: Mapping[str, Fraction], clocks: Iterable[str], t, t0) -> dict[str, Fraction]:
    """Clock values at time ``t`` for a run that started at ``t0``."""
    t, t0 = as_rational(t), as_rational(t0)
    if t0 > t:
        raise PreconditionViolation("match start lies after the evaluation time")
    out = {}
    for x in clocks:
        r = rho.get(x)
        if r is None:
            out[x] = t - t0
        else:
            if not t0 <= r <= t:
                raise PreconditionViolation(f"reset time of {x} lies outside [{t0}, {t}]")
            out[x] = t - r
    return out


def sol_constr(start: Interval, end: Interval, rho: Mapping[str, Fraction],
               guard: ClockConstraint) -> Zone:
    """Pairs ``(t, t')`` with ``t`` in ``start``, ``t'`` in ``end`` whose clocks satisfy ``guard`` at ``t'``.

    Clocks reset since the start constrain ``t'`` alone; the others
    measure ``t' - t``.  The zone is returned as built, not normalized.
    """
    if start.is_empty or end.is_empty:
        return Zone(start, end, Interval.make(0, False, INF, False))
    order = sorted({a.clock for a in guard.atoms} | set(rho))
    index = {x: k for k, x in enumerate(order)}
    rho_t = tuple(rho.get(x) for x in order)
    compiled = tuple((index[a.clock], _OPCODE[a.op], a.const) for a in guard.atoms)
    built = _solve(start.as_tuple(), end.as_tuple(), rho_t, compiled)
    if built is None:
        return Zone(start, end, EMPTY)
    return _zone(built)


# ---------------------------------------------------------------------------
# Tuple-level engine
# ---------------------------------------------------------------------------

def _narrow(span, rho, tau, guard):
    """Starts in ``span`` whose clocks at ``tau`` satisfy ``guard``; None if none."""
    lo, lc, hi, hc = span
    for k, op, c in guard:
        r = rho[k]
        if r is not None:
            v = tau - r
            if op == LT:
                if not v < c:
                    return None
            elif op == GT:
                if not v > c:
                    return None
            elif op == LE:
                if not v <= c:
                    return None
            elif not v >= c:
                return None
        else:
            b = tau - c
            if op == LT:
                if b > lo or (b == lo and lc):
                    lo, lc = b, False
            elif op == LE:
                if b > lo:
                    lo, lc = b, True
            elif op == GT:
                if b < hi or (b == hi and hc):
                    hi, hc = b, False
            elif b < hi:
                hi, hc = b, True
    if lo > hi or (lo == hi and not (lc and hc)):
        return None
    return (lo, lc, hi, hc)


def _solve(start, end, rho, guard):
    """Tuple form of :func:`sol_constr`; None when a component is empty."""
    elo, elc, ehi, ehc = end
    glo, glc, ghi, ghc = OPEN_POSITIVE
    for k, op, c in guard:
        r = rho[k]
        if r is not None:
            b = r + c
            if op == LT:
                if b < ehi or (b == ehi and ehc):
                    ehi, ehc = b, False
            elif op == LE:
                if b < ehi:
                    ehi, ehc = b, True
            elif op == GT:
                if b > elo or (b == elo and elc):
                    elo, elc = b, False
            elif b > elo:
                elo, elc = b, True
        else:
            if op == LT:
                if c < ghi or (c == ghi and ghc):
                    ghi, ghc = c, False
            elif op == LE:
                if c < ghi:
                    ghi, ghc = c, True
            elif op == GT:
                if c > glo or (c == glo and glc):
                    glo, glc = c, False
            elif c > glo:
                glo, glc = c, True
    if elo > ehi or (elo == ehi and not (elc and ehc)):
        return None
    if glo > ghi or (glo == ghi and not (glc and ghc)):
        return None
    return (start, (elo, elc, ehi, ehc), (glo, glc, ghi, ghc))


def _cap(span, lo, lc, hi, hc):
    """Intersect a tuple interval with another; None when empty."""
    slo, slc, shi, shc = span
    if lo > slo:
        slo, slc = lo, lc
    elif lo == slo:
        slc = slc and lc
    if hi < shi:
        shi, shc = hi, hc
    elif hi == shi:
        shc = shc and hc
    if slo > shi or (slo == shi and not (slc and shc)):
        return None
    return (slo, slc, shi, shc)


def _union(spans):
    """Maximal disjoint intervals covering ``spans``, in increasing order."""
    spans = sorted(spans, key=lambda s: (s[0], not s[1]))
    out = [spans[0]]
    for lo, lc, hi, hc in spans[1:]:
        plo, plc, phi, phc = out[-1]
        if lo < phi or (lo == phi and (phc or lc)):
            if hi > phi or (hi == phi and hc):
                out[-1] = (plo, plc, hi, hc)
        else:
            out.append((lo, lc, hi, hc))
    return out


def _zone(built) -> Zone:
    s, e, g = built
    return Zone(Interval.make(*s), Interval.make(*e), Interval.make(*g))


def _plus(a, b):
    return (a[0] + b[0], a[1] and b[1], a[2] + b[2], a[3] and b[3])


def _minus(a, b):
    return (a[0] - b[2], a[1] and b[3], a[2] - b[0], a[3] and b[1])


def normalize_built(built):
    """Tuple form of :meth:`Zone.normalize`; None for an empty zone."""
    s, e, g = built
    for _ in range(4):
        s2 = _cap(s, *_minus(e, g))
        if s2 is None:
            return None
        e2 = _cap(e, *_plus(s2, g))
        if e2 is None:
            return None
        g2 = _cap(g, *_minus(e2, s2))
        if g2 is None:
            return None
        if s2 == s and e2 == e and g2 == g:
            break
        s, e, g = s2, e2, g2
    return (s, e, g)


def finish_zones(raw, scale: int = 1) -> MatchSet:
    """Normalize raw tuple zones on a ``1/scale`` grid into a :class:`MatchSet`."""
    tight = set()
    for built in set(raw):
        z = normalize_built(built)
        if z is not None:
            tight.add(z)
    return MatchSet.from_grid(tight, scale)


class Engine:
    """An automaton compiled for matching on a fixed time unit.

    ``unit`` multiplies every guard constant, so offline matching on a
    ``1/scale`` tick grid passes ``unit=scale``.
    """

    def __init__(self, automaton: TimedAutomaton, unit: int = 1):
        automaton.check_assumption()
        self.automaton = automaton
        self.unit = unit
        self.state_index = {s: k for k, s in enumerate(automaton.states)}
        self.clock_index = {x: k for k, x in enumerate(automaton.clocks)}
        self.empty_rho = (None,) * len(automaton.clocks)
        self.initial = sorted(self.state_index[s] for s in automaton.initial)
        self.trans: dict[tuple[int, str], list] = {}
        self.dollar: dict[int, list] = {}
        for tr in automaton.transitions:
            src = self.state_index[tr.source]
            guard = self.compile_guard(tr.guard)
            if tr.label == TERMINAL:
                self.dollar.setdefault(src, []).append(guard)
            else:
                resets = tuple(sorted(self.clock_index[x] for x in tr.resets))
                self.trans.setdefault((src, tr.label), []).append(
                    (self.state_index[tr.target], guard, resets))
        self.immediate = [g for s in self.initial for g in self.dollar.get(s, ())]

    def compile_guard(self, guard: ClockConstraint):
        u = self.unit
        return tuple((self.clock_index[a.clock], _OPCODE[a.op], a.const * u) for a in guard.atoms)

    def check_labels(self, events: Iterable[str]) -> None:
        seen = set(events)
        if TERMINAL in seen:
            raise ReservedLabel("input words may not contain the terminal label")
        unknown = seen - self.automaton.alphabet
        if unknown:
            raise UnknownLabel(f"labels {sorted(unknown)} are not in the automaton's alphabet")

    def step(self, confs: dict, tau, label) -> dict:
        """Read one event at absolute time ``tau``; merge starts per (state, resets, tag)."""
        trans = self.trans
        nxt: dict = {}
        for (s, rho, tag), spans in confs.items():
            edges = trans.get((s, label))
            if edges is None:
                continue
            for dst, guard, resets in edges:
                if resets:
                    r2 = list(rho)
                    for k in resets:
                        r2[k] = tau
                    r2 = tuple(r2)
                else:
                    r2 = rho
                key = (dst, r2, tag)
                for span in spans:
                    got = _narrow(span, rho, tau, guard) if guard else span
                    if got is not None:
                        bucket = nxt.get(key)
                        if bucket is None:
                            nxt[key] = [got]
                        elif got not in bucket:
                            bucket.append(got)
        for key, spans in nxt.items():
            if len(spans) > 1:
                nxt[key] = _union(spans)
        return nxt

    def emit(self, confs: dict, window, out: list) -> None:
        """Append the zones obtained by closing each configuration with ``$`` in ``window``."""
        dollar = self.dollar
        for (s, rho, _tag), spans in confs.items():
            guards = dollar.get(s)
            if guards is None:
                continue
            for guard in guards:
                for span in spans:
                    built = _solve(span, window, rho, guard)
                    if built is not None:
                        out.append(built)

    def initial_confs(self, span, tag) -> dict:
        return {(s, self.empty_rho, tag): [span] for s in self.initial}

    def scan(self, ticks: Sequence, labels: Sequence, i: int, out: list):
        """Run every match that starts in slot ``i``.

        ``ticks`` and ``labels`` are 1-based (index 0 holds time 0).  Returns
        the last non-empty configuration set and the index one past the last
        event read.
        """
        n = len(ticks) - 1
        curr = self.initial_confs((ticks[i - 1], True, ticks[i], False), 0)
        last = curr
        j = i
        step, emit, dollar = self.step, self.emit, self.dollar
        while curr and j <= n:
            tau = ticks[j]
            nxt = step(curr, tau, labels[j])
            if nxt:
                if dollar:
                    window = (tau, False, ticks[j + 1], True) if j < n else (tau, False, INF, False)
                    emit(nxt, window, out)
                last = nxt
            curr = nxt
            j += 1
        return last, j

    def immediate_zones(self, ticks: Sequence, out: list) -> None:
        """Matches whose segment holds no event: one clipped copy per slot."""
        if not self.immediate:
            return
        base = [_solve((0, True, INF, False), OPEN_POSITIVE, self.empty_rho, g)
                for g in self.immediate]
        base = [b for b in base if b is not None]
        n = len(ticks) - 1
        for i in range(1, n + 2):
            lo = ticks[i - 1]
            hi = ticks[i] if i <= n else INF
            for s, e, g in base:
                s2 = _cap(s, lo, True, hi, False)
                e2 = _cap(e, lo, False, hi, i <= n)
                if s2 is not None and e2 is not None:
                    out.append((s2, e2, g))


def word_grid(word: TimedWord) -> tuple[list, list]:
    """1-based ticks and labels with a leading time-zero sentinel."""
    return [0, *word.ticks], [None, *word.events]


def match_offline(word: TimedWord, automaton: TimedAutomaton) -> MatchSet:
    """All ``(t, t')`` whose segment is accepted, by exhaustive backward scan."""
    eng = Engine(automaton, word.scale)
    eng.check_labels(word.events)
    ticks, labels = word_grid(word)
    out: list = []
    eng.immediate_zones(ticks, out)
    for i in range(len(word), 0, -1):
        eng.scan(ticks, labels, i, out)
    return finish_zones(out, word.scale)


class OnlineMatcher:
    """Incremental matcher: feed events in order, collect zones as they become final.

    After events up to ``tau_n`` have been fed, every match with
    ``t' <= tau_n`` has been returned by some :meth:`feed` call.  When
    every stamp is known to be a multiple of ``1/scale``, passing ``scale``
    keeps the arithmetic on integers.
    """

    def __init__(self, automaton: TimedAutomaton, scale: int | None = None):
        self._scale = scale or 1
        self._grid = scale is not None
        self._eng = Engine(automaton, self._scale)
        self._confs: dict = {}
        self._now = 0
        self._count = 0
        self._closed = False

    @property
    def events_seen(self) -> int:
        return self._count

    def _to_unit(self, stamp):
        q = as_rational(stamp)
        if not self._grid:
            return q
        ticks = q * self._scale
        if ticks.denominator != 1:
            raise PreconditionViolation(f"stamp {q} is not a multiple of 1/{self._scale}")
        return ticks.numerator

    def feed(self, label: str, stamp) -> list[Zone]:
        if self._closed:
            raise PreconditionViolation("matcher already finalized")
        tau = self._to_unit(stamp)
        if label == TERMINAL:
            raise ReservedLabel("input words may not contain the terminal label")
        if label not in self._eng.automaton.alphabet:
            raise UnknownLabel(f"label {label!r} is not in the automaton's alphabet")
        if tau <= self._now:
            raise OutOfOrderEvent(f"stamp {stamp} does not exceed the previous one")
        self._count += 1
        eng = self._eng
        confs = self._confs
        confs.update(eng.initial_confs((self._now, True, tau, False), self._count))
        out: list = []
        eng.emit(confs, (self._now, False, tau, True), out)
        self._confs = eng.step(confs, tau, label)
        self._now = tau
        return list(finish_zones(out, self._scale))

    def finalize(self) -> list[Zone]:
        """Matches whose ``t'`` lies after the last event."""
        if self._closed:
            return []
        self._closed = True
        eng = self._eng
        confs = self._confs
        confs.update(eng.initial_confs((self._now, True, INF, False), self._count + 1))
        out: list = []
        eng.emit(confs, (self._now, False, INF, False), out)
        self._confs = {}
        return list(finish_zones(out, self._scale))


def match_online(events: Iterable[tuple[str, object]], automaton: TimedAutomaton) -> MatchSet:
    """Drive an :class:`OnlineMatcher` over ``events`` and collect everything.

    A :class:`TimedWord` is streamed on its own tick grid.
    """
    m = OnlineMatcher(automaton, events.scale if isinstance(events, TimedWord) else None)
    zones: list[Zone] = []
    for label, stamp in events:
        zones.extend(m.feed(label, stamp))
    zones.extend(m.finalize())
    return MatchSet.from_normalized(zones)
