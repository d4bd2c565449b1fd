"""Readers and writers for automaton files, word files and zone output."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

from timedmatch.core.automaton import Atom, ClockConstraint, TimedAutomaton, Transition
from timedmatch.core.words import TimedWord, as_rational, common_scale, format_rational
from timedmatch.core.zones import INF, Interval, Zone
from timedmatch.errors import InvalidAutomaton, ParseError, TimedMatchError

_OP_NAMES = {"<": "lt", ">": "gt", "<=": "le", ">=": "ge"}
_OP_PARSE = {"lt": "<", "gt": ">", "le": "<=", "ge": ">=",
             "<": "<", ">": ">", "<=": "<=", ">=": ">="}


# ---------------------------------------------------------------------------
# Automata
# ---------------------------------------------------------------------------

def _name(state) -> str:
    if isinstance(state, tuple):
        return "(" + ",".join(_name(s) for s in state) + ")"
    return str(state)


def automaton_to_dict(a: TimedAutomaton) -> dict:
    return {
        "alphabet": sorted(a.alphabet),
        "clocks": list(a.clocks),
        "states": [_name(s) for s in a.states],
        "initial": sorted(_name(s) for s in a.initial),
        "accepting": sorted(_name(s) for s in a.accepting),
        "transitions": [
            {
                "from": _name(t.source),
                "to": _name(t.target),
                "label": t.label,
                "guard": [{"clock": g.clock, "op": _OP_NAMES[g.op], "const": g.const}
                          for g in t.guard.atoms],
                "resets": sorted(t.resets),
            }
            for t in a.transitions
        ],
    }


def automaton_from_dict(data: dict) -> TimedAutomaton:
    try:
        trans = []
        for t in data["transitions"]:
            atoms = []
            for g in t.get("guard", []):
                op = _OP_PARSE.get(g["op"])
                if op is None:
                    raise ParseError(f"unknown guard operator {g['op']!r}")
                const = g["const"]
                if not isinstance(const, int) or isinstance(const, bool):
                    raise ParseError(f"guard constant {const!r} is not an integer")
                atoms.append(Atom(g["clock"], op, const))
            trans.append(Transition(t["from"], t["to"], t["label"],
                                    ClockConstraint(tuple(atoms)), frozenset(t.get("resets", []))))
        alphabet = frozenset(data.get("alphabet", [])) | {t.label for t in trans}
        return TimedAutomaton(alphabet, tuple(data["states"]), frozenset(data["initial"]),
                              frozenset(data["accepting"]), tuple(data.get("clocks", [])),
                              tuple(trans))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed automaton document: {exc}") from exc
    except InvalidAutomaton as exc:
        raise ParseError(str(exc)) from exc


def read_automaton(path: str | Path) -> TimedAutomaton:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return automaton_from_dict(data)


def write_automaton(a: TimedAutomaton, path: str | Path) -> None:
    Path(path).write_text(json.dumps(automaton_to_dict(a), indent=2) + "\n")


def automaton_digest(a: TimedAutomaton) -> str:
    """Content hash used to key preprocessing caches."""
    canon = automaton_to_dict(a)
    canon["transitions"] = sorted(canon["transitions"], key=lambda t: json.dumps(t, sort_keys=True))
    canon["states"] = sorted(canon["states"])
    blob = json.dumps(canon, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------

def parse_word(lines: Iterable[str]) -> TimedWord:
    """Parse ``label<TAB>stamp`` lines; blank lines and ``#`` comments are skipped."""
    events, stamps = [], []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected label<TAB>timestamp")
        try:
            stamps.append(as_rational(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"line {lineno}: bad timestamp {parts[1]!r}") from exc
        events.append(parts[0].strip())
    scale = common_scale(stamps)
    try:
        word = TimedWord.from_ticks(events, [int(q * scale) for q in stamps], scale)
    except TimedMatchError as exc:
        raise ParseError(str(exc)) from exc
    return word


def read_word(path: str | Path) -> TimedWord:
    with open(path) as fh:
        return parse_word(fh)


def write_word(word: TimedWord, out: TextIO) -> None:
    scale = word.scale
    if scale == 10 ** (len(str(scale)) - 1):
        digits = len(str(scale)) - 1
        for a, t in zip(word.events, word.ticks):
            whole, frac = divmod(t, scale)
            text = f"{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".") if digits else str(whole)
            out.write(f"{a}\t{text}\n")
    else:
        for a, t in zip(word.events, word.stamps):
            out.write(f"{a}\t{format_rational(t)}\n")


# ---------------------------------------------------------------------------
# Zones
# ---------------------------------------------------------------------------

def _bound(v) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return format_rational(Fraction(v))


def interval_to_dict(iv: Interval) -> dict:
    return {"lo": _bound(iv.lo), "lo_closed": iv.lo_closed,
            "hi": _bound(iv.hi), "hi_closed": iv.hi_closed}


def interval_from_dict(d: dict) -> Interval:
    def val(text: str):
        if text == "inf":
            return INF
        if text == "-inf":
            return -INF
        return as_rational(text)

    return Interval.make(val(d["lo"]), d["lo_closed"], val(d["hi"]), d["hi_closed"])


def zone_to_dict(z: Zone) -> dict:
    return {"t": interval_to_dict(z.start), "t_end": interval_to_dict(z.end),
            "gap": interval_to_dict(z.gap)}


def zone_from_dict(d: dict) -> Zone:
    return Zone(interval_from_dict(d["t"]), interval_from_dict(d["t_end"]),
                interval_from_dict(d["gap"]))


def write_zones(zones: Iterable[Zone], out: TextIO) -> None:
    """One JSON object per line."""
    for z in zones:
        out.write(json.dumps(zone_to_dict(z)) + "\n")


def read_zones(lines: Iterable[str]) -> list[Zone]:
    return [zone_from_dict(json.loads(line)) for line in lines if line.strip()]
