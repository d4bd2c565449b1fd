import io
import json
from fractions import Fraction

import pytest

from timedmatch.cases import CASES, two_clock_example
from timedmatch.codecs import (
    automaton_digest,
    automaton_from_dict,
    automaton_to_dict,
    parse_word,
    read_zones,
    write_word,
    write_zones,
)
from timedmatch.core.zones import INF, Interval, Zone
from timedmatch.errors import ParseError
from timedmatch.naive import match_offline
from timedmatch.wordgen import GenSpec, generate


@pytest.mark.parametrize("case", sorted(CASES))
def test_automaton_round_trip(case):
    a = CASES[case]()
    back = automaton_from_dict(json.loads(json.dumps(automaton_to_dict(a))))
    assert automaton_to_dict(back) == automaton_to_dict(a)
    assert automaton_digest(back) == automaton_digest(a)


def test_digest_distinguishes_automata():
    assert len({automaton_digest(f()) for f in CASES.values()}) == len(CASES)


def test_bad_guard_operator():
    d = automaton_to_dict(two_clock_example())
    d["transitions"][1]["guard"][0]["op"] = "eq"
    with pytest.raises(ParseError):
        automaton_from_dict(d)


def test_malformed_documents():
    with pytest.raises(ParseError):
        automaton_from_dict({"states": []})
    d = automaton_to_dict(two_clock_example())
    d["transitions"][0]["to"] = "nowhere"
    with pytest.raises(ParseError):
        automaton_from_dict(d)


def test_word_round_trip():
    w = generate(GenSpec(case=5, seed=1, length=200))
    buf = io.StringIO()
    write_word(w, buf)
    assert parse_word(io.StringIO(buf.getvalue())) == w


def test_word_parsing_accepts_fractions_and_comments():
    w = parse_word(["# header\n", "a\t1/3\n", "\n", "b 0.5\n"])
    assert w.stamps == (Fraction(1, 3), Fraction(1, 2))
    buf = io.StringIO()
    write_word(w, buf)
    assert buf.getvalue() == "a\t1/3\nb\t0.5\n"


@pytest.mark.parametrize("lines", [["a\t1\tx\n"], ["a\tone\n"], ["a\t2\n", "b\t1\n"], ["$\t1\n"]])
def test_word_parse_errors(lines):
    with pytest.raises(ParseError):
        parse_word(lines)


def test_zone_round_trip():
    z = Zone(Interval.closed_open(0, Fraction(1, 3)), Interval.make(2, False, INF, False),
             Interval.make(Fraction(5, 2), True, INF, False))
    buf = io.StringIO()
    write_zones([z], buf)
    record = json.loads(buf.getvalue())
    assert record["t_end"]["hi"] == "inf" and record["t"]["hi"] == "1/3"
    assert read_zones(io.StringIO(buf.getvalue())) == [z]


def test_matcher_output_round_trips():
    a = CASES[3]()
    zones = match_offline(generate(GenSpec(case=3, seed=0, length=2000, rate=0.5)), a)
    buf = io.StringIO()
    write_zones(zones, buf)
    assert tuple(read_zones(io.StringIO(buf.getvalue()))) == zones.zones
