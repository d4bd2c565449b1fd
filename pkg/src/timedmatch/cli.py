"""Command-line entry point: ``timedmatch {match,preprocess,gen,check,bench}``.

Machine-readable output goes to stdout or ``--out``; logs go to stderr.
Exit codes: 0 success, 1 check failure, 2 bad input, 3 automaton breaks
the terminal-label rule, 4 region budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import statistics
import sys
import time
from contextlib import contextmanager

from timedmatch.boyer_moore import load_tables, match_bm, preprocess, unsafe_skips
from timedmatch.cases import CASES, case_automaton
from timedmatch.codecs import read_automaton, read_word, write_word, write_zones
from timedmatch.core.automaton import TimedAutomaton
from timedmatch.core.oracle import covers_many, sample_oracle_check, sample_pairs
from timedmatch.core.words import as_rational
from timedmatch.core.zones import Interval, MatchSet, Zone
from timedmatch.errors import (
    InvalidAutomaton,
    ParseError,
    PreprocessResourceExceeded,
    TimedMatchError,
)
from timedmatch.naive import OnlineMatcher, match_offline, match_online
from timedmatch.wordgen import GenSpec, generate

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_ASSUMPTION = 3
EXIT_RESOURCE = 4

log = logging.getLogger("timedmatch")


@contextmanager
def _output(path: str | None, newline: str | None = None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline=newline) as fh:
            yield fh


def _automaton(args) -> TimedAutomaton:
    if args.automaton is not None:
        a = read_automaton(args.automaton)
    elif args.case is not None:
        a = case_automaton(args.case)
    else:
        raise ParseError("give --automaton FILE or --case N")
    a.check_assumption()
    return a


def _add_automaton(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--automaton", help="automaton JSON file")
    g.add_argument("--case", type=int, choices=sorted(CASES), help="built-in benchmark automaton")


def _tables(automaton: TimedAutomaton, cache: str | None, cap: int | None):
    if cache:
        tables = load_tables(cache, automaton)
        if tables is not None:
            log.info("using cached skip tables from %s", cache)
            return tables, 0.0
    began = time.perf_counter()
    tables = preprocess(automaton, cap)
    elapsed = time.perf_counter() - began
    if cache:
        tables.save(cache, automaton)
    return tables, elapsed


# ---------------------------------------------------------------------------
# match
# ---------------------------------------------------------------------------

def _stream_lines(path: str):
    if path == "-":
        yield from sys.stdin
    else:
        with open(path) as fh:
            yield from fh


def _online(args, automaton: TimedAutomaton, out) -> int:
    matcher = OnlineMatcher(automaton)
    collected: list[Zone] = []
    began = time.perf_counter()
    for lineno, line in enumerate(_stream_lines(args.word), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected label<TAB>timestamp")
        try:
            stamp = as_rational(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"line {lineno}: bad timestamp {parts[1]!r}") from exc
        zones = matcher.feed(parts[0].strip(), stamp)
        if args.normalize:
            collected.extend(zones)
        elif zones:
            write_zones(zones, out)
            out.flush()
    tail = matcher.finalize()
    if args.normalize:
        collected.extend(tail)
        zones = MatchSet.from_normalized(collected).zones
    else:
        zones = tail
    write_zones(zones, out)
    out.flush()
    log.info("online: %d events, matching %.3f ms", matcher.events_seen,
             1000 * (time.perf_counter() - began))
    return EXIT_OK


def cmd_match(args) -> int:
    automaton = _automaton(args)
    with _output(args.out) as out:
        if args.algo == "online":
            return _online(args, automaton, out)
        word = read_word(args.word if args.word != "-" else "/dev/stdin")
        trace: list = []
        if args.algo == "bm":
            tables, prep = _tables(automaton, args.cache, args.cap)
            log.info("preprocessing %.3f ms (m=%d)", 1000 * prep, tables.m)
            began = time.perf_counter()
            zones = match_bm(word, automaton, tables, use_delta1=args.use_delta1, trace=trace)
        else:
            began = time.perf_counter()
            zones = match_offline(word, automaton)
        elapsed = time.perf_counter() - began
        write_zones(zones, out)
    log.info("%s: %d events, %d zones, matching %.3f ms", args.algo, len(word), len(zones),
             1000 * elapsed)
    if trace:
        skips = [s for _, s in trace]
        log.info("bm: %d slots visited, skips min %d mean %.2f max %d",
                 len(skips), min(skips), statistics.fmean(skips), max(skips))
    return EXIT_OK


# ---------------------------------------------------------------------------
# preprocess
# ---------------------------------------------------------------------------

def cmd_preprocess(args) -> int:
    automaton = _automaton(args)
    tables, elapsed = _tables(automaton, args.out, args.cap)
    report = {
        "m": tables.m,
        "shortest": {str(s): v for s, v in tables.shortest.items()},
        "per_state": {str(s): v for s, v in tables.per_state.items()},
        "region_nodes": tables.region_nodes,
        "preprocess_ms": round(1000 * elapsed, 3),
        "cached": elapsed == 0.0,
    }
    print(json.dumps(report, indent=1))
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = GenSpec(case=args.case, seed=args.seed, length=args.length, duration=args.duration,
                   rate=args.rate, grid=args.grid)
    word = generate(spec)
    with _output(args.out) as out:
        write_word(word, out)
    log.info("generated %d events for case %d", len(word), args.case)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _perturb(zones: MatchSet) -> MatchSet:
    """Self-test hook: drop one zone, or invent one when there is nothing to drop."""
    if len(zones):
        return MatchSet(zones.zones[1:])
    unit = Interval.make(0, True, 1, True)
    return MatchSet([Zone(unit, unit, Interval.make(0, False, 1, True))])


def cmd_check(args) -> int:
    automaton = _automaton(args)
    word = read_word(args.word)
    failures: list[dict] = []
    naive = match_offline(word, automaton)
    online = match_online(word, automaton)
    tables, _ = _tables(automaton, None, args.cap)
    trace: list = []
    bm = match_bm(word, automaton, tables, trace=trace)
    if args.inject_fault:
        bm = _perturb(bm)
    for name, other in (("online", online), ("bm", bm)):
        if not naive.equivalent(other):
            failures.append({"check": "equivalence", "algo": name,
                             "naive_zones": len(naive), "other_zones": len(other)})
    if args.samples > 0:
        ts, tps, unit = sample_pairs(word, list(naive) + list(bm) + list(online),
                                     args.samples, args.seed)
        ref = covers_many(naive.zones, ts, tps, unit)
        for name, other in (("online", online), ("bm", bm)):
            bad = int((covers_many(other.zones, ts, tps, unit) != ref).sum())
            if bad:
                failures.append({"check": "sampled_equivalence", "algo": name, "disagreements": bad})
    report = sample_oracle_check(word, automaton, bm.zones, args.samples, args.seed)
    for t, tp, accepted, covered in report.failures[:20]:
        failures.append({"check": "oracle", "t": str(t), "t_end": str(tp),
                         "simulate": accepted, "zones": covered})
    for i, skip, best in unsafe_skips(word, automaton, trace, naive):
        failures.append({"check": "skip_soundness", "slot": i, "skip": skip, "opt": best})
    summary = {"ok": not failures, "zones": len(naive), "samples": report.samples,
               "slots": len(trace), "failures": failures}
    print(json.dumps(summary, indent=1))
    return EXIT_OK if not failures else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

BENCH_COLUMNS = ("case", "length", "algo", "mean_match_ms", "preprocess_ms", "zones")


def _timed(fn, repeats: int) -> tuple[float, object]:
    times = []
    result = None
    for _ in range(repeats):
        began = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - began)
    return 1000 * statistics.fmean(times), result


def cmd_bench(args) -> int:
    automaton = case_automaton(args.case)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = set(algos) - {"naive", "online", "bm"}
    if unknown:
        raise ParseError(f"unknown algorithms: {', '.join(sorted(unknown))}")
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise ParseError(f"bad size list {args.sizes!r}") from exc
    tables, prep = (_tables(automaton, None, args.cap) if "bm" in algos else (None, 0.0))
    runners = {
        "naive": lambda w: match_offline(w, automaton),
        "online": lambda w: match_online(w, automaton),
        "bm": lambda w: match_bm(w, automaton, tables),
    }
    with _output(args.out, newline="") as out:
        writer = csv.writer(out)
        writer.writerow(BENCH_COLUMNS)
        for size in sizes:
            word = generate(GenSpec(case=args.case, seed=args.seed, length=size, rate=args.rate))
            for algo in algos:
                mean_ms, zones = _timed(lambda: runners[algo](word), args.repeats)
                writer.writerow([args.case, len(word), algo, f"{mean_ms:.3f}",
                                 f"{1000 * prep:.3f}" if algo == "bm" else "", len(zones)])
                out.flush()
                log.info("case %d |w|=%d %s: %.3f ms, %d zones", args.case, len(word), algo,
                         mean_ms, len(zones))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _positive(kind):
    def parse(text: str):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="timedmatch", description="Timed pattern matching")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--cap", type=_positive(int), default=None,
                        help="region-state budget for preprocessing (default: $TIMEDMATCH_REGION_CAP or 10^6)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="compute the match set of a word")
    p.add_argument("--word", required=True, help="word file, or - for stdin")
    _add_automaton(p)
    p.add_argument("--algo", choices=("naive", "online", "bm"), default="naive")
    p.add_argument("--use-delta1", action="store_true", help="combine the label-based skip (bm only)")
    p.add_argument("--normalize", action="store_true",
                   help="emit one sorted, deduplicated zone list (online mode otherwise streams)")
    p.add_argument("--cache", help="skip-table cache file (bm only)")
    p.add_argument("--out", help="zone output file (default stdout)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("preprocess", help="build skip tables and report them")
    _add_automaton(p)
    p.add_argument("--out", help="skip-table cache file; reused when current")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("gen", help="generate a benchmark word")
    p.add_argument("--case", type=int, required=True, choices=sorted(CASES))
    p.add_argument("--seed", type=int, default=0)
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--length", type=int)
    size.add_argument("--duration", type=float)
    p.add_argument("--lambda", dest="rate", type=float, default=1.0,
                   help="exponential rate for cases 3 and 4")
    p.add_argument("--grid", type=int, default=1, help="snapping step in microseconds")
    p.add_argument("--out", help="word file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="cross-check matchers, oracle and skip soundness")
    p.add_argument("--word", required=True)
    _add_automaton(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="time matchers on generated words, write CSV")
    p.add_argument("--case", type=int, required=True, choices=sorted(CASES))
    p.add_argument("--sizes", required=True, help="comma-separated word lengths")
    p.add_argument("--algos", default="naive,bm", help="comma-separated subset of naive,online,bm")
    p.add_argument("--repeats", type=_positive(int), default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="rate", type=float, default=1.0)
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except InvalidAutomaton as exc:
        log.error("automaton rejected: %s", exc)
        return EXIT_ASSUMPTION
    except PreprocessResourceExceeded as exc:
        log.error("preprocessing aborted: %s", exc)
        return EXIT_RESOURCE
    except (TimedMatchError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
