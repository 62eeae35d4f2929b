"""Batch command-line driver: parse, preprocess, classify, solve, report.

Exit codes: 0 for sat/unsat/unknown, 1 for usage errors, 2 for parse or sort
errors, 3 for an internal model-verification failure.
"""
from __future__ import annotations

import argparse
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from . import benchgen, frontend, preprocess, tableau
from .errors import (DnfCapExceeded, ParseError, SetRelError, SortMismatch,
                     UnsupportedLiteral)
from .oracle import Oracle
from .preprocess import classify
from .tableau import Limits, SolveStats, Verdict


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="setrel", description="finite set and relation solver")
    sub = p.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an input file")
    solve.add_argument("file")
    solve.add_argument("--oracle", choices=["euf", "lia", "auto"], default="auto")
    solve.add_argument("--max-steps", type=int, default=100_000)
    solve.add_argument("--timeout", type=float, default=None)
    solve.add_argument("--dnf-cap", type=int, default=preprocess.DEFAULT_DNF_CAP)
    solve.add_argument("--check-model", action="store_true")
    solve.add_argument("--dump-trace", action="store_true")
    solve.add_argument("--stats", action="store_true")
    solve.add_argument("--fragment-check-only", action="store_true")
    solve.add_argument("--jobs", type=int, default=1)

    gen = sub.add_parser("gen", help="generate benchmark instances")
    gen.add_argument("--family", choices=["hilbert", "random"], required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.add_argument("--profile", choices=["default", "differential", "outside-f"],
                     default="default")

    report = sub.add_parser("report", help="run a family and render figures")
    report.add_argument("--family", choices=["hilbert", "random"], default="random")
    report.add_argument("--count", type=int, default=50)
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--out-dir", default="report")
    report.add_argument("--max-steps", type=int, default=20_000)
    return p


def _profile(name: str) -> benchgen.Profile:
    if name == "default":
        return benchgen.Profile()
    if name == "differential":
        return benchgen.DIFFERENTIAL_PROFILE
    return benchgen.Profile(in_f=False)


def run_script(script: frontend.Script, oracle_kind: str, limits: Limits,
               dnf_cap: int, jobs: int = 1, trace=None
               ) -> tuple:
    """Solve a parsed script; returns (verdict, reports, stats)."""
    phi = script.formula()
    stats = SolveStats()
    disjuncts = preprocess.normalize(phi, cap=dnf_cap)
    reports = [classify(d) for d in disjuncts]
    if jobs <= 1 or len(disjuncts) <= 1:
        oracle = Oracle(oracle_kind)
        saw_unknown = False
        reason = ""
        for d in disjuncts:
            v = tableau.solve(d, oracle=oracle, limits=limits, stats=stats,
                              trace=trace)
            if v.status == "sat":
                return (Verdict("sat", model=tableau.complete_model(v.model, phi)),
                        reports, stats)
            if v.status == "unknown":
                saw_unknown, reason = True, v.reason
        status = Verdict("unknown", reason=reason) if saw_unknown else Verdict("unsat")
        return (status, reports, stats)

    # parallel walkers over disjuncts; the first sat short-circuits the rest
    stop = threading.Event()
    walker_limits = Limits(max_steps=limits.max_steps, timeout=limits.timeout,
                           stop=stop)

    def work(d):
        local = SolveStats()
        v = tableau.solve(d, oracle=Oracle(oracle_kind), limits=walker_limits,
                          stats=local)
        if v.status == "sat":
            stop.set()
        return v, local

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(work, disjuncts))
    saw_unknown = False
    reason = ""
    verdict = None
    for v, local in results:
        stats.steps += local.steps
        stats.oracle_calls += local.oracle_calls
        stats.branches += local.branches
        stats.step_limit_hit |= local.step_limit_hit
        for r, n in local.rule_counts.items():
            stats.rule_counts[r] = stats.rule_counts.get(r, 0) + n
        if v.status == "sat" and verdict is None:
            verdict = Verdict("sat", model=tableau.complete_model(v.model, phi))
        elif v.status == "unknown" and v.reason != "cancelled":
            saw_unknown, reason = True, v.reason
    if verdict is None:
        verdict = Verdict("unknown", reason=reason) if saw_unknown else Verdict("unsat")
    return (verdict, reports, stats)


def cmd_solve(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        script = frontend.parse(text)
    except (ParseError, SortMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    limits = Limits(max_steps=args.max_steps, timeout=args.timeout)
    trace = (lambda line: print(line, file=sys.stderr)) if args.dump_trace else None

    if args.fragment_check_only:
        try:
            disjuncts = preprocess.normalize(script.formula(), cap=args.dnf_cap)
        except DnfCapExceeded as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        for i, d in enumerate(disjuncts):
            rep = classify(d)
            if rep.in_f:
                print(f"disjunct {i}: in-fragment")
            else:
                reasons = ", ".join(sorted({r for r, _ in rep.violations}))
                print(f"disjunct {i}: outside fragment ({reasons})")
        return 0

    t0 = time.monotonic()
    try:
        verdict, reports, stats = run_script(script, args.oracle, limits,
                                             args.dnf_cap, jobs=args.jobs,
                                             trace=trace)
    except DnfCapExceeded as e:
        print("unknown")
        print(f"note: {e}", file=sys.stderr)
        return 0
    except UnsupportedLiteral as e:
        print(f"error: the selected oracle cannot decide this input: {e}",
              file=sys.stderr)
        return 1
    except (ParseError, SortMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    elapsed = time.monotonic() - t0

    if verdict.status == "sat" and args.check_model:
        if not tableau.verify_model(verdict.model, script.assertions):
            print("internal error: model failed verification", file=sys.stderr)
            return 3
    print(verdict.status)
    if verdict.status == "sat" and script.want_model:
        print(frontend.print_model(verdict.model.values, script.declarations))
    if args.stats:
        print(f"; disjuncts: {len(reports)}")
        print(f"; in-fragment: {sum(1 for r in reports if r.in_f)}")
        print(f"; steps: {stats.steps}")
        print(f"; oracle-calls: {stats.oracle_calls}")
        print(f"; time: {elapsed:.3f}s")
        for rule in sorted(stats.rule_counts):
            print(f"; rule {rule}: {stats.rule_counts[rule]}")
    return 0


def cmd_gen(args) -> int:
    if args.family == "hilbert":
        script = benchgen.gen_hilbert(benchgen.random_hilbert(args.seed))
    else:
        script = benchgen.gen_random(args.seed, _profile(args.profile))
    text = frontend.print_script(script)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    from . import report
    out = report.run_report(args.family, args.count, args.seed, args.out_dir,
                            max_steps=args.max_steps)
    for path in out:
        print(path)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "gen":
            return cmd_gen(args)
        return cmd_report(args)
    except SetRelError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
