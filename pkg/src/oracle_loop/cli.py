"""Command-line entry point: experiments, single sessions, and the service."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .bench import Grid, make_batch, read_report, render_summary, run_experiment, summarize, write_report
from .diagnosis import AlreadyValidError, FaultProbabilities, NoDiagnosisError
from .experts import Answer, AnswerKind, ExpertProfile, TargetDiagnosis, answer_query
from .kb import parse_kb
from .queries import Heuristic, Query
from .session import (
    QueryType,
    SessionConfig,
    integrate_answer,
    new_session,
    next_query,
    run_auto_session,
    transcript_lines,
)
from .syntax import ParseError

_DEFAULT_LISTEN = "127.0.0.1:7171"


def _split_enum(text: str, enum_cls, what: str):
    values = []
    for token in text.split(","):
        token = token.strip().lower()
        try:
            values.append(enum_cls(token))
        except ValueError:
            choices = ",".join(e.value for e in enum_cls)
            raise argparse.ArgumentTypeError(f"unknown {what} {token!r} (choose from {choices})")
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oracle-loop",
        description="Interactive fault localization for propositional knowledge bases",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    bench = commands.add_parser("bench", help="scenario experiments and reports")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    run = bench_sub.add_parser("run", help="run the strategy grid over generated scenarios")
    run.add_argument("--scenarios", type=int, default=200, help="number of generated scenarios")
    run.add_argument("--seed", type=int, default=0, help="master seed for the batch")
    run.add_argument("--grid", type=lambda t: _split_enum(t, QueryType, "query type"),
                     default=(QueryType.SQ, QueryType.NORMAL), metavar="sq,normal")
    run.add_argument("--heuristics", type=lambda t: _split_enum(t, Heuristic, "heuristic"),
                     default=(Heuristic.ENT, Heuristic.SPL), metavar="ent,spl")
    run.add_argument("--profiles", type=lambda t: _split_enum(t, ExpertProfile, "profile"),
                     default=tuple(ExpertProfile), metavar="qb,min,prag,max")
    run.add_argument("--out", default="report.csv", help="CSV output path")
    run.add_argument("--workers", type=int, default=1, help="parallel scenario workers")
    run.add_argument("--m", type=int, default=9, help="leading-diagnoses cap")

    summ = bench_sub.add_parser("summarize", help="recompute the Q1-Q4 summary from a report")
    summ.add_argument("report", help="CSV written by `bench run`")

    session = commands.add_parser("session", help="single debugging sessions")
    session_sub = session.add_subparsers(dest="session_command", required=True)
    srun = session_sub.add_parser("run", help="run one session on a KB file")
    srun.add_argument("--kb", required=True, help="KB file ([K]/[B]/[P]/[N] sections)")
    srun.add_argument("--dstar", help="comma-separated faulty axiom ids; omit for interactive mode")
    srun.add_argument("--type", type=QueryType, default=QueryType.SQ,
                      choices=list(QueryType), metavar="sq|normal")
    srun.add_argument("--heuristic", type=Heuristic, default=Heuristic.ENT,
                      choices=list(Heuristic), metavar="ent|spl")
    srun.add_argument("--profile", type=ExpertProfile, default=ExpertProfile.PRAGMATIST,
                      choices=list(ExpertProfile), metavar="qb|min|prag|max",
                      help="simulated expert (with --dstar)")
    srun.add_argument("--m", type=int, default=9, help="leading-diagnoses cap")
    srun.add_argument("--probs", help="fault-probability file (axiomIndex<TAB>prob lines)")

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--listen", help=f"host:port (default {_DEFAULT_LISTEN}, "
                                        "env ORACLE_LOOP_LISTEN overrides the default)")

    return parser


def _cmd_bench_run(args) -> int:
    grid = Grid(query_types=args.grid, heuristics=args.heuristics,
                profiles=args.profiles, leading_cap=args.m)
    scenarios = make_batch(args.scenarios, master_seed=args.seed)
    rows = run_experiment(scenarios, grid, workers=args.workers)
    write_report(rows, args.out)
    print(f"{len(rows)} rows -> {args.out}")
    print(render_summary(summarize(rows)))
    return 0


def _cmd_bench_summarize(args) -> int:
    rows = read_report(args.report)
    print(render_summary(summarize(rows)))
    return 0


def _parse_kb_file(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return parse_kb(text)
    except ParseError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None


def _print_query(query: Query, kb) -> None:
    print(f"\nIs every one of these axioms correct? ({len(query)} axiom(s))")
    for ax in query.axiom_ids:
        print(f"  [{ax}] {kb.axioms[ax].source_text}")


def _read_answer(query: Query) -> Answer | None:
    """Parse an interactive answer line; None asks the caller to reprompt.

    `t`/`f` alone answer the whole query; a run of t/f tokens such as
    `t t f` labels that prefix of the query's axioms.
    """
    try:
        line = input("answer (t/f for whole query, or per-axiom prefix like 't f'): ")
    except EOFError:
        raise KeyboardInterrupt
    tokens = [t for t in line.lower().replace(",", " ").split() if t]
    if not tokens and line.strip().lower() in ("t", "f"):
        tokens = [line.strip().lower()]
    if not tokens or any(t not in ("t", "f") for t in tokens):
        print("  please answer with t/f tokens")
        return None
    if len(tokens) == 1 and len(query) > 1:
        value = tokens[0] == "t"
        kind = AnswerKind.WHOLE_QUERY_TRUE if value else AnswerKind.WHOLE_QUERY_FALSE
        return Answer(kind, (), len(query))
    if len(tokens) > len(query):
        print(f"  the query has only {len(query)} axioms")
        return None
    labels = tuple((ax, tok == "t") for ax, tok in zip(query.axiom_ids, tokens))
    return Answer(AnswerKind.AXIOM_LABELS, labels, len(labels))


def _cmd_session_run(args) -> int:
    kb = _parse_kb_file(args.kb)
    if kb is None:
        return 1
    probs = None
    if args.probs:
        probs = FaultProbabilities.from_text(Path(args.probs).read_text(encoding="utf-8"), kb)
    config = SessionConfig(query_type=args.type, heuristic=args.heuristic,
                           leading_cap=args.m, fault_probs=probs)

    if args.dstar is not None:
        try:
            ids = frozenset(int(t) for t in args.dstar.split(","))
        except ValueError:
            print(f"error: --dstar expects comma-separated ids, got {args.dstar!r}", file=sys.stderr)
            return 2
        if not ids or any(ax not in range(len(kb.axioms)) for ax in ids):
            print(f"error: --dstar ids must name axioms 0..{len(kb.axioms) - 1}", file=sys.stderr)
            return 2
        dstar = TargetDiagnosis(ids)
        profile = args.profile
        try:
            result = run_auto_session(kb, config, profile, dstar)
        except (NoDiagnosisError, AlreadyValidError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        for line in transcript_lines(result.records):
            print(line)
        ids = sorted(result.final_diagnosis.axiom_ids)
        print(f"\nfaulty axioms: {ids}")
        for ax in ids:
            print(f"  [{ax}] {kb.axioms[ax].source_text}")
        print(f"#Q={result.metrics.num_queries} #Ax={result.metrics.num_axioms} "
              f"selection={result.metrics.compute_time_nanos / 1e6:.1f}ms")
        return 0

    try:
        state = new_session(kb, config)
    except (NoDiagnosisError, AlreadyValidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{len(state.ds)} leading diagnoses; answering as the oracle for the intended KB")
    try:
        while not state.finished:
            query = next_query(state)
            _print_query(query, kb)
            answer = None
            while answer is None:
                answer = _read_answer(query)
            try:
                state = integrate_answer(state, query, answer)
            except (ValueError, NoDiagnosisError) as exc:
                print(f"  rejected: {exc}")
                continue
            print(f"  {len(state.ds)} diagnoses remain")
    except KeyboardInterrupt:
        print("\ninterrupted")
        return 1
    ids = sorted(state.result.axiom_ids)
    print(f"\nfaulty axioms: {ids}")
    for ax in ids:
        print(f"  [{ax}] {kb.axioms[ax].source_text}")
    print(f"#Q={state.metrics.num_queries} #Ax={state.metrics.num_axioms}")
    return 0


def _cmd_serve(args) -> int:
    listen = args.listen or os.environ.get("ORACLE_LOOP_LISTEN") or _DEFAULT_LISTEN
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: --listen expects host:port, got {listen!r}", file=sys.stderr)
        return 1
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=int(port_text))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench":
        if args.bench_command == "run":
            return _cmd_bench_run(args)
        return _cmd_bench_summarize(args)
    if args.command == "session":
        return _cmd_session_run(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
