"""Command-line harness.

Subcommands:

* ``explore`` -- exhaustive or random schedule exploration on the simulated
  backend, with invariant monitors, both linearizability routes at
  terminals, and (exhaustive mode) progress-cycle detection.
* ``stress``  -- native-thread run; reports the final state and checks
  sampled history prefixes with the generic linearizability search.
* ``check``   -- decide linearizability of a JSONL history against a type.
* ``demo``    -- annotated single-process trace of one operation, step by
  step, showing how the first announce bootstraps through the L13 branch.

Exit codes: 0 all checks passed; 1 violation or non-linearizable (details
on stderr, offending history written as JSONL); 2 usage error; 3 budget
exceeded.  Reports are single JSON objects on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from .checker import (
    MalformedHistoryError,
    check_linearizable,
    project_history,
    verify_linearization_points,
)
from .explore import (
    ExplorationConfig,
    default_workload,
    detect_progress_cycles,
    explore_exhaustive,
    explore_random,
    make_world,
    replay,
)
from .construction import MUTATIONS, STEP_NOTES
from .histio import MalformedLineError, read_history, write_history
from .native import run_native
from .seqtypes import BUILTIN_TYPES, get_type

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--type", dest="type_name", default="counter",
                     choices=sorted(BUILTIN_TYPES))
    sub.add_argument("--procs", type=int, default=2)
    sub.add_argument("--ops-per-proc", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcaskit",
        description="wait-free shared objects from comparator-based swaps, "
                    "with desk-scale schedule exploration and checking")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("explore", help="explore schedules on the simulated backend")
    _add_common(p)
    p.add_argument("--backend", default="sim", choices=["sim", "native"])
    p.add_argument("--mode", default="exhaustive", choices=["exhaustive", "random"])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crash", default="", help="comma-separated pids allowed to crash")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--mutate", default="", help=f"comma-separated subset of {sorted(MUTATIONS)}")
    p.add_argument("--out", default="violation.jsonl",
                   help="where to write the offending history on exit 1")
    p.set_defaults(func=cmd_explore)

    p = subs.add_parser("stress", help="hammer the native backend with real threads")
    _add_common(p)
    p.add_argument("--backend", default="native", choices=["sim", "native"])
    p.add_argument("--sample-events", type=int, default=1000,
                   help="history prefix length fed to the linearizability search")
    p.add_argument("--out", default="stress-history.jsonl",
                   help="where to write the failing prefix on exit 1")
    p.set_defaults(func=cmd_stress)

    p = subs.add_parser("check", help="check a JSONL history for linearizability")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--type", dest="type_name", default="counter",
                   choices=sorted(BUILTIN_TYPES))
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out", default="counterexample.jsonl",
                   help="where to write the minimal counterexample on exit 1")
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("demo", help="annotated single-process trace")
    p.add_argument("--type", dest="type_name", default="counter",
                   choices=sorted(BUILTIN_TYPES))
    p.add_argument("--ops", type=int, default=1)
    p.add_argument("--backend", default="sim", choices=["sim", "native"])
    p.set_defaults(func=cmd_demo)

    return parser


def _parse_pids(raw: str) -> frozenset:
    if not raw.strip():
        return frozenset()
    return frozenset(int(p) for p in raw.split(","))


def _emit(summary: dict) -> None:
    print(json.dumps(summary))


def _write_violation_history(cfg: ExplorationConfig, report, out_path: str) -> None:
    for violation in report.violations:
        recipe = violation.get("recipe")
        if recipe:
            events, _ = replay(cfg, recipe)
            write_history(out_path, events)
            return


def cmd_explore(args) -> int:
    if args.backend != "sim":
        print("explore runs on the simulated backend only", file=sys.stderr)
        return EXIT_USAGE
    cfg = ExplorationConfig(
        spec_name=args.type_name,
        procs=args.procs,
        ops_per_proc=args.ops_per_proc,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        crash_set=_parse_pids(args.crash),
        max_steps=args.max_steps,
        budget=args.budget,
        mutations=frozenset(m for m in args.mutate.split(",") if m),
    )
    if cfg.mode == "random":
        report = explore_random(cfg)
        summary = {"explore": report.to_dict(), "cycles": None}
        bad = not report.clean
        budget_hit = report.budget_exceeded
    else:
        report = explore_exhaustive(cfg)
        cycles = detect_progress_cycles(cfg)
        summary = {"explore": report.to_dict(), "cycles": cycles.to_dict()}
        bad = not report.clean or cycles.progress_cycles
        budget_hit = report.budget_exceeded or cycles.budget_exceeded

    if bad:
        summary["exit"] = EXIT_VIOLATION
        _emit(summary)
        _write_violation_history(cfg, report, args.out)
        for violation in report.violations[:5]:
            print(f"violation: {violation['invariant']}: {violation['detail']}",
                  file=sys.stderr)
        if summary["cycles"] and summary["cycles"]["progress_cycles"]:
            first = summary["cycles"]["progress_cycles"][0]
            print(f"progress cycle of length {first['length']} "
                  f"(pid {first['pid']} steps without completing)", file=sys.stderr)
        return EXIT_VIOLATION
    if budget_hit:
        summary["exit"] = EXIT_BUDGET
        _emit(summary)
        print("exploration budget exceeded; report is partial", file=sys.stderr)
        return EXIT_BUDGET
    summary["exit"] = EXIT_OK
    _emit(summary)
    return EXIT_OK


def cmd_stress(args) -> int:
    if args.backend != "native":
        print("stress runs on the native backend only", file=sys.stderr)
        return EXIT_USAGE
    spec = get_type(args.type_name)
    workloads = default_workload(spec.name, args.procs, args.ops_per_proc)
    result = run_native(spec, workloads)

    total = args.procs * args.ops_per_proc
    quarter = max(1, args.sample_events // 4)
    lengths = sorted({min(len(result.events), quarter * k) for k in (1, 2, 3, 4)})
    prefix_verdicts = []
    failing = None
    for length in lengths:
        prefix = result.events[:length]
        verdict = check_linearizable(project_history(prefix), spec, minimize=False)
        prefix_verdicts.append({"events": length, "status": verdict.status})
        if not verdict.linearizable and failing is None:
            failing = prefix

    summary = {
        "final_state": result.final_state,
        "operations": total,
        "events_recorded": len(result.events),
        "prefix_checks": prefix_verdicts,
    }
    if failing is not None:
        summary["exit"] = EXIT_VIOLATION
        _emit(summary)
        write_history(args.out, failing)
        print("a sampled history prefix is not linearizable", file=sys.stderr)
        return EXIT_VIOLATION
    summary["exit"] = EXIT_OK
    _emit(summary)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        events = read_history(args.in_path)
        history = project_history(events)
    except (OSError, MalformedLineError, MalformedHistoryError) as exc:
        print(f"cannot read history: {exc}", file=sys.stderr)
        return EXIT_USAGE
    spec = get_type(args.type_name)
    verdict = check_linearizable(history, spec, budget=args.budget)
    summary = {
        "status": verdict.status,
        "events": len(history),
        "witness_order": [list(op.key) for op in verdict.witness.order]
        if verdict.witness else None,
        "counterexample_events": len(verdict.counterexample)
        if verdict.counterexample else None,
    }
    if verdict.status == "yes":
        summary["exit"] = EXIT_OK
        _emit(summary)
        return EXIT_OK
    if verdict.status == "budget":
        summary["exit"] = EXIT_BUDGET
        _emit(summary)
        print("checker budget exceeded; verdict unknown", file=sys.stderr)
        return EXIT_BUDGET
    summary["exit"] = EXIT_VIOLATION
    _emit(summary)
    if verdict.counterexample:
        write_history(args.out, verdict.counterexample)
    print("history is not linearizable", file=sys.stderr)
    return EXIT_VIOLATION


def cmd_demo(args) -> int:
    spec = get_type(args.type_name)
    workload = default_workload(spec.name, 1, args.ops)

    if args.backend == "sim":
        cfg = ExplorationConfig(spec_name=spec.name, procs=1, ops_per_proc=args.ops)
        world = make_world(cfg, spec)
        events = []
        while True:
            choices = world.choices()
            if not choices:
                break
            events.extend(world.apply(choices[0]))
    else:
        from .native import HistoryRecorder  # single thread, just for the log
        from .construction import SharedObjects, new_process, do_op
        from .memory import NativeMemory
        from .checker import Event

        mem = NativeMemory()
        shared = SharedObjects.setup(mem, spec)
        ctx = new_process(mem, shared, 1)
        events = []

        def log_step(res):
            if res.shared:
                events.append(Event(len(events) + 1, "step", 1, step=res.label,
                                    obj=res.obj, outcome=res.outcome))

        for op in workload[0]:
            events.append(Event(len(events) + 1, "invoke", 1, op=op.name,
                                args=tuple(op.args)))
            resp = do_op(ctx, op, spec, on_step=log_step)
            events.append(Event(len(events) + 1, "response", 1, resp=resp))

    responses = []
    for ev in events:
        if ev.kind == "invoke":
            print(f"[{ev.seq:3}] p{ev.pid} invoke {ev.op}{tuple(ev.args)!r:<24}")
        elif ev.kind == "response":
            responses.append(ev.resp)
            print(f"[{ev.seq:3}] p{ev.pid} response -> {ev.resp!r}")
        else:
            note = STEP_NOTES.get(ev.step, "")
            print(f"[{ev.seq:3}] p{ev.pid} {ev.step:<4} {ev.obj or '':<8} "
                  f"-> {ev.outcome!r:<40} {note}")
    _emit({"type": spec.name, "responses": responses, "steps": len(events), "exit": EXIT_OK})
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
