"""Deterministic scheduling and state-space search over the step machine.

The simulated world holds the shared memory, one step-machine context per
process, and each process's remaining workload.  A *scheduling point* is
one shared-memory access: the scheduler picks a process and runs its step
machine until exactly one shared access has happened (the two local steps
L10/L11 are fused with the swap that follows them, which hides no
interleavings because local steps commute with everything).  Invocations
are folded into the first step of an operation and responses into its last
(L14); both placements only tighten the real-time precedence the checker
must satisfy, so a history that passes here passes with any looser
placement too.

Three drivers share that machinery:

* :func:`explore_exhaustive` -- depth-first search over every scheduling
  choice (and every crash point for processes allowed to crash),
  deduplicating states by digest, running the invariant monitors after
  every step and both linearizability routes at every terminal.
* :func:`detect_progress_cycles` -- cycle search over the reachable state
  graph.  Any cycle is a wait-freedom violation for this finite
  configuration: the clock, per-process operation counts, and response
  cells are all monotone, so no step of an idle or finished process can sit
  on a cycle -- whoever steps inside one is looping inside a single
  unfinished operation.
* :func:`explore_random` -- reproducible uniform sampling of schedules,
  same monitors, for configurations too big to exhaust.

Every reported violation and cycle carries a replay recipe: the exact
sequence of scheduling choices that reproduces it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, Optional

from .checker import (
    Event,
    check_linearizable,
    project_history,
    verify_linearization_points,
)
from .construction import (
    MUTATIONS,
    OpInstance,
    ProcessContext,
    SharedObjects,
    new_process,
)
from .memory import NULL, BOTTOM, NOOP, SimMemory
from .seqtypes import OperationDescriptor, TypeSpec, get_type


def default_workload(spec_name: str, procs: int, ops_per_proc: int) -> tuple:
    """Per-process operation lists: counters increment; for registers and
    stacks, odd pids produce (write/push of distinct values) and even pids
    consume (read/pop)."""
    loads = []
    for pid in range(1, procs + 1):
        ops = []
        for k in range(ops_per_proc):
            if spec_name == "counter":
                ops.append(OperationDescriptor("inc"))
            elif spec_name == "register":
                if pid % 2 == 1:
                    ops.append(OperationDescriptor("write", (pid * 100 + k + 1,)))
                else:
                    ops.append(OperationDescriptor("read"))
            elif spec_name == "stack":
                if pid % 2 == 1:
                    ops.append(OperationDescriptor("push", (pid * 100 + k + 1,)))
                else:
                    ops.append(OperationDescriptor("pop"))
            else:
                raise ValueError(f"no default workload for type {spec_name!r}")
        loads.append(tuple(ops))
    return tuple(loads)


@dataclass
class ExplorationConfig:
    """What to run: configuration sizes, schedule source, and budgets."""

    spec_name: str = "counter"
    procs: int = 2
    ops_per_proc: int = 1
    mode: str = "exhaustive"            # "exhaustive" | "random"
    samples: int = 1000                 # random mode only
    seed: int = 0                       # random mode only
    crash_set: frozenset = frozenset()  # pids allowed to crash
    max_steps: int = 10_000             # per-schedule depth cap
    budget: int = 2_000_000             # visited-state cap
    mutations: frozenset = frozenset()  # algorithm mutations under test
    check_terminals: bool = True        # run the generic checker at terminals
    workload: Optional[tuple] = None    # override default_workload

    def __post_init__(self):
        if self.procs < 1 or self.ops_per_proc < 1:
            raise ValueError("procs and ops_per_proc must be at least 1")
        unknown = set(self.mutations) - MUTATIONS
        if unknown:
            raise ValueError(f"unknown mutations {sorted(unknown)}")
        self.crash_set = frozenset(self.crash_set)
        self.mutations = frozenset(self.mutations)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec_name,
            "procs": self.procs,
            "ops_per_proc": self.ops_per_proc,
            "mode": self.mode,
            "samples": self.samples if self.mode == "random" else None,
            "seed": self.seed if self.mode == "random" else None,
            "crash_set": sorted(self.crash_set),
            "max_steps": self.max_steps,
            "budget": self.budget,
            "mutations": sorted(self.mutations),
        }


class World:
    """Full simulated universe: memory, contexts, and remaining workloads."""

    __slots__ = ("spec", "mem", "shared", "ctxs", "workloads", "next_op",
                 "crashed", "seq", "mutations")

    def __init__(self, spec: TypeSpec, workloads: tuple,
                 mutations: frozenset = frozenset()):
        self.spec = spec
        self.mem = SimMemory()
        self.shared = SharedObjects.setup(self.mem, spec)
        self.ctxs = {
            pid: new_process(self.mem, self.shared, pid, mutations)
            for pid in range(1, len(workloads) + 1)
        }
        self.workloads = tuple(tuple(w) for w in workloads)
        self.next_op = [0] * len(workloads)
        self.crashed = frozenset()
        self.seq = 0
        self.mutations = mutations

    def can_step(self, pid: int) -> bool:
        if pid in self.crashed:
            return False
        ctx = self.ctxs[pid]
        return not ctx.idle or self.next_op[pid - 1] < len(self.workloads[pid - 1])

    def choices(self, crash_set: frozenset = frozenset()) -> list:
        out = [("step", pid) for pid in self.ctxs if self.can_step(pid)]
        out.extend(("crash", pid) for pid in sorted(crash_set)
                   if pid not in self.crashed and self.can_step(pid))
        return out

    def apply(self, choice: tuple) -> list:
        """Execute one scheduling choice; returns the events it produced."""
        kind, pid = choice
        if kind == "crash":
            self.crashed = self.crashed | {pid}
            return []
        ctx = self.ctxs[pid]
        events = []
        if ctx.idle:
            desc = self.workloads[pid - 1][self.next_op[pid - 1]]
            self.next_op[pid - 1] += 1
            inst = ctx.begin(desc)
            self.seq += 1
            events.append(Event(self.seq, "invoke", pid, op=inst.name, args=inst.args))
        while True:
            res = ctx.step(self.spec)
            if res.shared:
                self.seq += 1
                events.append(Event(self.seq, "step", pid, step=res.label,
                                    obj=res.obj, outcome=res.outcome))
            if res.completed:
                self.seq += 1
                events.append(Event(self.seq, "response", pid, resp=res.response))
                return events
            if res.shared:
                return events

    def fork(self) -> "World":
        other = World.__new__(World)
        other.spec = self.spec
        other.mem = self.mem.clone()
        other.shared = self.shared
        other.ctxs = {pid: ctx.clone(other.mem) for pid, ctx in self.ctxs.items()}
        other.workloads = self.workloads
        other.next_op = list(self.next_op)
        other.crashed = self.crashed
        other.seq = self.seq
        other.mutations = self.mutations
        return other

    def canonical(self) -> bytes:
        """Canonical serialization; equal bytes iff equal states."""
        parts = (
            self.mem.canonical(),
            tuple(self.ctxs[pid].snapshot() for pid in sorted(self.ctxs)),
            tuple(self.next_op),
            tuple(sorted(self.crashed)),
        )
        return repr(parts).encode()

    def digest(self) -> bytes:
        return hashlib.blake2b(self.canonical(), digest_size=16).digest()


def make_world(cfg: ExplorationConfig, spec: Optional[TypeSpec] = None) -> World:
    spec = spec or get_type(cfg.spec_name)
    workloads = cfg.workload or default_workload(spec.name, cfg.procs, cfg.ops_per_proc)
    return World(spec, workloads, cfg.mutations)


def encode_choice(choice: tuple) -> str:
    kind, pid = choice
    return ("s" if kind == "step" else "c") + str(pid)


def decode_choice(token: str) -> tuple:
    return ("step" if token[0] == "s" else "crash", int(token[1:]))


def replay(cfg: ExplorationConfig, recipe) -> tuple:
    """Re-run a recipe; returns (events, final world).  Deterministic."""
    world = make_world(cfg)
    events = []
    for token in recipe:
        events.extend(world.apply(decode_choice(token)))
    return events, world


def events_digest(events) -> str:
    return hashlib.blake2b(repr(tuple(events)).encode(), digest_size=16).hexdigest()


@dataclass
class Report:
    """What a run of the engine saw, with replay recipes for everything bad."""

    config: dict
    states_visited: int = 0
    schedules_completed: int = 0
    violations: list = field(default_factory=list)
    progress_cycles: list = field(default_factory=list)
    budget_exceeded: bool = False
    linearizable_terminals: int = 0
    nonlinearizable_terminals: int = 0
    verify_failures: int = 0
    checker_disagreements: int = 0
    events_hash: Optional[str] = None

    @property
    def clean(self) -> bool:
        return (not self.violations and not self.progress_cycles
                and self.nonlinearizable_terminals == 0
                and self.verify_failures == 0
                and self.checker_disagreements == 0)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "states_visited": self.states_visited,
            "schedules_completed": self.schedules_completed,
            "violations": self.violations,
            "progress_cycles": self.progress_cycles,
            "budget_exceeded": self.budget_exceeded,
            "linearizable_terminals": self.linearizable_terminals,
            "nonlinearizable_terminals": self.nonlinearizable_terminals,
            "verify_failures": self.verify_failures,
            "checker_disagreements": self.checker_disagreements,
            "events_hash": self.events_hash,
            "clean": self.clean,
        }


class MonitorSuite:
    """Incremental invariant monitors, evaluated after every scheduling step.

    The suite mirrors the announce/state/cell contents it last saw, so each
    step is judged against its true pre-state without the scheduler having
    to keep the previous world alive.  Each step touches exactly one shared
    object, so only that object's invariants need rechecking.  All
    bookkeeping is snapshot- and restore-able so the exhaustive search can
    backtrack it.
    """

    def __init__(self, world: World, loop_budget: Optional[int] = None):
        self.loop_budget = loop_budget
        self.cells = {pid: ctx.cell for pid, ctx in world.ctxs.items()}
        self.noop_cell = world.shared.noop_cell
        self.announce = world.shared.announce
        self.state_obj = world.shared.state
        self.invoke_counts: dict[int, int] = {}
        self.cur_op: dict[int, OpInstance] = {}
        self.t_of: dict[tuple, int] = {}
        self.op_of_time: dict[int, OpInstance] = {}
        self.ops_of_pid: dict[int, list] = {pid: [] for pid in self.cells}
        self.issued: set = set()
        self.installs: dict[tuple, int] = {}
        self.install_resp: dict[tuple, Any] = {}
        self.done: set = set()
        self.iters: dict[tuple, int] = {}
        self.prev = {
            "A": world.mem.read(world.shared.announce),
            "S": world.mem.read(world.shared.state),
            "clock": world.mem.peek_counter(world.shared.clock),
            "cells": {pid: world.mem.read(ctx.cell) for pid, ctx in world.ctxs.items()},
        }

    def snapshot(self) -> tuple:
        return (dict(self.invoke_counts), dict(self.cur_op), dict(self.t_of),
                dict(self.op_of_time), set(self.issued), dict(self.installs),
                dict(self.install_resp), set(self.done), dict(self.iters),
                {pid: list(keys) for pid, keys in self.ops_of_pid.items()},
                (self.prev["A"], self.prev["S"], self.prev["clock"],
                 dict(self.prev["cells"])))

    def restore(self, snap: tuple) -> None:
        (invoke_counts, cur_op, t_of, op_of_time, issued, installs,
         install_resp, done, iters, ops_of_pid, prev) = snap
        self.invoke_counts = dict(invoke_counts)
        self.cur_op = dict(cur_op)
        self.t_of = dict(t_of)
        self.op_of_time = dict(op_of_time)
        self.issued = set(issued)
        self.installs = dict(installs)
        self.install_resp = dict(install_resp)
        self.done = set(done)
        self.iters = dict(iters)
        self.ops_of_pid = {pid: list(keys) for pid, keys in ops_of_pid.items()}
        self.prev = {"A": prev[0], "S": prev[1], "clock": prev[2],
                     "cells": dict(prev[3])}

    def _check_announce(self, found: list, a_rec: tuple) -> None:
        t_a, op_a, cell_a = a_rec
        if op_a is NOOP:
            if t_a != 0 or cell_a != self.noop_cell:
                found.append(("announce-well-formed", f"bad NOOP record {a_rec!r}"))
        elif not (isinstance(op_a, OpInstance)
                  and self.t_of.get(op_a.key) == t_a
                  and self.cells.get(op_a.pid) == cell_a):
            found.append(("announce-well-formed", f"announce holds {a_rec!r}"))

    def _check_state(self, found: list, s_rec: tuple) -> None:
        t_s, _, r_s, cell_s = s_rec
        if r_s is NULL or (r_s is BOTTOM and t_s != 0):
            found.append(("state-well-formed", f"state response field {s_rec!r}"))
        if t_s == 0:
            if cell_s != self.noop_cell:
                found.append(("state-well-formed", f"initial-time state {s_rec!r}"))
        else:
            op_s = self.op_of_time.get(t_s)
            if op_s is None or self.cells.get(op_s.pid) != cell_s:
                found.append(("state-well-formed", f"state holds {s_rec!r}"))

    def _check_done(self, found: list, pid: int) -> None:
        cell_rec = self.prev["cells"][pid]
        cell_t, cell_r = cell_rec
        for key in self.ops_of_pid[pid]:
            t = self.t_of[key]
            if cell_t > t or (cell_t == t and cell_r is not NULL):
                self.done.add(key)
            elif key in self.done:
                found.append(("done-stays-done",
                              f"operation {key} regressed to not-done ({cell_rec!r})"))

    def after_step(self, world: World, events: list, random_mode: bool = False) -> list:
        """Evaluate the monitors for one scheduling step; returns violations
        as (invariant id, detail) pairs, empty when everything holds."""
        found: list = []
        read = world.mem.read
        for ev in events:
            if ev.kind == "invoke":
                idx = self.invoke_counts.get(ev.pid, 0)
                self.invoke_counts[ev.pid] = idx + 1
                self.cur_op[ev.pid] = OpInstance(ev.pid, idx, ev.op, tuple(ev.args))
                continue
            if ev.kind == "response":
                key = self.cur_op[ev.pid].key
                if key not in self.install_resp:
                    found.append(("response-matches-install",
                                  f"operation {key} returned {ev.resp!r} with no install"))
                elif self.install_resp[key] != ev.resp:
                    found.append(("response-matches-install",
                                  f"operation {key} returned {ev.resp!r}, "
                                  f"installed {self.install_resp[key]!r}"))
                continue

            label = ev.step
            op = self.cur_op.get(ev.pid)
            if label == "L2":
                t = ev.outcome
                if t in self.issued:
                    found.append(("unique-timestamps", f"timestamp {t} issued twice"))
                if t != self.prev["clock"]:
                    found.append(("fetch-increment-contract",
                                  f"counter returned {t}, expected {self.prev['clock']}"))
                self.issued.add(t)
                self.prev["clock"] = max(self.prev["clock"], t + 1)
                self.t_of[op.key] = t
                self.op_of_time[t] = op
                self.ops_of_pid[ev.pid].append(op.key)
            elif label == "L3":
                old = self.prev["cells"][ev.pid]
                rec = read(self.cells[ev.pid])
                if rec[0] <= old[0]:
                    found.append(("cell-owner-time",
                                  f"cell:{ev.pid} time not strictly increasing "
                                  f"{old!r} -> {rec!r}"))
                self.prev["cells"][ev.pid] = rec
                self._check_done(found, ev.pid)
            elif label == "L4":
                self.iters[op.key] = self.iters.get(op.key, 0) + 1
                if (random_mode and self.loop_budget is not None
                        and self.iters[op.key] > self.loop_budget):
                    found.append(("loop-budget",
                                  f"operation {op.key} exceeded {self.loop_budget} "
                                  "loop iterations"))
            elif label == "L6":
                target_pid = int(ev.obj.split(":")[1])
                if target_pid == 0:
                    if ev.outcome or read(self.noop_cell) != (0, BOTTOM):
                        found.append(("help-copy-form",
                                      "the immutable NOOP cell changed"))
                else:
                    old = self.prev["cells"][target_pid]
                    rec = read(self.cells[target_pid])
                    if ev.outcome:
                        if rec[0] != old[0]:
                            found.append(("cell-owner-time",
                                          f"help copy changed cell:{target_pid} time"))
                        if rec[1] is NULL:
                            found.append(("help-copy-form",
                                          f"copy wrote {rec!r} over {old!r}"))
                        self.prev["cells"][target_pid] = rec
                        self._check_done(found, target_pid)
                    elif rec != old:
                        found.append(("swap-contract",
                                      f"failed copy changed cell:{target_pid}"))
            elif label in ("L7", "L13"):
                a_rec = read(self.announce)
                if ev.outcome:
                    if label == "L7" and not a_rec[0] < self.prev["A"][0]:
                        found.append(("announce-time-decrease",
                                      f"announce time {self.prev['A'][0]} -> {a_rec[0]} "
                                      "on successful announce swap"))
                    if a_rec != (self.t_of.get(op.key), op, self.cells[ev.pid]):
                        found.append(("swap-contract", f"announce now {a_rec!r}"))
                    self._check_announce(found, a_rec)
                elif a_rec != self.prev["A"]:
                    found.append(("swap-contract", "failed announce swap changed A"))
                self.prev["A"] = a_rec
            elif label == "L12":
                s_rec = read(self.state_obj)
                if ev.outcome:
                    installed = self.op_of_time.get(s_rec[0])
                    if installed is None:
                        found.append(("state-well-formed",
                                      f"install for unknown timestamp {s_rec[0]}"))
                    else:
                        count = self.installs.get(installed.key, 0) + 1
                        self.installs[installed.key] = count
                        self.install_resp[installed.key] = s_rec[2]
                        if count > 1:
                            found.append(("at-most-once-install",
                                          f"operation {installed.key} linearized "
                                          f"{count} times"))
                    self._check_state(found, s_rec)
                elif s_rec != self.prev["S"]:
                    found.append(("swap-contract", "failed install changed S"))
                self.prev["S"] = s_rec
        return found


def _loop_budget(cfg: ExplorationConfig) -> int:
    # Heuristic livelock tripwire for random mode; not a theorem.
    return 2 * cfg.procs * cfg.ops_per_proc + 4


def _terminal_checks(report: Report, world: World, events: list,
                     cfg: ExplorationConfig, recipe: list,
                     terminal_hook: Optional[Callable]) -> None:
    verify = verify_linearization_points(events, world.spec)
    if not verify.ok:
        report.verify_failures += 1
        report.violations.append({
            "invariant": "linearization-points",
            "detail": verify.reason,
            "recipe": list(recipe),
            "events_digest": events_digest(events),
        })
    generic_ok = None
    if cfg.check_terminals:
        verdict = check_linearizable(project_history(events), world.spec, minimize=False)
        generic_ok = verdict.linearizable
        if generic_ok:
            report.linearizable_terminals += 1
        else:
            report.nonlinearizable_terminals += 1
            report.violations.append({
                "invariant": "linearizable",
                "detail": f"terminal history not linearizable ({verdict.status})",
                "recipe": list(recipe),
                "events_digest": events_digest(events),
            })
        if generic_ok != verify.ok:
            report.checker_disagreements += 1
            report.violations.append({
                "invariant": "checker-agreement",
                "detail": f"generic={generic_ok} linearization-points={verify.ok}",
                "recipe": list(recipe),
                "events_digest": events_digest(events),
            })
    if terminal_hook is not None:
        terminal_hook(world, events)


@dataclass
class _Frame:
    world: World
    choices: list
    next_choice: int
    suite_snap: tuple
    events_base: int
    recipe_base: int


def explore_exhaustive(cfg: ExplorationConfig,
                       terminal_hook: Optional[Callable] = None) -> Report:
    """DFS over every scheduling (and crash) choice, deduplicating states.

    Monitors run after every step; both linearizability routes run at every
    terminal.  A deterministic ~1% sample of deduplicated states is
    re-verified by full structural comparison to guard the hashing.
    """
    report = Report(config=cfg.to_dict())
    world0 = make_world(cfg)
    suite = MonitorSuite(world0, loop_budget=_loop_budget(cfg))

    visited: dict[bytes, Optional[bytes]] = {}
    path_events: list = []
    recipe: list = []

    blob0 = world0.canonical()
    digest0 = hashlib.blake2b(blob0, digest_size=16).digest()
    visited[digest0] = blob0 if digest0[0] < 3 else None
    report.states_visited += 1
    frames = [_Frame(world0, world0.choices(cfg.crash_set), 0, suite.snapshot(), 0, 0)]

    while frames:
        frame = frames[-1]
        del path_events[frame.events_base:]
        del recipe[frame.recipe_base:]
        if frame.next_choice >= len(frame.choices):
            frames.pop()
            continue
        if report.states_visited > cfg.budget:
            report.budget_exceeded = True
            break
        choice = frame.choices[frame.next_choice]
        frame.next_choice += 1

        suite.restore(frame.suite_snap)
        child = frame.world.fork()
        events = child.apply(choice)
        path_events.extend(events)
        recipe.append(encode_choice(choice))
        for invariant, detail in suite.after_step(child, events):
            report.violations.append({
                "invariant": invariant,
                "detail": detail,
                "recipe": list(recipe),
                "events_digest": events_digest(path_events),
            })

        blob = child.canonical()
        digest = hashlib.blake2b(blob, digest_size=16).digest()
        if digest in visited:
            stored = visited[digest]
            if stored is not None and stored != blob:
                report.violations.append({
                    "invariant": "hash-collision",
                    "detail": "digest matched a structurally different state",
                    "recipe": list(recipe),
                    "events_digest": events_digest(path_events),
                })
            continue
        visited[digest] = blob if digest[0] < 3 else None
        report.states_visited += 1

        if len(recipe) >= cfg.max_steps:
            report.budget_exceeded = True
            continue

        choices = child.choices(cfg.crash_set)
        if not choices:
            report.schedules_completed += 1
            _terminal_checks(report, child, path_events, cfg, recipe, terminal_hook)
            continue
        frames.append(_Frame(child, choices, 0, suite.snapshot(),
                             len(path_events), len(recipe)))

    return report


def detect_progress_cycles(cfg: ExplorationConfig, max_cycles: int = 5) -> Report:
    """Search the reachable state graph for cycles.

    Zero cycles certifies wait-freedom for this finite configuration: every
    edge that could close a cycle is a step of a process stuck inside one
    unfinished operation (clock draws, operation completions, and crashes
    are all monotone, so they cannot appear on a cycle).
    """
    report = Report(config=cfg.to_dict())
    world0 = make_world(cfg)

    GREY, BLACK = 0, 1
    colors: dict[bytes, int] = {}
    stack_pos: dict[bytes, int] = {}
    recipe: list = []

    d0 = world0.digest()
    colors[d0] = GREY
    stack_pos[d0] = 0
    report.states_visited = 1
    frames = [_Frame(world0, world0.choices(cfg.crash_set), 0, (), 0, 0)]
    digests = [d0]

    while frames:
        frame = frames[-1]
        del recipe[frame.recipe_base:]
        if frame.next_choice >= len(frame.choices) or len(report.progress_cycles) >= max_cycles:
            done_digest = digests.pop()
            colors[done_digest] = BLACK
            del stack_pos[done_digest]
            frames.pop()
            continue
        if report.states_visited > cfg.budget or len(frames) > cfg.max_steps:
            report.budget_exceeded = True
            break
        choice = frame.choices[frame.next_choice]
        frame.next_choice += 1

        child = frame.world.fork()
        child.apply(choice)
        recipe.append(encode_choice(choice))
        digest = child.digest()

        color = colors.get(digest)
        if color == GREY:
            start = stack_pos[digest]
            report.progress_cycles.append({
                "pid": choice[1],
                "length": len(digests) - start,
                "states": [d.hex() for d in digests[start:]],
                "recipe": list(recipe),
            })
            continue
        if color == BLACK:
            continue
        colors[digest] = GREY
        stack_pos[digest] = len(digests)
        digests.append(digest)
        report.states_visited += 1

        choices = child.choices(cfg.crash_set)
        if not choices:
            report.schedules_completed += 1
            colors[digest] = BLACK
            digests.pop()
            del stack_pos[digest]
            continue
        frames.append(_Frame(child, choices, 0, (), 0, len(recipe)))

    return report


def explore_random(cfg: ExplorationConfig,
                   terminal_hook: Optional[Callable] = None) -> Report:
    """Sample schedules uniformly at random, reproducibly from the seed."""
    report = Report(config=cfg.to_dict())
    rolling = hashlib.blake2b(digest_size=16)

    for i in range(cfg.samples):
        rng = Random(cfg.seed * 1_000_003 + i)
        world = make_world(cfg)
        suite = MonitorSuite(world, loop_budget=_loop_budget(cfg))
        events: list = []
        recipe: list = []
        while True:
            choices = world.choices(cfg.crash_set)
            if not choices:
                break
            if len(recipe) >= cfg.max_steps:
                report.budget_exceeded = True
                break
            choice = rng.choice(choices)
            stepped = world.apply(choice)
            events.extend(stepped)
            recipe.append(encode_choice(choice))
            for invariant, detail in suite.after_step(world, stepped, random_mode=True):
                report.violations.append({
                    "invariant": invariant,
                    "detail": detail,
                    "sample": i,
                    "recipe": list(recipe),
                    "events_digest": events_digest(events),
                })
        report.states_visited += len(recipe)
        report.schedules_completed += 1
        verify = verify_linearization_points(events, world.spec)
        if not verify.ok:
            report.verify_failures += 1
            report.violations.append({
                "invariant": "linearization-points",
                "detail": verify.reason,
                "sample": i,
                "recipe": list(recipe),
                "events_digest": events_digest(events),
            })
        if terminal_hook is not None:
            terminal_hook(world, events)
        rolling.update(events_digest(events).encode())

    report.events_hash = rolling.hexdigest()
    return report
