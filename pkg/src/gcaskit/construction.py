"""Wait-free shared object driven by a timestamp clock and two swap objects.

Any sequential :class:`~gcaskit.seqtypes.TypeSpec` becomes a linearizable,
wait-free concurrent object.  The shared layout:

* ``C`` -- fetch-and-increment clock, starts at 1; every operation draws a
  unique timestamp from it.  Lower timestamp = higher priority.
* ``A`` -- announce object ``(time, op, cell)``: the operation everyone
  should help finish next.  Initially ``(0, NOOP, cell:0)``.
* ``S`` -- state object ``(time, state, response, cell)``: the implemented
  object's current state together with the response of the operation that
  produced it.  Initially ``(0, s0, BOTTOM, cell:0)``.
* ``cell:<pid>`` -- one two-field response cell ``(time, response)`` per
  process, through which helpers deliver results.  ``cell:0`` is the
  immutable ``(0, BOTTOM)`` cell owned by the fictitious NOOP operation.

Each process runs a small step machine; one shared-memory access per step.
The labels and what they do:

====== =======================================================
 L2     draw a timestamp t from C
 L3     reset own cell to (t, NULL)
 L4     loop test: read own cell; leave the loop once a
        response has been delivered
 L5     read S
 L6     copy the response sitting in S into its owner's cell
        (this is the helping hand that makes crashed or slow
        owners' operations observably finished)
 L7     announce own operation: swap A if our timestamp is
        strictly lower than the announced one
 L8     read A
 L9     read the announced operation's cell
 L10    branch: announced operation still unfinished?
 L11    apply the announced operation to the state read at L5
 L12    install the new state in S (equality swap against the
        L5 snapshot); a success is the announced operation's
        linearization point
 L13    announced operation already finished: swap it out of A
        for our own (equality swap against the L8 snapshot)
 L14    read own cell and return its response field
====== =======================================================

L10 and L11 touch no shared memory.  A scheduler that wants one shared
access per scheduling point can run them fused with the following L12/L13
(see :mod:`gcaskit.explore`).

The very first announce necessarily goes through L13: A starts with
timestamp 0 and the strictly-lower comparison at L7 fails against it, but
the NOOP occupant of A is born finished (its cell reads ``(0, BOTTOM)``,
and BOTTOM is not NULL), so the L10 branch sends the process to L13.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Optional

from .memory import BOTTOM, EQ, NOOP, NULL, TIME_GT, CounterHandle, Memory, ObjectHandle, Record
from .seqtypes import TypeSpec, apply_type

IDLE = "idle"

#: Step labels that perform exactly one shared-memory access.
SHARED_STEPS = frozenset({"L2", "L3", "L4", "L5", "L6", "L7", "L8", "L9", "L12", "L13", "L14"})
#: Step labels that touch no shared memory.
LOCAL_STEPS = frozenset({"L10", "L11"})

#: Supported algorithm mutations (for monitor sensitivity testing only).
#: ``drop_help_copy`` deletes the L6 copy step; ``announce_eq`` replaces the
#: timestamp comparison at L7 with plain equality.
MUTATIONS = frozenset({"drop_help_copy", "announce_eq"})

STEP_NOTES = {
    "L2": "draw a timestamp from the clock",
    "L3": "reset own response cell to (t, NULL)",
    "L4": "loop test: has a response been delivered?",
    "L5": "read the state object",
    "L6": "copy the last response into its owner's cell",
    "L7": "announce own operation if it has a strictly lower timestamp",
    "L8": "read the announce object",
    "L9": "read the announced operation's response cell",
    "L10": "branch: is the announced operation unfinished?",
    "L11": "apply the announced operation to the snapshotted state",
    "L12": "try to install the new state (linearization point on success)",
    "L13": "announced operation is finished: swap own operation in",
    "L14": "read own response cell and return the response",
}


class StepStateError(RuntimeError):
    """Stepping a context that has no pending operation."""


@dataclass(frozen=True)
class OpInstance:
    """One operation execution: which process issued which op, in order."""

    pid: int
    idx: int
    name: str
    args: tuple = ()

    def __post_init__(self):
        inner = ", ".join(repr(a) for a in self.args)
        object.__setattr__(self, "_repr", f"{self.name}({inner})@p{self.pid}.{self.idx}")

    @property
    def key(self) -> tuple:
        return (self.pid, self.idx)

    def __repr__(self) -> str:
        return self._repr


@dataclass(frozen=True)
class SharedObjects:
    """The clock, announce, and state objects plus the NOOP cell."""

    clock: CounterHandle
    announce: ObjectHandle
    state: ObjectHandle
    noop_cell: ObjectHandle

    @classmethod
    def setup(cls, mem: Memory, spec: TypeSpec) -> "SharedObjects":
        noop_cell = mem.alloc_object((0, BOTTOM), name="cell:0")
        clock = mem.alloc_counter(1, name="C")
        announce = mem.alloc_object((0, NOOP, noop_cell), name="A")
        state = mem.alloc_object((0, spec.initial_state, BOTTOM, noop_cell), name="S")
        return cls(clock, announce, state, noop_cell)


class StepResult(NamedTuple):
    """Outcome of one step: what ran, what it touched, what it saw."""

    label: str
    obj: Optional[str]          # name of the accessed object, None for local steps
    outcome: Any                # read value, swap success, or counter response
    shared: bool
    completed: bool = False
    response: Any = None


class ProcessContext:
    """Per-process execution state: response cell, program counter, locals.

    Owned by exactly one logical process.  On the simulated backend all
    contexts are stepped by one scheduler; on the native backend each
    thread drives its own context to completion via :func:`do_op`.
    """

    __slots__ = (
        "pid", "mem", "shared", "cell", "pc", "op", "t",
        "state_snap", "announce_snap", "cell_snap", "applied",
        "ops_started", "mutations",
    )

    def __init__(self, pid: int, mem: Memory, shared: SharedObjects,
                 cell: ObjectHandle, mutations: frozenset = frozenset()):
        self.pid = pid
        self.mem = mem
        self.shared = shared
        self.cell = cell
        self.pc = IDLE
        self.op: Optional[OpInstance] = None
        self.t: Optional[int] = None
        self.state_snap: Optional[Record] = None      # (t*, s*, r*, cell*) from L5
        self.announce_snap: Optional[Record] = None   # (t', o', cell') from L8
        self.cell_snap: Optional[Record] = None       # (t^, r^) from L9
        self.applied: Optional[tuple] = None          # (s', r') from L11
        self.ops_started = 0
        self.mutations = mutations

    @property
    def idle(self) -> bool:
        return self.pc == IDLE

    def begin(self, op) -> OpInstance:
        """Start executing an operation; returns its instance identity."""
        if not self.idle:
            raise StepStateError(f"process {self.pid} already mid-operation")
        if op.name is NOOP or op.name == "NOOP":
            raise ValueError("NOOP is reserved for the initial announce record")
        inst = OpInstance(self.pid, self.ops_started, op.name, tuple(op.args))
        self.ops_started += 1
        self.op = inst
        self.pc = "L2"
        return inst

    def step(self, spec: TypeSpec) -> StepResult:
        """Execute exactly one step label and advance the program counter."""
        mem, shared, pc = self.mem, self.shared, self.pc

        if pc == "L2":
            self.t = mem.fetch_and_increment(shared.clock)
            self.pc = "L3"
            return StepResult("L2", shared.clock.name, self.t, True)

        if pc == "L3":
            mem.write(self.cell, (self.t, NULL))
            self.pc = "L4"
            return StepResult("L3", self.cell.name, None, True)

        if pc == "L4":
            rec = mem.read(self.cell)
            self.pc = "L5" if rec == (self.t, NULL) else "L14"
            return StepResult("L4", self.cell.name, rec, True)

        if pc == "L5":
            self.state_snap = mem.read(shared.state)
            self.pc = "L7" if "drop_help_copy" in self.mutations else "L6"
            return StepResult("L5", shared.state.name, self.state_snap, True)

        if pc == "L6":
            t_s, _, r_s, owner_cell = self.state_snap
            ok = mem.gcas(EQ, owner_cell, (t_s, NULL), (t_s, r_s))
            self.pc = "L7"
            return StepResult("L6", owner_cell.name, ok, True)

        if pc == "L7":
            replacement = (self.t, self.op, self.cell)
            if "announce_eq" in self.mutations:
                ok = mem.gcas(EQ, shared.announce, replacement, replacement)
            else:
                ok = mem.gcas(TIME_GT, shared.announce, (self.t,), replacement)
            self.pc = "L8"
            return StepResult("L7", shared.announce.name, ok, True)

        if pc == "L8":
            self.announce_snap = mem.read(shared.announce)
            self.pc = "L9"
            return StepResult("L8", shared.announce.name, self.announce_snap, True)

        if pc == "L9":
            announced_cell = self.announce_snap[2]
            self.cell_snap = mem.read(announced_cell)
            self.pc = "L10"
            return StepResult("L9", announced_cell.name, self.cell_snap, True)

        if pc == "L10":
            t_a = self.announce_snap[0]
            unfinished = self.cell_snap == (t_a, NULL)
            self.pc = "L11" if unfinished else "L13"
            return StepResult("L10", None, unfinished, False)

        if pc == "L11":
            _, announced_op, _ = self.announce_snap
            self.applied = apply_type(spec, announced_op, self.state_snap[1])
            self.pc = "L12"
            return StepResult("L11", None, None, False)

        if pc == "L12":
            t_a, _, announced_cell = self.announce_snap
            new_state, new_resp = self.applied
            ok = mem.gcas(EQ, shared.state, self.state_snap,
                          (t_a, new_state, new_resp, announced_cell))
            self.pc = "L4"
            return StepResult("L12", shared.state.name, ok, True)

        if pc == "L13":
            ok = mem.gcas(EQ, shared.announce, self.announce_snap,
                          (self.t, self.op, self.cell))
            self.pc = "L4"
            return StepResult("L13", shared.announce.name, ok, True)

        if pc == "L14":
            rec = mem.read(self.cell)
            response = rec[1]
            self.op = None
            self.pc = IDLE
            return StepResult("L14", self.cell.name, response, True,
                              completed=True, response=response)

        raise StepStateError(f"process {self.pid} has no pending operation (pc={pc})")

    def clone(self, mem: Memory) -> "ProcessContext":
        other = ProcessContext.__new__(ProcessContext)
        other.pid = self.pid
        other.mem = mem
        other.shared = self.shared
        other.cell = self.cell
        other.pc = self.pc
        other.op = self.op
        other.t = self.t
        other.state_snap = self.state_snap
        other.announce_snap = self.announce_snap
        other.cell_snap = self.cell_snap
        other.applied = self.applied
        other.ops_started = self.ops_started
        other.mutations = self.mutations
        return other

    def snapshot(self) -> tuple:
        """Hashable view of everything that influences future behaviour."""
        return (
            self.pid, self.pc, self.op, self.t,
            self.state_snap, self.announce_snap, self.cell_snap,
            self.applied, self.ops_started,
        )


def new_process(mem: Memory, shared: SharedObjects, pid: int,
                mutations: frozenset = frozenset()) -> ProcessContext:
    """Join the computation: allocate a fresh response cell and context."""
    cell = mem.alloc_object((0, BOTTOM), name=f"cell:{pid}")
    return ProcessContext(pid, mem, shared, cell, mutations)


def do_op(ctx: ProcessContext, op, spec: TypeSpec,
          on_step: Optional[Callable[[StepResult], None]] = None) -> Any:
    """Drive one operation to completion with the calling thread.

    This is the native-backend entry point; the simulated backend steps the
    same machine from a scheduler instead.
    """
    ctx.begin(op)
    while True:
        result = ctx.step(spec)
        if on_step is not None:
            on_step(result)
        if result.completed:
            return result.response


def is_done(mem: Memory, cell: ObjectHandle, t: int) -> bool:
    """Has the operation with timestamp ``t`` and response cell ``cell``
    observably finished?

    True when the cell holds a response for ``t``, or a timestamp past
    ``t`` (its owner already moved on, which implies it collected the
    response first).
    """
    cell_t, cell_r = mem.read(cell)
    return cell_t > t or (cell_t == t and cell_r is not NULL)
