"""Histories and linearizability checking.

Two independent routes decide whether a recorded run is linearizable:

* :func:`check_linearizable` -- generic search over completions and
  operation orders.  It knows nothing about how the history was produced:
  it enumerates every way to complete pending operations (keep with a
  conforming response, or drop) and every operation order consistent with
  real-time precedence, pruning with a memo on (placed-operations, state).
* :func:`verify_linearization_points` -- the construction-specific route.
  It reads the low-level steps, takes each operation's successful L12
  install on the state object as its linearization point, completes pending
  operations that were linearized with the response the install wrote
  (dropping the rest), and replays that order sequentially.

A third, deliberately naive route, :func:`check_linearizable_bruteforce`,
enumerates keep/drop subsets and raw permutations with no pruning at all;
it exists purely as an oracle for the search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Any, Optional

from .construction import OpInstance
from .seqtypes import TypeSpec, apply_type, run_sequential


@dataclass(frozen=True)
class Event:
    """One history entry: an invocation, a response, or a low-level step."""

    seq: int
    kind: str                   # "invoke" | "response" | "step"
    pid: int
    op: Optional[str] = None    # invoke: operation name
    args: tuple = ()            # invoke: operation arguments
    resp: Any = None            # response: the returned value
    step: Optional[str] = None  # step: label L2..L14
    obj: Optional[str] = None   # step: accessed object name
    outcome: Any = None         # step: read value / swap success / counter value


class MalformedHistoryError(ValueError):
    """Per-process event pattern broken (e.g. response without invoke)."""


@dataclass(frozen=True)
class OpExec:
    """One operation execution extracted from a history."""

    key: tuple                  # (pid, per-pid index)
    pid: int
    name: str
    args: tuple
    inv_seq: int
    resp_seq: Optional[int]     # None while pending
    resp: Any = None

    @property
    def pending(self) -> bool:
        return self.resp_seq is None


def project_history(events) -> list:
    """Keep only invocation and response events, validating the per-process
    invoke / steps* / response pattern along the way."""
    pending: dict[int, bool] = {}
    projected = []
    for ev in events:
        busy = pending.get(ev.pid, False)
        if ev.kind == "invoke":
            if busy:
                raise MalformedHistoryError(
                    f"seq {ev.seq}: process {ev.pid} invoked while mid-operation"
                )
            pending[ev.pid] = True
            projected.append(ev)
        elif ev.kind == "response":
            if not busy:
                raise MalformedHistoryError(
                    f"seq {ev.seq}: process {ev.pid} responded with no pending invoke"
                )
            pending[ev.pid] = False
            projected.append(ev)
        elif ev.kind == "step":
            if not busy:
                raise MalformedHistoryError(
                    f"seq {ev.seq}: process {ev.pid} stepped with no pending invoke"
                )
        else:
            raise MalformedHistoryError(f"seq {ev.seq}: unknown kind {ev.kind!r}")
    return projected


def extract_ops(history) -> list:
    """Pair up invokes with their matching responses, in invocation order."""
    open_ops: dict[int, dict] = {}
    counts: dict[int, int] = {}
    ops: list[OpExec] = []
    order: list[tuple] = []
    for ev in history:
        if ev.kind == "invoke":
            idx = counts.get(ev.pid, 0)
            counts[ev.pid] = idx + 1
            open_ops[ev.pid] = {"key": (ev.pid, idx), "name": ev.op,
                                "args": tuple(ev.args), "inv": ev.seq}
            order.append((ev.pid, idx))
        elif ev.kind == "response":
            info = open_ops.pop(ev.pid)
            ops.append(OpExec(info["key"], ev.pid, info["name"], info["args"],
                              info["inv"], ev.seq, ev.resp))
    for info in open_ops.values():
        ops.append(OpExec(info["key"], info["key"][0], info["name"],
                          info["args"], info["inv"], None))
    ops.sort(key=lambda o: o.inv_seq)
    return ops


@dataclass
class Witness:
    """A conforming linearization: order, responses, and points.

    Each point is a Fraction strictly inside its operation's interval in
    sequence-number coordinates, and the points strictly increase.
    """

    order: list                 # OpExec in linearization order
    responses: list
    points: list


@dataclass
class Verdict:
    status: str                             # "yes" | "no" | "budget"
    witness: Optional[Witness] = None
    counterexample: Optional[list] = None   # minimal non-linearizable prefix

    @property
    def linearizable(self) -> bool:
        return self.status == "yes"


class BudgetExceeded(Exception):
    pass


def _assign_points(order, max_seq: int) -> list:
    """Smallest-first point placement; feasible for any precedence-respecting
    order because a later op's response always trails every placed invoke."""
    eps = Fraction(1, len(order) + 1) if order else Fraction(0)
    points = []
    prev = Fraction(0)
    for op in order:
        point = max(prev, Fraction(op.inv_seq)) + eps
        hi = Fraction(op.resp_seq) if op.resp_seq is not None else Fraction(max_seq + 1)
        if not (Fraction(op.inv_seq) < point < hi):
            raise AssertionError("point assignment left an operation's interval")
        points.append(point)
        prev = point
    return points


def check_linearizable(history, spec: TypeSpec, budget: int = 2_000_000,
                       minimize: bool = True) -> Verdict:
    """Decide linearizability of an invoke/response history against a spec.

    Pending operations may be completed with any response the type can
    produce at their chosen point, or dropped.  On "no", the counterexample
    is the shortest prefix of the history that is already non-linearizable.
    On "budget" the search gave up; that is reported distinctly from "no".
    """
    try:
        witness = _search(history, spec, budget)
    except BudgetExceeded:
        return Verdict("budget")
    if witness is not None:
        replayed = run_sequential(spec, witness.order)
        if replayed != witness.responses:
            raise AssertionError("witness failed its own sequential replay")
        return Verdict("yes", witness=witness)
    counterexample = None
    if minimize:
        counterexample = _minimal_prefix(history, spec, budget)
    return Verdict("no", counterexample=counterexample)


def _search(history, spec: TypeSpec, budget: int) -> Optional[Witness]:
    ops = extract_ops(history)
    n = len(ops)
    if n == 0:
        return Witness([], [], [])
    max_seq = max(ev.seq for ev in history)

    # preds[i]: bitmask of ops whose response precedes op i's invoke.
    preds = [0] * n
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            if i != j and b.resp_seq is not None and b.resp_seq < a.inv_seq:
                preds[i] |= 1 << j

    complete_mask = 0
    for i, op in enumerate(ops):
        if not op.pending:
            complete_mask |= 1 << i

    seen: set = set()
    nodes = 0

    def dfs(placed: int, state) -> Optional[list]:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded
        if placed & complete_mask == complete_mask:
            return []
        key = (placed, state)
        if key in seen:
            return None
        seen.add(key)
        for i in range(n):
            bit = 1 << i
            if placed & bit or preds[i] & ~placed:
                continue
            op = ops[i]
            new_state, response = apply_type(spec, op, state)
            if not op.pending and response != op.resp:
                continue
            tail = dfs(placed | bit, new_state)
            if tail is not None:
                return [(i, response)] + tail
        return None

    chosen = dfs(0, spec.initial_state)
    if chosen is None:
        return None
    order = [ops[i] for i, _ in chosen]
    responses = [r for _, r in chosen]
    return Witness(order, responses, _assign_points(order, max_seq))


def _minimal_prefix(history, spec: TypeSpec, budget: int) -> list:
    for k in range(1, len(history) + 1):
        prefix = list(history[:k])
        if _search(prefix, spec, budget) is None:
            return prefix
    raise AssertionError("full history was linearizable after all")


def check_linearizable_bruteforce(history, spec: TypeSpec) -> bool:
    """Reference decision by raw enumeration: every keep/drop choice for
    pending operations, every permutation, no pruning.  Exponential; only
    for cross-checking the search on tiny histories."""
    ops = extract_ops(history)
    complete = [o for o in ops if not o.pending]
    pending = [o for o in ops if o.pending]

    def respects_precedence(order) -> bool:
        for i, a in enumerate(order):
            for b in order[i + 1:]:
                if b.resp_seq is not None and b.resp_seq < a.inv_seq:
                    return False
        return True

    def conforms(order) -> bool:
        state = spec.initial_state
        for op in order:
            state, response = apply_type(spec, op, state)
            if not op.pending and response != op.resp:
                return False
        return True

    for keep_mask in range(1 << len(pending)):
        kept = [p for i, p in enumerate(pending) if keep_mask >> i & 1]
        for order in permutations(complete + kept):
            if respects_precedence(order) and conforms(order):
                return True
    return False


@dataclass
class VerifyResult:
    """Outcome of the linearization-point route."""

    ok: bool
    reason: Optional[str] = None
    order: list = field(default_factory=list)       # OpExec in install order
    responses: list = field(default_factory=list)


def verify_linearization_points(events, spec: TypeSpec) -> VerifyResult:
    """Check a full low-level history via its L12 linearization points.

    Replays each process's recorded step outcomes to reconstruct what every
    successful L12 installed, then demands: at most one successful install
    per operation; every completed operation has exactly one; the installed
    responses replayed in install order match both the recorded returns and
    a sequential run of the spec; and every install lies strictly inside
    its operation's execution interval.

    Pending operations with an install are completed with the installed
    response; pending operations without one are dropped.
    """
    ops = {o.key: o for o in extract_ops(project_history(events))}
    installs: dict[tuple, list] = {key: [] for key in ops}

    class _PerPid:
        __slots__ = ("state_snap", "announce_snap")

        def __init__(self):
            self.state_snap = None
            self.announce_snap = None

    procs: dict[int, _PerPid] = {}

    for ev in events:
        ctx = procs.setdefault(ev.pid, _PerPid())
        if ev.kind == "step":
            if ev.step == "L5":
                ctx.state_snap = ev.outcome
            elif ev.step == "L8":
                ctx.announce_snap = ev.outcome
            elif ev.step == "L12" and ev.outcome:
                t_a, announced_op, _ = ctx.announce_snap
                if not isinstance(announced_op, OpInstance):
                    return VerifyResult(False, f"seq {ev.seq}: L12 installed {announced_op!r}")
                _, installed_resp = apply_type(spec, announced_op, ctx.state_snap[1])
                installs.setdefault(announced_op.key, []).append((ev.seq, installed_resp))

    for key, hits in installs.items():
        if len(hits) > 1:
            return VerifyResult(False, f"operation {key} linearized {len(hits)} times")

    chosen = []
    for key, op in ops.items():
        hits = installs.get(key, [])
        if not hits:
            if not op.pending:
                return VerifyResult(False, f"completed operation {key} has no install")
            continue  # pending, never linearized: dropped from the completion
        seq, installed_resp = hits[0]
        expected = op.resp if not op.pending else installed_resp
        if not op.pending and installed_resp != op.resp:
            return VerifyResult(
                False, f"operation {key} returned {op.resp!r}, installed {installed_resp!r}")
        if not op.inv_seq < seq:
            return VerifyResult(False, f"operation {key} linearized before its invoke")
        if op.resp_seq is not None and not seq < op.resp_seq:
            return VerifyResult(False, f"operation {key} linearized after its response")
        chosen.append((seq, op, expected))

    chosen.sort(key=lambda item: item[0])
    order = [op for _, op, _ in chosen]
    expected_responses = [r for _, _, r in chosen]
    replayed = run_sequential(spec, order)
    if replayed != expected_responses:
        return VerifyResult(False,
                            f"sequential replay {replayed!r} != installed {expected_responses!r}",
                            order, expected_responses)
    return VerifyResult(True, None, order, expected_responses)
