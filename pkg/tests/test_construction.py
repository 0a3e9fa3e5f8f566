"""Step-machine behaviour of the wait-free construction."""

from __future__ import annotations

import pytest

from gcaskit.construction import (
    SharedObjects,
    StepStateError,
    do_op,
    is_done,
    new_process,
)
from gcaskit.explore import ExplorationConfig, explore_exhaustive, make_world
from gcaskit.memory import BOTTOM, NOOP, NULL, SimMemory
from gcaskit.seqtypes import COUNTER, OperationDescriptor, get_type

inc = OperationDescriptor("inc")


def fresh(spec=COUNTER, procs=1):
    mem = SimMemory()
    shared = SharedObjects.setup(mem, spec)
    ctxs = [new_process(mem, shared, pid) for pid in range(1, procs + 1)]
    return mem, shared, ctxs


def drive(ctx, op, spec):
    """Run one operation to completion, returning (response, step results)."""
    steps = []
    resp = do_op(ctx, op, spec, on_step=steps.append)
    return resp, steps


def test_shared_objects_initial_records():
    mem, shared, _ = fresh()
    assert mem.read(shared.announce) == (0, NOOP, shared.noop_cell)
    assert mem.read(shared.state) == (0, 0, BOTTOM, shared.noop_cell)
    assert mem.read(shared.noop_cell) == (0, BOTTOM)
    assert mem.peek_counter(shared.clock) == 1


def test_new_process_contexts_are_distinct():
    _, shared, (p1, p2) = fresh(procs=2)
    assert p1.pid != p2.pid
    assert p1.cell != p2.cell
    assert p1.cell != shared.noop_cell and p2.cell != shared.noop_cell
    assert p1.idle and p2.idle


def test_solo_inc_bootstrap_trace():
    # hand-derived: the announce comparison at L7 fails against the initial
    # timestamp-0 record all three times; the first announce lands through
    # the equality branch at L13; the operation linearizes at L12 on the
    # second loop pass, the response is copied at L6 on the third, and the
    # return value is 0
    mem, shared, (p1,) = fresh()
    resp, steps = drive(p1, inc, COUNTER)
    assert resp == 0

    labels = [s.label for s in steps if s.shared]
    assert labels == [
        "L2", "L3",
        "L4", "L5", "L6", "L7", "L8", "L9", "L13",
        "L4", "L5", "L6", "L7", "L8", "L9", "L12",
        "L4", "L5", "L6", "L7", "L8", "L9", "L13",
        "L4", "L14",
    ]
    by_label = {}
    for s in steps:
        by_label.setdefault(s.label, []).append(s.outcome)
    assert by_label["L2"] == [1]
    assert by_label["L7"] == [False, False, False]   # 0 > 1 never holds
    assert by_label["L13"] == [True, True]           # bootstrap announce + re-swap
    assert by_label["L12"] == [True]                 # exactly one install
    assert by_label["L6"] == [False, False, True]    # copy lands once

    assert mem.read(shared.state) == (1, 1, 0, p1.cell)
    assert mem.read(shared.announce) == (1, steps[0] and mem.read(shared.announce)[1], p1.cell)[0:3]
    assert mem.read(p1.cell) == (1, 0)


def test_second_op_of_same_process():
    mem, shared, (p1,) = fresh()
    assert do_op(p1, inc, COUNTER) == 0
    assert do_op(p1, inc, COUNTER) == 1
    assert mem.read(shared.state)[1] == 2
    assert mem.read(p1.cell) == (2, 1)


def test_local_steps_touch_no_memory():
    # after L9 the machine passes through L10 (branch) and possibly L11
    # (apply) with no shared access before the next swap
    _, _, (p1,) = fresh()
    p1.begin(inc)
    seen = []
    while True:
        res = p1.step(COUNTER)
        seen.append(res)
        if res.completed:
            break
    after_l9 = [seen[i + 1].label for i, s in enumerate(seen[:-1]) if s.label == "L9"]
    assert set(after_l9) == {"L10"}
    for res in seen:
        assert res.shared == (res.label not in ("L10", "L11"))
        if res.label in ("L10", "L11"):
            assert res.obj is None


def test_step_requires_pending_operation():
    _, _, (p1,) = fresh()
    with pytest.raises(StepStateError):
        p1.step(COUNTER)
    p1.begin(inc)
    with pytest.raises(StepStateError):
        p1.begin(inc)


def test_noop_name_reserved():
    _, _, (p1,) = fresh()
    with pytest.raises(ValueError):
        p1.begin(OperationDescriptor("NOOP"))


def test_is_done_cases():
    mem = SimMemory()
    cell = mem.alloc_object((4, NULL), name="cell:1")
    assert is_done(mem, cell, 4) is False          # (t, NULL): still running
    mem.write(cell, (4, 7))
    assert is_done(mem, cell, 4) is True           # response delivered
    mem.write(cell, (7, NULL))
    assert is_done(mem, cell, 4) is True           # owner moved past t
    assert is_done(mem, cell, 7) is False


def test_two_processes_one_inc_each_any_interleaving():
    # exhaustive search is the oracle: whatever the schedule, the two
    # responses are 0 and 1 in some order and the final count is 2
    outcomes = set()

    def hook(world, events):
        resp = tuple(sorted(ev.resp for ev in events if ev.kind == "response"))
        outcomes.add(resp)
        assert world.mem.read(world.shared.state)[1] == 2

    cfg = ExplorationConfig(spec_name="counter", procs=2, ops_per_proc=1)
    report = explore_exhaustive(cfg, terminal_hook=hook)
    assert report.schedules_completed > 0
    assert not report.violations
    assert outcomes == {(0, 1)}


def test_do_op_on_native_backend():
    from gcaskit.memory import NativeMemory

    mem = NativeMemory()
    shared = SharedObjects.setup(mem, COUNTER)
    p1 = new_process(mem, shared, 1)
    p2 = new_process(mem, shared, 2)
    assert do_op(p1, inc, COUNTER) == 0
    assert do_op(p2, inc, COUNTER) == 1
    assert do_op(p1, inc, COUNTER) == 2
    assert mem.read(shared.state)[1] == 3
