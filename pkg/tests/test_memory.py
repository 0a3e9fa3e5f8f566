"""Substrate semantics: swap objects, comparators, counters, both backends."""

from __future__ import annotations

import threading

import pytest
from hypothesis import given, settings, strategies as st

from gcaskit.checker import check_linearizable, project_history
from gcaskit.memory import (
    ArityError,
    BOTTOM,
    EQ,
    NOOP,
    NULL,
    NativeMemory,
    SimMemory,
    TIME_GT,
    compare,
)
from gcaskit.seqtypes import OperationDescriptor

from helpers import CAS_CELL, HistoryBuilder


@pytest.fixture(params=[SimMemory, NativeMemory])
def mem(request):
    return request.param()


def test_alloc_and_read_round_trip(mem):
    noop_cell = mem.alloc_object((0, BOTTOM), name="cell:0")
    announce = mem.alloc_object((0, NOOP, noop_cell), name="A")
    state = mem.alloc_object((0, "s0", BOTTOM, noop_cell), name="S")
    single = mem.alloc_object((5,))
    assert mem.read(announce) == (0, NOOP, noop_cell)
    assert mem.read(state) == (0, "s0", BOTTOM, noop_cell)
    assert mem.read(single) == (5,)


def test_alloc_rejects_bad_arity(mem):
    with pytest.raises(ArityError):
        mem.alloc_object(())
    with pytest.raises(ArityError):
        mem.alloc_object((1, 2, 3, 4, 5))
    with pytest.raises(ArityError):
        mem.alloc_object([1, 2])  # records are tuples


def test_eq_swap_success_and_failure(mem):
    obj = mem.alloc_object((5,))
    assert mem.gcas(EQ, obj, (5,), (7,)) is True
    assert mem.read(obj) == (7,)
    assert mem.gcas(EQ, obj, (5,), (9,)) is False
    assert mem.read(obj) == (7,)


def test_time_gt_swap_lower_timestamp_wins(mem):
    cell = mem.alloc_object((0, BOTTOM), name="cell:1")
    obj = mem.alloc_object((5, "opA", cell), name="A")
    # probe carries only a timestamp; 5 > 3 so the lower-stamped op enters
    assert mem.gcas(TIME_GT, obj, (3,), (3, "opB", cell)) is True
    assert mem.read(obj) == (3, "opB", cell)
    # equal timestamps do not displace
    assert mem.gcas(TIME_GT, obj, (3,), (3, "opC", cell)) is False


def test_time_gt_fails_against_initial_noop_record(mem):
    # the first announce can never enter through the timestamp branch:
    # 0 > 1 is false, so the initial record stays put
    cell = mem.alloc_object((0, BOTTOM), name="cell:0")
    announce = mem.alloc_object((0, NOOP, cell), name="A")
    assert mem.gcas(TIME_GT, announce, (1,), (1, "op", cell)) is False
    assert mem.read(announce) == (0, NOOP, cell)


def test_eq_probe_arity_must_match(mem):
    obj = mem.alloc_object((1, 2, 3))
    with pytest.raises(ArityError):
        mem.gcas(EQ, obj, (1,), (4, 5, 6))


def test_replacement_arity_must_match(mem):
    obj = mem.alloc_object((1, 2))
    with pytest.raises(ArityError):
        mem.gcas(EQ, obj, (1, 2), (1, 2, 3))
    with pytest.raises(ArityError):
        mem.write(obj, (1, 2, 3))


def test_write_is_an_unconditional_store(mem):
    obj = mem.alloc_object((3, NULL))
    mem.write(obj, (4, NULL))
    assert mem.read(obj) == (4, NULL)


def test_fetch_and_increment_starts_at_one(mem):
    ctr = mem.alloc_counter(1)
    assert mem.fetch_and_increment(ctr) == 1
    assert mem.fetch_and_increment(ctr) == 2
    assert mem.fetch_and_increment(ctr) == 3


def test_fetch_and_increment_initial_segment(mem):
    ctr = mem.alloc_counter(1)
    got = [mem.fetch_and_increment(ctr) for _ in range(50)]
    assert got == list(range(1, 51))


def test_unknown_comparator_rejected():
    with pytest.raises(ValueError):
        compare("GE", (1,), (1,))


def test_sentinels_are_distinct():
    assert len({id(NULL), id(BOTTOM), id(NOOP)}) == 3
    assert NULL != BOTTOM and BOTTOM != NOOP and NULL != NOOP
    assert (0, BOTTOM) != (0, NULL)


def test_sim_clone_is_independent():
    mem = SimMemory()
    obj = mem.alloc_object((1,))
    ctr = mem.alloc_counter(1)
    other = mem.clone()
    mem.gcas(EQ, obj, (1,), (2,))
    mem.fetch_and_increment(ctr)
    assert other.read(obj) == (1,)
    assert other.fetch_and_increment(ctr) == 1


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=40))
def test_swap_return_contract(steps):
    # gcas returns true iff the comparator held, and the object changes
    # exactly on success, to exactly the replacement
    mem = SimMemory()
    obj = mem.alloc_object((0,))
    for probe, replacement in steps:
        before = mem.read(obj)
        ok = mem.gcas(EQ, obj, (probe,), (replacement,))
        after = mem.read(obj)
        assert ok == (before == (probe,))
        assert after == ((replacement,) if ok else before)


def _hammer_cell(n_threads=4, ops_each=60):
    mem = NativeMemory()
    obj = mem.alloc_object((0,))
    events = []
    lock = threading.Lock()

    def log(kind, pid, **kw):
        with lock:
            events.append((kind, pid, kw))

    def worker(pid):
        rng_vals = [(pid + k) % 4 for k in range(ops_each)]
        for k, v in enumerate(rng_vals):
            if k % 2 == 0:
                log("invoke", pid, op="read", args=())
                out = mem.read(obj)[0]
                log("response", pid, resp=out)
            else:
                expect, update = v, (v + pid) % 4
                log("invoke", pid, op="cas", args=(expect, update))
                out = mem.gcas(EQ, obj, (expect,), (update,))
                log("response", pid, resp=out)

    threads = [threading.Thread(target=worker, args=(pid,)) for pid in range(1, n_threads + 1)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return events


def test_native_single_cell_operations_linearizable():
    # the substrate's own read/swap history must linearize against the
    # sequential cell semantics
    from gcaskit.checker import Event

    raw = _hammer_cell()
    events = []
    for kind, pid, kw in raw:
        seq = len(events) + 1
        if kind == "invoke":
            events.append(Event(seq, "invoke", pid, op=kw["op"], args=kw["args"]))
        else:
            events.append(Event(seq, "response", pid, resp=kw["resp"]))
    verdict = check_linearizable(project_history(events), CAS_CELL, minimize=False)
    assert verdict.linearizable


def test_native_fetch_and_increment_concurrent_distinct():
    mem = NativeMemory()
    ctr = mem.alloc_counter(1)
    out = [[] for _ in range(4)]

    def worker(i):
        for _ in range(500):
            out[i].append(mem.fetch_and_increment(ctr))

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    everything = sorted(v for chunk in out for v in chunk)
    assert everything == list(range(1, 2001))
