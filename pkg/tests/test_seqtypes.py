"""Sequential type semantics and the fold over operation lists."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from gcaskit.memory import BOTTOM, NULL
from gcaskit.seqtypes import (
    ACK,
    BUILTIN_TYPES,
    COUNTER,
    EMPTY,
    REGISTER,
    STACK,
    OperationDescriptor,
    UnknownOperationError,
    apply_type,
    get_type,
    run_sequential,
)

inc = OperationDescriptor("inc")
read = OperationDescriptor("read")


def write(v):
    return OperationDescriptor("write", (v,))


def push(v):
    return OperationDescriptor("push", (v,))


pop = OperationDescriptor("pop")


def test_counter_is_fetch_and_add():
    assert apply_type(COUNTER, inc, 0) == (1, 0)
    assert apply_type(COUNTER, inc, 41) == (42, 41)


def test_register_write_then_read():
    assert apply_type(REGISTER, write(5), 0) == (5, ACK)
    assert apply_type(REGISTER, read, 5) == (5, 5)


def test_stack_pop_empty_yields_empty_response():
    assert apply_type(STACK, pop, ()) == ((), EMPTY)
    assert apply_type(STACK, push(3), ()) == ((3,), ACK)
    assert apply_type(STACK, pop, (3, 7)) == ((3,), 7)


def test_unknown_operation_raises():
    with pytest.raises(UnknownOperationError):
        apply_type(COUNTER, OperationDescriptor("dec"), 0)


def test_run_sequential_counter():
    assert run_sequential(COUNTER, [inc, inc, inc]) == [0, 1, 2]


def test_run_sequential_empty():
    for spec in BUILTIN_TYPES.values():
        assert run_sequential(spec, []) == []


def test_run_sequential_register():
    assert run_sequential(REGISTER, [write(3), read]) == [ACK, 3]


def test_get_type_lookup():
    assert get_type("counter") is COUNTER
    with pytest.raises(UnknownOperationError):
        get_type("queue")


@given(st.integers(1, 60))
def test_counter_law(k):
    responses = run_sequential(COUNTER, [inc] * k)
    assert responses == list(range(k))


def _ops_for(spec_name):
    if spec_name == "counter":
        return st.just(inc)
    if spec_name == "register":
        return st.one_of(st.just(read), st.integers(0, 9).map(write))
    return st.one_of(st.just(pop), st.integers(0, 9).map(push))


@given(st.sampled_from(sorted(BUILTIN_TYPES)), st.data())
def test_fold_splits_anywhere(spec_name, data):
    # running xs ++ ys equals running xs, then ys from the folded state
    spec = BUILTIN_TYPES[spec_name]
    ops = data.draw(st.lists(_ops_for(spec_name), max_size=12))
    cut = data.draw(st.integers(0, len(ops)))
    whole = run_sequential(spec, ops)

    state = spec.initial_state
    first = []
    for op in ops[:cut]:
        state, r = apply_type(spec, op, state)
        first.append(r)
    rest = []
    for op in ops[cut:]:
        state, r = apply_type(spec, op, state)
        rest.append(r)
    assert whole == first + rest


@given(st.sampled_from(sorted(BUILTIN_TYPES)), st.data())
def test_responses_never_sentinels(spec_name, data):
    spec = BUILTIN_TYPES[spec_name]
    ops = data.draw(st.lists(_ops_for(spec_name), max_size=15))
    for response in run_sequential(spec, ops):
        assert response is not NULL
        assert response is not BOTTOM
