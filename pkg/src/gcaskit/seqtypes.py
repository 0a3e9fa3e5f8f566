"""Sequential type specifications and the built-in example types.

A :class:`TypeSpec` packages an initial state with a deterministic apply
procedure: given an operation and a state it returns the successor state
and the response.  The concurrent construction and both checkers treat the
spec as the single source of truth for what the implemented object should
do when driven sequentially.

Built-ins (selected by name):

* ``counter`` -- fetch-and-add semantics: ``inc`` returns the prior value.
* ``register`` -- ``write(v)`` returns ``"ack"``, ``read`` returns the value.
* ``stack`` -- ``push(v)`` returns ``"ack"``; ``pop`` on an empty stack
  returns the distinguished ``"empty"`` response rather than failing, so
  apply is total.

Responses are never the NULL or BOTTOM sentinels; the construction relies
on that to tell "no response yet" apart from every real response.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from .memory import BOTTOM, NULL

#: Response of a pop on an empty stack.
EMPTY = "empty"
#: Response of operations that only mutate (register write, stack push).
ACK = "ack"


class UnknownOperationError(KeyError):
    """Operation name not in the type's operation set."""


class InvalidResponseError(ValueError):
    """An apply produced a reserved sentinel as its response."""


class HasNameArgs(Protocol):
    name: str
    args: tuple


@dataclass(frozen=True)
class OperationDescriptor:
    """A named operation with arguments, e.g. ``write(5)``."""

    name: str
    args: tuple = ()

    def __repr__(self) -> str:
        inner = ", ".join(repr(a) for a in self.args)
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class TypeSpec:
    """Executable sequential specification: (operations, states, apply)."""

    name: str
    initial_state: Any
    operations: frozenset
    apply_fn: Callable[[str, tuple, Any], tuple] = field(repr=False)


def apply_type(spec: TypeSpec, op: HasNameArgs, state: Any) -> tuple:
    """Apply one operation to a state, returning ``(new_state, response)``."""
    if op.name not in spec.operations:
        raise UnknownOperationError(f"{spec.name} has no operation {op.name!r}")
    new_state, response = spec.apply_fn(op.name, tuple(op.args), state)
    if response is NULL or response is BOTTOM:
        raise InvalidResponseError(
            f"{spec.name}.{op.name} produced reserved sentinel {response!r}"
        )
    return new_state, response


def run_sequential(spec: TypeSpec, ops) -> list:
    """Fold :func:`apply_type` over ``ops`` from the initial state."""
    state = spec.initial_state
    responses = []
    for op in ops:
        state, response = apply_type(spec, op, state)
        responses.append(response)
    return responses


def _counter_apply(name: str, args: tuple, state: int) -> tuple:
    # inc is fetch-and-add: the response is the pre-increment value.
    return state + 1, state


def _register_apply(name: str, args: tuple, state: Any) -> tuple:
    if name == "write":
        return args[0], ACK
    return state, state


def _stack_apply(name: str, args: tuple, state: tuple) -> tuple:
    if name == "push":
        return state + (args[0],), ACK
    if not state:
        return state, EMPTY
    return state[:-1], state[-1]


COUNTER = TypeSpec("counter", 0, frozenset({"inc"}), _counter_apply)
REGISTER = TypeSpec("register", 0, frozenset({"write", "read"}), _register_apply)
STACK = TypeSpec("stack", (), frozenset({"push", "pop"}), _stack_apply)

BUILTIN_TYPES = {spec.name: spec for spec in (COUNTER, REGISTER, STACK)}


def get_type(name: str) -> TypeSpec:
    try:
        return BUILTIN_TYPES[name]
    except KeyError:
        raise UnknownOperationError(
            f"unknown type {name!r}; choose from {sorted(BUILTIN_TYPES)}"
        ) from None
