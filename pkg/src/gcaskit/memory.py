"""Atomic shared-memory substrate: swap objects with pluggable comparators.

A *swap object* stores an immutable record (a tuple of one to four fields)
and supports ``read`` and ``gcas``.  ``gcas(cmp, obj, probe, replacement)``
atomically reads the current record, evaluates the comparator against the
probe, and installs the replacement when the comparator holds.  With the
``EQ`` comparator this is the classic compare-and-swap; ``TIME_GT`` compares
only the leading timestamp field, so a probe for it carries just a
timestamp.  A fetch-and-increment counter rounds out the substrate.

Two interchangeable backends share this surface:

* :class:`SimMemory` -- single-threaded, driven by a scheduler.  Every
  operation is one atomic step by construction, and the whole memory can be
  cloned cheaply for state-space search.
* :class:`NativeMemory` -- thread-safe.  Each object carries its own mutex;
  CPython has no compare-exchange on references, so a short critical
  section stands in for the hardware primitive.

Record fields are timestamps (ints), operation instances, responses,
sequential states, handles of other objects, or one of the ``NULL`` /
``BOTTOM`` / ``NOOP`` sentinels.  Records are never mutated, only
superseded; superseded records live for the duration of the run.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any


class Sentinel:
    """Unique marker value, distinct from every response, state, and name."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


#: "no response yet" marker; never a legal response of any sequential type.
NULL = Sentinel("NULL")
#: pre-first-operation response placeholder (distinct from NULL).
BOTTOM = Sentinel("BOTTOM")
#: the fictitious initial operation; its timestamp is 0.
NOOP = Sentinel("NOOP")

SENTINELS = {s.name: s for s in (NULL, BOTTOM, NOOP)}

#: Comparator ids.  The set is closed: the construction only ever compares
#: for structural equality or on the leading timestamp field.
EQ = "EQ"
TIME_GT = "TIME_GT"

Record = tuple


class ArityError(ValueError):
    """Record arity out of range, or probe/replacement arity mismatch."""


@dataclass(frozen=True)
class ObjectHandle:
    """Opaque reference to a swap object.  ``name`` labels it in event logs."""

    id: int
    arity: int
    name: str

    def __post_init__(self):
        object.__setattr__(self, "_repr", f"&{self.name}")

    def __repr__(self) -> str:
        return self._repr


@dataclass(frozen=True)
class CounterHandle:
    """Opaque reference to a fetch-and-increment counter."""

    id: int
    name: str

    def __post_init__(self):
        object.__setattr__(self, "_repr", f"&{self.name}")

    def __repr__(self) -> str:
        return self._repr


def compare(cmp: str, current: Record, probe: Record) -> bool:
    """Evaluate comparator ``cmp`` over (current, probe)."""
    if cmp == EQ:
        if len(probe) != len(current):
            raise ArityError(
                f"EQ probe arity {len(probe)} != object arity {len(current)}"
            )
        return current == probe
    if cmp == TIME_GT:
        # The probe carries only a timestamp; other fields are wildcards.
        return current[0] > probe[0]
    raise ValueError(f"unknown comparator {cmp!r}")


def _check_record(rec: Record) -> None:
    if not isinstance(rec, tuple) or not 1 <= len(rec) <= 4:
        raise ArityError(f"records hold 1..4 fields, got {rec!r}")


class SimMemory:
    """Simulated backend.  Single-threaded; each call is one atomic step.

    The scheduler that drives it is responsible for interleaving; the
    memory itself never blocks and never retries.
    """

    backend = "sim"

    def __init__(self):
        self._records: list[Record] = []
        self._handles: list[ObjectHandle] = []
        self._counters: list[int] = []
        self._counter_handles: list[CounterHandle] = []

    def alloc_object(self, initial: Record, name: str | None = None) -> ObjectHandle:
        _check_record(initial)
        handle = ObjectHandle(len(self._records), len(initial), name or f"obj:{len(self._records)}")
        self._records.append(initial)
        self._handles.append(handle)
        return handle

    def read(self, obj: ObjectHandle) -> Record:
        return self._records[obj.id]

    def write(self, obj: ObjectHandle, rec: Record) -> None:
        """Unconditional atomic store (used only by an object's owner)."""
        if len(rec) != obj.arity:
            raise ArityError(f"write arity {len(rec)} != object arity {obj.arity}")
        self._records[obj.id] = rec

    def gcas(self, cmp: str, obj: ObjectHandle, probe: Record, replacement: Record) -> bool:
        if len(replacement) != obj.arity:
            raise ArityError(
                f"replacement arity {len(replacement)} != object arity {obj.arity}"
            )
        current = self._records[obj.id]
        if compare(cmp, current, probe):
            self._records[obj.id] = replacement
            return True
        return False

    def alloc_counter(self, initial: int = 1, name: str = "C") -> CounterHandle:
        handle = CounterHandle(len(self._counters), name)
        self._counters.append(initial)
        self._counter_handles.append(handle)
        return handle

    def fetch_and_increment(self, ctr: CounterHandle) -> int:
        value = self._counters[ctr.id]
        self._counters[ctr.id] = value + 1
        return value

    def peek_counter(self, ctr: CounterHandle) -> int:
        """Current counter value without incrementing (inspection only)."""
        return self._counters[ctr.id]

    def clone(self) -> "SimMemory":
        other = SimMemory.__new__(SimMemory)
        other._records = list(self._records)
        other._handles = self._handles
        other._counters = list(self._counters)
        other._counter_handles = self._counter_handles
        return other

    def canonical(self) -> tuple:
        """Hashable snapshot of all object contents and counter values."""
        return (tuple(self._records), tuple(self._counters))


class NativeMemory:
    """Thread-safe backend: one mutex per object makes each update atomic.

    Coarser than an identity-swap loop on real hardware, but linearizable
    for the same reason a hardware CAS is: the read-compare-install is a
    single critical section.  Reads skip the mutex: a single list-element
    load is atomic under CPython's GIL, and it observes either the record
    before a concurrent swap or the one after, both of which are valid
    linearizations of the read.
    """

    backend = "native"

    def __init__(self):
        self._records: list[Record] = []
        self._locks: list[threading.Lock] = []
        self._counters: list[int] = []
        self._counter_locks: list[threading.Lock] = []
        self._alloc_lock = threading.Lock()

    def alloc_object(self, initial: Record, name: str | None = None) -> ObjectHandle:
        _check_record(initial)
        with self._alloc_lock:
            handle = ObjectHandle(len(self._records), len(initial), name or f"obj:{len(self._records)}")
            self._records.append(initial)
            self._locks.append(threading.Lock())
        return handle

    def read(self, obj: ObjectHandle) -> Record:
        return self._records[obj.id]

    def write(self, obj: ObjectHandle, rec: Record) -> None:
        if len(rec) != obj.arity:
            raise ArityError(f"write arity {len(rec)} != object arity {obj.arity}")
        with self._locks[obj.id]:
            self._records[obj.id] = rec

    def gcas(self, cmp: str, obj: ObjectHandle, probe: Record, replacement: Record) -> bool:
        if len(replacement) != obj.arity:
            raise ArityError(
                f"replacement arity {len(replacement)} != object arity {obj.arity}"
            )
        with self._locks[obj.id]:
            current = self._records[obj.id]
            if compare(cmp, current, probe):
                self._records[obj.id] = replacement
                return True
            return False

    def alloc_counter(self, initial: int = 1, name: str = "C") -> CounterHandle:
        with self._alloc_lock:
            handle = CounterHandle(len(self._counters), name)
            self._counters.append(initial)
            self._counter_locks.append(threading.Lock())
        return handle

    def fetch_and_increment(self, ctr: CounterHandle) -> int:
        with self._counter_locks[ctr.id]:
            value = self._counters[ctr.id]
            self._counters[ctr.id] = value + 1
            return value


Memory = Any  # SimMemory | NativeMemory; both expose the same surface
