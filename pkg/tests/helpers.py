"""Shared test apparatus: hand-history builders, the small-history
enumerator used for oracle equivalence, and a sequential spec for a single
swap cell."""

from __future__ import annotations

from gcaskit.checker import Event
from gcaskit.seqtypes import TypeSpec


class HistoryBuilder:
    """Build invoke/response histories by hand with automatic sequencing."""

    def __init__(self):
        self.events = []

    def invoke(self, pid, name, *args):
        self.events.append(Event(len(self.events) + 1, "invoke", pid,
                                 op=name, args=tuple(args)))
        return self

    def resp(self, pid, value):
        self.events.append(Event(len(self.events) + 1, "response", pid, resp=value))
        return self


REGISTER_OPS = (("read", ()), ("write", (0,)), ("write", (1,)))


def _responses_for(name):
    return (0, 1) if name == "read" else ("ack",)


def enumerate_register_histories(max_events: int) -> list:
    """Every history of at most ``max_events`` events over a two-valued
    register, canonical up to process renaming (fresh pids appear in
    first-use order, so no two generated histories differ only by a pid
    permutation)."""
    out = []

    def extend(events, pending, idle, used):
        if events:
            out.append(list(events))
        if len(events) >= max_events:
            return
        seq = len(events) + 1
        for pid in sorted(pending):
            name = pending[pid]
            for resp in _responses_for(name):
                events.append(Event(seq, "response", pid, resp=resp))
                del pending[pid]
                idle.add(pid)
                extend(events, pending, idle, used)
                idle.discard(pid)
                pending[pid] = name
                events.pop()
        candidates = sorted(idle) + ([used + 1] if used < max_events else [])
        for pid in candidates:
            fresh = pid > used
            for name, args in REGISTER_OPS:
                events.append(Event(seq, "invoke", pid, op=name, args=args))
                pending[pid] = name
                if fresh:
                    extend(events, pending, idle, used + 1)
                else:
                    idle.discard(pid)
                    extend(events, pending, idle, used)
                    idle.add(pid)
                del pending[pid]
                events.pop()

    extend([], {}, set(), 0)
    return out


def _cell_apply(name, args, state):
    if name == "read":
        return state, state
    expect, update = args
    if state == expect:
        return update, True
    return state, False


#: Sequential behaviour of one compare-and-swap cell over small ints; used
#: to check the native substrate's own operations for linearizability.
CAS_CELL = TypeSpec("cas-cell", 0, frozenset({"read", "cas"}), _cell_apply)
