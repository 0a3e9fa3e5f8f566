"""Real-thread driver for the construction on the native backend.

Each worker thread owns one process context and drives its operations to
completion with :func:`~gcaskit.construction.do_op`.  Invocations and
responses are appended to a shared, lock-ordered log, so the recorded
history is consistent with real time: an invoke is logged before its first
memory access and a response after its last.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .checker import Event
from .construction import SharedObjects, do_op, new_process
from .memory import NativeMemory
from .seqtypes import TypeSpec


class HistoryRecorder:
    """Thread-safe invoke/response log with a global sequence order."""

    def __init__(self):
        self._lock = threading.Lock()
        self.events: list = []

    def invoke(self, pid: int, op) -> None:
        with self._lock:
            self.events.append(Event(len(self.events) + 1, "invoke", pid,
                                     op=op.name, args=tuple(op.args)))

    def response(self, pid: int, resp) -> None:
        with self._lock:
            self.events.append(Event(len(self.events) + 1, "response", pid, resp=resp))


@dataclass
class StressResult:
    final_state: object
    responses: dict = field(default_factory=dict)   # pid -> list of responses
    events: list = field(default_factory=list)

    @property
    def all_responses(self) -> list:
        out = []
        for pid in sorted(self.responses):
            out.extend(self.responses[pid])
        return out


def run_native(spec: TypeSpec, workloads, record: bool = True) -> StressResult:
    """Run one operation list per thread against a fresh native object."""
    mem = NativeMemory()
    shared = SharedObjects.setup(mem, spec)
    recorder = HistoryRecorder() if record else None
    ctxs = {pid: new_process(mem, shared, pid) for pid in range(1, len(workloads) + 1)}
    responses: dict[int, list] = {pid: [] for pid in ctxs}

    def worker(pid: int, ops) -> None:
        ctx = ctxs[pid]
        out = responses[pid]
        for op in ops:
            if recorder is not None:
                recorder.invoke(pid, op)
            resp = do_op(ctx, op, spec)
            if recorder is not None:
                recorder.response(pid, resp)
            out.append(resp)

    threads = [threading.Thread(target=worker, args=(pid, ops), name=f"gcaskit-p{pid}")
               for pid, ops in zip(sorted(ctxs), workloads)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    final_state = mem.read(shared.state)[1]
    return StressResult(final_state, responses, recorder.events if recorder else [])
