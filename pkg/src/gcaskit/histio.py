"""JSONL serialization of histories.

One JSON object per line, UTF-8, fields always in this order:

    seq, kind, pid, op, args, resp, step, object, outcome

``kind`` is ``"invoke"``, ``"response"``, or ``"step"``.  ``object`` names
the accessed shared object (``"C"``, ``"A"``, ``"S"``, ``"cell:<pid>"``) on
step lines and is null elsewhere.  ``outcome`` carries what the step saw:
a counter value, a swap success flag, or a read record.

Values that plain JSON cannot express round-trip through small tagged
objects, so ``read_history(write_history(h)) == h`` event for event:

    {"$sentinel": "NULL"}                    NULL / BOTTOM / NOOP
    {"$op": [pid, idx, name, [args...]]}     an operation instance
    {"$cell": [id, name]}                    a response-cell handle
    {"$tuple": [items...]}                   any tuple (records, stack states)
"""

from __future__ import annotations

import json
from typing import Any

from .checker import Event
from .construction import OpInstance
from .memory import SENTINELS, ObjectHandle, Sentinel


class MalformedLineError(ValueError):
    """A line failed to parse; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def encode_value(value: Any) -> Any:
    if isinstance(value, Sentinel):
        return {"$sentinel": value.name}
    if isinstance(value, OpInstance):
        return {"$op": [value.pid, value.idx, value.name, list(value.args)]}
    if isinstance(value, ObjectHandle):
        return {"$cell": [value.id, value.name]}
    if isinstance(value, tuple):
        return {"$tuple": [encode_value(v) for v in value]}
    if isinstance(value, list):
        return [encode_value(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    raise TypeError(f"cannot serialize {value!r}")


def decode_value(value: Any) -> Any:
    if isinstance(value, dict):
        if "$sentinel" in value:
            return SENTINELS[value["$sentinel"]]
        if "$op" in value:
            pid, idx, name, args = value["$op"]
            return OpInstance(pid, idx, name, tuple(args))
        if "$cell" in value:
            obj_id, name = value["$cell"]
            return ObjectHandle(obj_id, 2, name)
        if "$tuple" in value:
            return tuple(decode_value(v) for v in value["$tuple"])
        raise ValueError(f"unknown tagged value {value!r}")
    if isinstance(value, list):
        return [decode_value(v) for v in value]
    return value


def event_to_json(ev: Event) -> dict:
    return {
        "seq": ev.seq,
        "kind": ev.kind,
        "pid": ev.pid,
        "op": ev.op,
        "args": [encode_value(a) for a in ev.args],
        "resp": encode_value(ev.resp),
        "step": ev.step,
        "object": ev.obj,
        "outcome": encode_value(ev.outcome),
    }


def event_from_json(obj: dict) -> Event:
    kind = obj["kind"]
    if kind not in ("invoke", "response", "step"):
        raise ValueError(f"invalid kind {kind!r}")
    return Event(
        seq=obj["seq"],
        kind=kind,
        pid=obj["pid"],
        op=obj.get("op"),
        args=tuple(decode_value(a) for a in obj.get("args") or ()),
        resp=decode_value(obj.get("resp")),
        step=obj.get("step"),
        obj=obj.get("object"),
        outcome=decode_value(obj.get("outcome")),
    )


def dumps_history(events) -> str:
    return "".join(json.dumps(event_to_json(ev)) + "\n" for ev in events)


def write_history(path, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_history(events))


def read_history(path) -> list:
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                events.append(event_from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise MalformedLineError(lineno, str(exc)) from exc
    return events
