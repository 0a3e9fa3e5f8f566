"""gcaskit: comparator-based compare-and-swap, a wait-free universal
construction built on it, and desk-scale model checking for both.

The pieces:

* :mod:`gcaskit.memory` -- swap objects (``read`` / ``gcas`` with EQ or
  timestamp comparators) and a fetch-and-increment counter, on a simulated
  single-step backend and a thread-safe native one.
* :mod:`gcaskit.seqtypes` -- sequential type specifications (counter,
  register, stack) as executable apply procedures.
* :mod:`gcaskit.construction` -- the wait-free construction: any sequential
  type becomes a linearizable concurrent object via a timestamp clock, an
  announce object, a state object, and per-process response cells.
* :mod:`gcaskit.checker` -- generic linearizability search plus the
  construction-specific linearization-point verifier.
* :mod:`gcaskit.explore` -- deterministic scheduler: exhaustive DFS with
  state hashing, invariant monitors, progress-cycle detection
  (wait-freedom on finite configurations), and random schedule sampling.
* :mod:`gcaskit.native` -- real-thread stress driver.
* :mod:`gcaskit.histio` -- JSONL history serialization.
* :mod:`gcaskit.cli` -- the ``gcaskit`` command.
"""

from .memory import (
    ArityError,
    BOTTOM,
    CounterHandle,
    EQ,
    NativeMemory,
    NOOP,
    NULL,
    ObjectHandle,
    SimMemory,
    TIME_GT,
    compare,
)
from .seqtypes import (
    ACK,
    BUILTIN_TYPES,
    EMPTY,
    OperationDescriptor,
    TypeSpec,
    apply_type,
    get_type,
    run_sequential,
)
from .construction import (
    MUTATIONS,
    OpInstance,
    ProcessContext,
    SharedObjects,
    StepResult,
    do_op,
    is_done,
    new_process,
)
from .checker import (
    Event,
    MalformedHistoryError,
    Verdict,
    VerifyResult,
    Witness,
    check_linearizable,
    check_linearizable_bruteforce,
    extract_ops,
    project_history,
    verify_linearization_points,
)
from .explore import (
    ExplorationConfig,
    MonitorSuite,
    Report,
    World,
    default_workload,
    detect_progress_cycles,
    explore_exhaustive,
    explore_random,
    make_world,
    replay,
)
from .native import HistoryRecorder, StressResult, run_native
from .histio import MalformedLineError, read_history, write_history

__all__ = [
    "ACK", "ArityError", "BOTTOM", "BUILTIN_TYPES", "CounterHandle", "EMPTY",
    "EQ", "Event", "ExplorationConfig", "HistoryRecorder",
    "MalformedHistoryError", "MalformedLineError", "MonitorSuite",
    "MUTATIONS", "NativeMemory", "NOOP", "NULL", "ObjectHandle",
    "OperationDescriptor", "OpInstance", "ProcessContext", "Report",
    "SharedObjects", "SimMemory", "StepResult", "StressResult", "TIME_GT",
    "TypeSpec", "Verdict", "VerifyResult", "Witness", "World", "apply_type",
    "check_linearizable", "check_linearizable_bruteforce", "compare",
    "default_workload", "detect_progress_cycles", "do_op",
    "explore_exhaustive", "explore_random", "extract_ops", "get_type",
    "is_done", "make_world", "new_process", "project_history", "read_history",
    "replay", "run_native", "run_sequential", "verify_linearization_points",
    "write_history",
]

__version__ = "0.1.0"
