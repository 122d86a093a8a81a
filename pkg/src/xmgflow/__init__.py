"""xmgflow: an iterative logic compiler for SIMD in-memory execution.

Converts combinational circuits (ASCII AIGER) into majority/XOR netlists,
couples logic optimization with row-liveness scheduling to trade netlist
size against peak memory footprint, and emits row-level instruction
sequences with cross-array copies costed by a configurable model.
"""

from .aiger import AigerError, parse_aiger, parse_aiger_file
from .edp import (
    ArrayPlacement,
    CostModel,
    PlacementError,
    estimate_edp,
    load_cost_model,
    place,
)
from .instructions import (
    Instruction,
    InstructionSequence,
    SrcRef,
    emit_instructions,
    parse_instructions,
    write_instructions,
)
from .mfresub import CATEGORIES, MfResubResult, mfresub
from .pareto import CompilerConfig, Design, ParetoSet, run, run_with_log, select_final
from .passes import PASS_NAMES, cleanup, run_pass, run_random_sequence
from .schedule import (
    BoundExceeded,
    LivenessResult,
    PeakWindow,
    ScheduledNetlist,
    ScheduleError,
    ScheduleRequest,
    interpret,
    liveness_mf,
    peak_window,
    schedule_exact,
    schedule_heuristic,
    scheduled,
)
from .simulate import make_patterns, simulate, validate_equivalence
from .subnet import SpliceError, SubNetlist, extract, pareto_mf_bound, reinsert
from .textio import parse_xmg, parse_xmg_file, write_xmg, write_xmg_file
from .xmg import CONST0, MAJ, XOR, Edge, XmgNetlist, XmgNode, random_netlist

__version__ = "0.1.0"

__all__ = [
    "AigerError",
    "ArrayPlacement",
    "BoundExceeded",
    "CATEGORIES",
    "CONST0",
    "CompilerConfig",
    "CostModel",
    "Design",
    "Edge",
    "Instruction",
    "InstructionSequence",
    "LivenessResult",
    "MAJ",
    "MfResubResult",
    "PASS_NAMES",
    "ParetoSet",
    "PeakWindow",
    "PlacementError",
    "ScheduleError",
    "ScheduleRequest",
    "ScheduledNetlist",
    "SpliceError",
    "SrcRef",
    "SubNetlist",
    "XOR",
    "XmgNetlist",
    "XmgNode",
    "cleanup",
    "emit_instructions",
    "estimate_edp",
    "extract",
    "interpret",
    "liveness_mf",
    "load_cost_model",
    "make_patterns",
    "mfresub",
    "parse_aiger",
    "parse_aiger_file",
    "parse_instructions",
    "parse_xmg",
    "parse_xmg_file",
    "pareto_mf_bound",
    "peak_window",
    "place",
    "random_netlist",
    "reinsert",
    "run",
    "run_pass",
    "run_random_sequence",
    "run_with_log",
    "schedule_exact",
    "schedule_heuristic",
    "scheduled",
    "select_final",
    "simulate",
    "validate_equivalence",
    "write_instructions",
    "write_xmg",
    "write_xmg_file",
]
