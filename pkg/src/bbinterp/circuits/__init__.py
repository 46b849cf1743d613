from .core import (
    Circuit,
    CircuitBuilder,
    check_monotone,
    circuit_gate_fns,
    circuit_size,
    eval_circuit,
)
from .gates import (
    Bump,
    BumpAccumulate,
    Composed,
    Const,
    FloorCarry,
    GateFn,
    NonNegCombine,
    RoundPhase,
    ScaleAdd,
    Squash,
    StaircaseSearch,
    StepThreshold,
    UnaryFn,
    Unsquash,
    phi,
    phi_inv,
)
from .interpolant import (
    CompileError,
    build_leaf_circuit,
    compile_interpolant,
    interpolant_size_bound,
)
from .transform import binary_search_transform, combine_split

__all__ = [
    "Bump",
    "BumpAccumulate",
    "Circuit",
    "CircuitBuilder",
    "CompileError",
    "Composed",
    "Const",
    "FloorCarry",
    "GateFn",
    "NonNegCombine",
    "RoundPhase",
    "ScaleAdd",
    "Squash",
    "StaircaseSearch",
    "StepThreshold",
    "UnaryFn",
    "Unsquash",
    "binary_search_transform",
    "build_leaf_circuit",
    "check_monotone",
    "circuit_gate_fns",
    "circuit_size",
    "combine_split",
    "compile_interpolant",
    "eval_circuit",
    "interpolant_size_bound",
    "phi",
    "phi_inv",
]
