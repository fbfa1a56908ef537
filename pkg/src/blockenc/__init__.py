"""Clifford+T block-encoding compiler and resource estimator for dense
matrices of classical data: QRAM-style data loading, state preparation,
explicit circuit synthesis, T-count/T-depth accounting, closed-form formula
cross-validation, and sparse-statevector verification at desk scale.
"""
from .circuit import (
    Circuit,
    CircuitBuilder,
    CircuitError,
    Gate,
    GateKind,
    Macro,
    MacroKind,
    QubitRegister,
    ResourceReport,
    count_resources,
    parse_circuit_text,
    write_circuit_text,
)
from .angle_tree import (
    AngleTree,
    DegenerateInputError,
    build_tree,
    matrix_trees,
    quantize_angle,
    reconstruct_state,
    update_amplitude,
)
from .qram import ConfigurationError, LoadSpec, QramModel
from .encoding import (
    BlockEncodingConfig,
    BlockEncodingResult,
    Method,
    Normalization,
    Variant,
    build_block_encoding,
    build_controlled_block_encoding,
    build_symmetric_block_encoding,
    select_parameters,
)
from .simulator import SparseState, extract_block, run_circuit, spectral_norm
from .resources import (
    cross_validate,
    default_ledger,
    evaluate,
    reproduce_headline_table,
    sweep_cross_validation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
