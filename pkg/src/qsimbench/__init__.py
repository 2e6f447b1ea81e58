"""qsimbench: state-vector simulation kernels plus a measurement toolkit.

The simulation half provides one flat complex64 state vector and five
interchangeable gate-application strategies (direct XOR-pair indexing,
flat index gathering, rank-n tensor contraction, dense and lazy Kronecker
operators), each with sequential and data-parallel dispatch.  The
measurement half provides a STREAM-style bandwidth probe, a per-gate
roofline model, a thermally-serialized multi-trial benchmark harness, and
step-ratio/cliff/speedup analysis with SVG figure output.
"""
from .circuits import Circuit, GateOp, build_ghz, build_qft, gate_count
from .errors import QsimError
from .gates import GateMatrix, gate_matrix, general_gate
from .harness import (
    ExperimentPlan,
    TrialStats,
    detect_cliff,
    run_experiment,
    speedup_table,
    step_ratios,
)
from .kernels import (
    KernelStrategy,
    STRATEGY_IDS,
    apply_gate,
    apply_gate_direct,
    apply_gate_flat,
    apply_gate_kron_dense,
    apply_gate_kron_lazy,
    apply_gate_tensordot,
    run_circuit,
)
from .membench import BandwidthReport, stream_probe
from .roofline import RooflinePoint, circuit_ai_profile, gate_ai, roofline_eval
from .state import StateVector, init_zero_state, state_norm
from .verify import VerificationReport, verify_strategy

__version__ = "0.1.0"

__all__ = [
    "BandwidthReport",
    "Circuit",
    "ExperimentPlan",
    "GateMatrix",
    "GateOp",
    "KernelStrategy",
    "QsimError",
    "RooflinePoint",
    "STRATEGY_IDS",
    "StateVector",
    "TrialStats",
    "VerificationReport",
    "apply_gate",
    "apply_gate_direct",
    "apply_gate_flat",
    "apply_gate_kron_dense",
    "apply_gate_kron_lazy",
    "apply_gate_tensordot",
    "build_ghz",
    "build_qft",
    "circuit_ai_profile",
    "detect_cliff",
    "gate_ai",
    "gate_count",
    "gate_matrix",
    "general_gate",
    "init_zero_state",
    "roofline_eval",
    "run_circuit",
    "run_experiment",
    "speedup_table",
    "state_norm",
    "step_ratios",
    "stream_probe",
    "verify_strategy",
]
