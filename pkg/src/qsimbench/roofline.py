"""Per-gate arithmetic intensity and the roofline performance bound.

The cost table counts FLOPs and DRAM bytes per "operation unit": one
amplitude pair for gates that transform pairs (32 bytes read+write in
single precision), or one touched amplitude for diagonal/sign gates that
update a single amplitude (16 bytes).  Pure permutations (X, Y, CNOT,
SWAP) and sign flips (Z, CZ) count zero FLOPs.

The bound is P = min(P_peak, AI * B_peak) with ridge point
AI* = P_peak / B_peak; AI below the ridge means memory-bound.  A point
exactly at the ridge is classified memory_bound by convention.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NonPositiveMachineParameter, UnknownGateKind

MEMORY_BOUND = "memory_bound"
COMPUTE_BOUND = "compute_bound"


@dataclass(frozen=True)
class GateCostModel:
    row: str
    gate_type: str              # "1-qubit" or "2-qubit"
    flops_per_unit: int
    bytes_per_unit: int

    @property
    def ai(self) -> float:
        return self.flops_per_unit / self.bytes_per_unit


# (row, type, flops, bytes) per operation unit
_COST_ROWS = (
    ("pauli_x", "1-qubit", 0, 32),
    ("pauli_y", "1-qubit", 0, 32),
    ("pauli_z", "1-qubit", 0, 16),
    ("cnot", "2-qubit", 0, 32),
    ("cz", "2-qubit", 0, 16),
    ("swap", "2-qubit", 0, 32),
    ("hadamard", "1-qubit", 8, 32),
    ("phase", "1-qubit", 6, 16),
    ("rotation", "1-qubit", 12, 32),
    ("ctrl_phase", "2-qubit", 6, 16),
    ("general_2x2", "1-qubit", 28, 32),
)

GATE_COSTS = {row: GateCostModel(row, t, f, b) for row, t, f, b in _COST_ROWS}

# gate kinds -> cost rows; S/T are phase gates, RZ scales both pair halves
# like RX/RY
_KIND_TO_ROW = {
    "X": "pauli_x",
    "Y": "pauli_y",
    "Z": "pauli_z",
    "CNOT": "cnot",
    "CZ": "cz",
    "SWAP": "swap",
    "H": "hadamard",
    "S": "phase",
    "T": "phase",
    "P": "phase",
    "RX": "rotation",
    "RY": "rotation",
    "RZ": "rotation",
    "CP": "ctrl_phase",
    "G2": "general_2x2",
}


def gate_ai(kind: str) -> GateCostModel:
    """Cost-table row for a gate kind or row name (case-insensitive)."""
    key = str(kind)
    row = _KIND_TO_ROW.get(key.upper()) or (key.lower() if key.lower() in GATE_COSTS else None)
    if row is None:
        raise UnknownGateKind(f"no arithmetic-intensity row for {kind!r}")
    return GATE_COSTS[row]


@dataclass(frozen=True)
class RooflinePoint:
    ai: float
    p_peak: float               # GFLOP/s
    b_peak: float               # GB/s
    predicted: float            # GFLOP/s
    ridge: float                # AI* = p_peak / b_peak
    regime: str


def roofline_eval(ai: float, p_peak: float, b_peak: float) -> RooflinePoint:
    """Upper-bound performance P = min(P_peak, AI * B_peak)."""
    if p_peak <= 0 or b_peak <= 0:
        raise NonPositiveMachineParameter(
            f"p_peak and b_peak must be > 0, got {p_peak}, {b_peak}")
    if ai < 0:
        raise ValueError(f"arithmetic intensity must be >= 0, got {ai}")
    ridge = p_peak / b_peak
    predicted = min(p_peak, ai * b_peak)
    regime = MEMORY_BOUND if ai <= ridge else COMPUTE_BOUND
    return RooflinePoint(ai=ai, p_peak=p_peak, b_peak=b_peak,
                         predicted=predicted, ridge=ridge, regime=regime)


@dataclass(frozen=True)
class CircuitProfile:
    total_flops: int
    total_bytes: int

    @property
    def ai(self) -> float:
        return self.total_flops / self.total_bytes if self.total_bytes else 0.0


def circuit_ai_profile(circuit) -> CircuitProfile:
    """Aggregate FLOPs/bytes over a circuit, 2^(n-1) operation units per gate.

    Weighted AI = total FLOPs / total bytes; for GHZ(n) this is 8/(32n).
    """
    units = 1 << (circuit.n - 1)
    flops = 0
    byts = 0
    for op in circuit.ops:
        cost = gate_ai(op.kind)
        flops += cost.flops_per_unit * units
        byts += cost.bytes_per_unit * units
    return CircuitProfile(total_flops=flops, total_bytes=byts)
