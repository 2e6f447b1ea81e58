"""Canonical gate matrices.

Every supported gate is either a single-qubit 2x2 unitary (optionally with
control qubits) or SWAP.  A GateMatrix carries both the displayed matrix
(`entries`, 2x2 or 4x4) and the 2x2 `local` block the pair kernels apply:
for CNOT/CZ/CP that is X/Z/P(theta) gated on the control bit.

Two-qubit `entries` are written in (control, target) sub-space order, i.e.
row/col index = 2*control_bit + target_bit.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import MissingParameter, UnknownGateKind

FIXED_1Q = ("H", "X", "Y", "Z", "S", "T")
PARAM_1Q = ("P", "RX", "RY", "RZ")
CONTROLLED_2Q = ("CNOT", "CZ", "CP")
GATE_KINDS = FIXED_1Q + PARAM_1Q + CONTROLLED_2Q + ("SWAP", "G2")

_PARAMETERIZED = set(PARAM_1Q) | {"CP"}

_S2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class GateMatrix:
    kind: str
    theta: float | None
    entries: np.ndarray            # 2x2, or 4x4 for two-qubit kinds
    local: np.ndarray | None       # 2x2 block applied to the target pair; None for SWAP

    @property
    def num_qubits(self) -> int:
        return 1 if self.entries.shape[0] == 2 else 2


def _local_2x2(kind: str, theta: float | None) -> np.ndarray:
    if kind == "H":
        return np.array([[_S2, _S2], [_S2, -_S2]])
    if kind == "X" or kind == "CNOT":
        return np.array([[0, 1], [1, 0]])
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]])
    if kind == "Z" or kind == "CZ":
        return np.array([[1, 0], [0, -1]])
    if kind == "S":
        return np.array([[1, 0], [0, 1j]])
    if kind == "T":
        return np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]])
    if kind == "P" or kind == "CP":
        return np.array([[1, 0], [0, np.exp(1j * theta)]])
    if kind == "RX":
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -s], [s, c]])
    if kind == "RZ":
        return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])
    raise UnknownGateKind(f"unknown gate kind {kind!r}")


def _freeze(m: np.ndarray, dtype) -> np.ndarray:
    out = m.astype(dtype)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=1024)
def _gate_matrix_cached(kind: str, theta: float | None, dtype: np.dtype) -> GateMatrix:
    if kind == "SWAP":
        entries = np.array(
            [[1, 0, 0, 0],
             [0, 0, 1, 0],
             [0, 1, 0, 0],
             [0, 0, 0, 1]])
        return GateMatrix("SWAP", None, _freeze(entries, dtype), None)
    local = _local_2x2(kind, theta)
    if kind in CONTROLLED_2Q:
        entries = np.eye(4, dtype=complex)
        entries[2:, 2:] = local
    else:
        entries = local
    return GateMatrix(kind, theta, _freeze(entries, dtype), _freeze(local, dtype))


def gate_matrix(kind: str, theta: float | None = None, *, dtype=np.complex64) -> GateMatrix:
    """Build the unitary for a gate kind.

    `theta` (radians) is required for P, RX, RY, RZ and CP and rejected for
    everything else.  P(pi/4) is the T gate; CP multiplies only the |11>
    amplitude by e^{i theta}.
    """
    kind = str(kind).upper()
    if kind == "G2":
        raise UnknownGateKind("general 2x2 gates carry explicit entries; use general_gate()")
    if kind not in GATE_KINDS:
        raise UnknownGateKind(f"unknown gate kind {kind!r}")
    if kind in _PARAMETERIZED:
        if theta is None:
            raise MissingParameter(f"{kind} requires an angle")
        theta = float(theta)
    elif theta is not None:
        raise MissingParameter(f"{kind} takes no angle")
    return _gate_matrix_cached(kind, theta, np.dtype(dtype))


def general_gate(entries, *, dtype=np.complex64, check_unitary: bool = True) -> GateMatrix:
    """Wrap an arbitrary 2x2 unitary as a gate."""
    m = np.asarray(entries, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"general gate must be 2x2, got {m.shape}")
    if check_unitary and not is_unitary(m):
        raise ValueError("general gate entries are not unitary")
    frozen = _freeze(m, np.dtype(dtype))
    return GateMatrix("G2", None, frozen, frozen)


def is_unitary(m: np.ndarray, tol: float = 1e-6) -> bool:
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return bool(np.max(np.abs(m @ m.conj().T - eye)) < tol)
