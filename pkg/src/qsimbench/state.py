"""State-vector storage and the bit-ordering convention.

An n-qubit state is a flat array of 2^n complex amplitudes, complex64 by
default (8 bytes per amplitude).  Bit t of a flat index is the basis value
of qubit t, i.e. qubit 0 is the least-significant bit.  Every kernel and
circuit builder in this package assumes this convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import psutil

from .errors import MemoryBudgetExceeded, QubitCountOutOfRange

DEFAULT_MAX_QUBITS = 30
DEFAULT_BUDGET_FRACTION = 0.75

_NORM_CHUNK = 1 << 20


@dataclass
class StateVector:
    """Flat array of 2^n amplitudes. Mutated in place by gate kernels."""

    n: int
    amps: np.ndarray

    @property
    def dtype(self) -> np.dtype:
        return self.amps.dtype

    @property
    def size_bytes(self) -> int:
        return self.amps.nbytes


def available_memory_bytes() -> int:
    """Free physical memory as reported by the OS."""
    return int(psutil.virtual_memory().available)


def default_memory_budget() -> int:
    """Default allocation budget: 75% of currently free physical memory.

    Ungated 2^n allocation can take down the whole process, so allocation
    is always checked against some budget.
    """
    return int(available_memory_bytes() * DEFAULT_BUDGET_FRACTION)


def init_zero_state(
    n: int,
    *,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    memory_budget_bytes: int | None = None,
    dtype=np.complex64,
) -> StateVector:
    """Allocate |0...0>: amps[0] = 1, all others 0.

    Raises QubitCountOutOfRange for n outside 1..max_qubits and
    MemoryBudgetExceeded when 2^n amplitudes would not fit the budget
    (checked before the allocation is attempted).
    """
    if not isinstance(n, int) or not 1 <= n <= max_qubits:
        raise QubitCountOutOfRange(f"qubit count {n} not in 1..{max_qubits}")
    dtype = np.dtype(dtype)
    needed = (1 << n) * dtype.itemsize
    budget = default_memory_budget() if memory_budget_bytes is None else int(memory_budget_bytes)
    if needed > budget:
        raise MemoryBudgetExceeded(
            f"state vector of {needed / 1e9:.2f} GB for n={n} exceeds the "
            f"{budget / 1e9:.2f} GB memory budget"
        )
    amps = np.zeros(1 << n, dtype=dtype)
    amps[0] = 1.0
    return StateVector(n=n, amps=amps)


def reset_zero_state(state: StateVector) -> None:
    """Reset an existing state to |0...0> without reallocating."""
    state.amps.fill(0)
    state.amps[0] = 1.0


def state_norm(state) -> float:
    """L2 norm, accumulated in double precision.

    Single-precision accumulation underestimates the norm noticeably from
    ~24 qubits on, so the squared moduli are summed chunk-wise in float64.
    Accepts a StateVector or a bare complex array.
    """
    amps = state.amps if isinstance(state, StateVector) else np.asarray(state)
    total = 0.0
    for start in range(0, amps.size, _NORM_CHUNK):
        chunk = amps[start:start + _NORM_CHUNK]
        re = chunk.real.astype(np.float64)
        im = chunk.imag.astype(np.float64)
        total += float(np.sum(re * re) + np.sum(im * im))
    return float(np.sqrt(total))
