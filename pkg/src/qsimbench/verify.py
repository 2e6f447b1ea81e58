"""Cross-validation of kernel strategies against the dense-operator oracle.

A strategy passes when its final state matches the reference strategy's to a
maximum absolute amplitude deviation below 1e-6.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import as_strategy, run_circuit
from .state import init_zero_state

DEVIATION_THRESHOLD = 1e-6


@dataclass(frozen=True)
class VerificationReport:
    circuit_label: str
    n: int
    strategy: str
    reference: str
    max_abs_deviation: float

    @property
    def passed(self) -> bool:
        return self.max_abs_deviation < DEVIATION_THRESHOLD


def state_deviation(a, b) -> float:
    """max_i |a_i - b_i| over all amplitudes, computed in double precision."""
    amps_a = (a.amps if hasattr(a, "amps") else np.asarray(a)).astype(np.complex128)
    amps_b = (b.amps if hasattr(b, "amps") else np.asarray(b)).astype(np.complex128)
    return float(np.max(np.abs(amps_a - amps_b)))


def _final_state(circuit, strategy, memory_budget_bytes=None):
    state = init_zero_state(circuit.n, memory_budget_bytes=memory_budget_bytes)
    run_circuit(state, circuit, strategy)
    return state


def verify_strategy(circuit, strategy, reference="kron_dense", *,
                    memory_budget_bytes=None) -> VerificationReport:
    """Run `circuit` under both strategies from |0...0> and compare.

    DenseCapExceeded propagates when the reference is kron_dense and
    circuit.n exceeds the dense cap (verification, like the dense kernel, is
    a small-n operation).
    """
    strat = as_strategy(strategy)
    ref = as_strategy(reference)
    got = _final_state(circuit, strat, memory_budget_bytes)
    want = _final_state(circuit, ref, memory_budget_bytes)
    return VerificationReport(
        circuit_label=circuit.label,
        n=circuit.n,
        strategy=strat.label,
        reference=ref.label,
        max_abs_deviation=state_deviation(got, want),
    )


def verify_sweep(circuits, strategies, reference="kron_dense") -> list[VerificationReport]:
    """Verify every (circuit, strategy) cell; used by the CLI PASS/FAIL table."""
    return [verify_strategy(c, s, reference) for c in circuits for s in strategies]

