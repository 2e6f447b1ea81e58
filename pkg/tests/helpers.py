"""Shared test utilities."""
from __future__ import annotations

import numpy as np

from qsimbench.circuits import Circuit, GateOp

# the gate set the cost table covers (S folds into P, T is P(pi/4))
RANDOM_KINDS_1Q = ("X", "Y", "Z", "H", "T", "P", "RX", "RY", "G2")
RANDOM_KINDS_2Q = ("CNOT", "CZ", "CP", "SWAP")


def random_unitary_2x2(rng) -> np.ndarray:
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_circuit(rng, n: int, num_gates: int) -> Circuit:
    kinds = RANDOM_KINDS_1Q + (RANDOM_KINDS_2Q if n >= 2 else ())
    ops = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        theta = float(rng.uniform(0, 2 * np.pi)) if kind in ("P", "RX", "RY", "CP") else None
        if kind in RANDOM_KINDS_2Q:
            a, b = rng.choice(n, size=2, replace=False)
            if kind == "SWAP":
                ops.append(GateOp(kind, target=int(a), second=int(b)))
            else:
                ops.append(GateOp(kind, target=int(a), control=int(b), theta=theta))
        elif kind == "G2":
            ops.append(GateOp(kind, target=int(rng.integers(n)),
                              matrix=random_unitary_2x2(rng)))
        else:
            ops.append(GateOp(kind, target=int(rng.integers(n)), theta=theta))
    return Circuit(n=n, ops=tuple(ops), label="random")


def bit_reverse(x: int, n: int) -> int:
    out = 0
    for _ in range(n):
        out = (out << 1) | (x & 1)
        x >>= 1
    return out
