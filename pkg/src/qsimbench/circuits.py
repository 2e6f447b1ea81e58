"""Benchmark circuit builders (GHZ, QFT) and the line-oriented circuit format.

Text format: one gate per line, ``KIND target [control] [theta_radians]``.
For SWAP the second integer is the other target qubit.  Lines starting with
``#`` are comments.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import MissingParameter, QubitCountOutOfRange, UnknownGateKind
from .gates import CONTROLLED_2Q, FIXED_1Q, GATE_KINDS, PARAM_1Q


@dataclass(frozen=True)
class GateOp:
    """One circuit element: gate kind plus the qubits/angle it binds."""

    kind: str
    target: int
    control: int | None = None
    second: int | None = None
    theta: float | None = None
    matrix: np.ndarray | None = None    # only for kind G2; not serializable


@dataclass(frozen=True)
class Circuit:
    n: int
    ops: tuple[GateOp, ...]
    label: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    def __len__(self) -> int:
        return len(self.ops)


def build_ghz(n: int) -> Circuit:
    """H on qubit 0, then a CNOT chain k -> k+1.

    On |0...0> this yields (|0...0> + |1...1>)/sqrt(2) with exactly n gates.
    """
    if n < 1:
        raise QubitCountOutOfRange(f"GHZ needs n >= 1, got {n}")
    ops = [GateOp("H", target=0)]
    ops += [GateOp("CNOT", target=k + 1, control=k) for k in range(n - 1)]
    return Circuit(n=n, ops=tuple(ops), label="ghz")


def build_qft(n: int) -> Circuit:
    """Quantum Fourier transform: for each qubit k ascending, H(k) then
    CP(pi/2^(j-k)) with control j for j = k+1..n-1; finally floor(n/2) SWAPs
    reversing qubit order.

    General gate count is n + n(n-1)/2 + floor(n/2), e.g. 480 at n = 30.
    With the ascending-k ladder this computes the discrete Fourier transform
    of the state read in big-endian bit order (the bit-reversal conjugate of
    the little-endian DFT); on |0...0> the output is uniform with every
    amplitude 2^(-n/2).
    """
    if n < 1:
        raise QubitCountOutOfRange(f"QFT needs n >= 1, got {n}")
    ops: list[GateOp] = []
    for k in range(n):
        ops.append(GateOp("H", target=k))
        for j in range(k + 1, n):
            ops.append(GateOp("CP", target=k, control=j, theta=np.pi / 2 ** (j - k)))
    for k in range(n // 2):
        ops.append(GateOp("SWAP", target=k, second=n - 1 - k))
    return Circuit(n=n, ops=tuple(ops), label="qft")


def gate_count(circuit: Circuit) -> tuple[int, Counter]:
    """Total gate count and per-kind histogram."""
    hist = Counter(op.kind for op in circuit.ops)
    return len(circuit.ops), hist


# ---------------------------------------------------------------------------
# serialization

def op_to_line(op: GateOp) -> str:
    if op.kind == "G2":
        raise ValueError("G2 ops carry an explicit matrix and cannot be serialized")
    parts = [op.kind, str(op.target)]
    if op.kind == "SWAP":
        parts.append(str(op.second))
    elif op.control is not None:
        parts.append(str(op.control))
    if op.theta is not None:
        parts.append(repr(op.theta))
    return " ".join(parts)


def op_from_line(line: str) -> GateOp:
    parts = line.split()
    kind = parts[0].upper()
    if kind not in GATE_KINDS or kind == "G2":
        raise UnknownGateKind(f"unknown gate kind {parts[0]!r}")
    args = parts[1:]
    needs_theta = kind in PARAM_1Q or kind == "CP"
    want = 1 + (1 if kind in CONTROLLED_2Q or kind == "SWAP" else 0) + (1 if needs_theta else 0)
    if len(args) != want:
        if needs_theta and len(args) == want - 1:
            raise MissingParameter(f"{kind} line is missing its angle: {line!r}")
        raise ValueError(f"expected {want} argument(s) for {kind}, got {len(args)}: {line!r}")
    target = int(args[0])
    control = second = None
    theta = None
    pos = 1
    if kind == "SWAP":
        second = int(args[pos]); pos += 1
    elif kind in CONTROLLED_2Q:
        control = int(args[pos]); pos += 1
    if needs_theta:
        theta = float(args[pos])
    if kind in FIXED_1Q and len(args) > 1:
        raise ValueError(f"{kind} takes only a target: {line!r}")
    return GateOp(kind, target=target, control=control, second=second, theta=theta)


def circuit_to_text(circuit: Circuit) -> str:
    return "\n".join(op_to_line(op) for op in circuit.ops) + "\n"


def circuit_from_text(text: str, n: int | None = None, label: str = "custom") -> Circuit:
    ops = [op_from_line(line) for line in text.splitlines()
           if line.strip() and not line.lstrip().startswith("#")]
    if n is None:
        qubits = [q for op in ops for q in (op.target, op.control, op.second) if q is not None]
        if not qubits:
            raise ValueError("cannot infer qubit count from an empty circuit")
        n = max(qubits) + 1
    return Circuit(n=n, ops=tuple(ops), label=label)


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w") as f:
        f.write(circuit_to_text(circuit))


def load_circuit(path, n: int | None = None) -> Circuit:
    with open(path) as f:
        return circuit_from_text(f.read(), n=n)
