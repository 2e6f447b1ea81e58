"""Five interchangeable gate-application strategies over one flat state vector.

All strategies implement identical observable semantics; they differ only in
how they traverse memory:

  direct_index  in-place pair updates, indices from b = a XOR (1 << t),
                processed in fixed-size chunks (no 2^n scratch)
  flat_index    full index vectors gathered up front, new amplitude vectors
                computed, then written back (O(2^n) scratch)
  tensordot     state viewed as a rank-n tensor of shape [2]*n, gate applied
                as a contraction along the target axis (transpose cost paid)
  kron_dense    full 2^n x 2^n operator materialized and multiplied; the
                correctness oracle, capped at DENSE_QUBIT_CAP qubits
  kron_lazy     Kronecker-structured operator applied block-wise without
                materialization (O(2^n) working memory)

Axis convention for the tensor view: axis k corresponds to qubit n-1-k
(row-major layout, qubit 0 fastest-varying), so a gate on qubit n-1
contracts axis 0.  Indices are 64-bit throughout.

For a single-qubit gate on target t, the pair zero-set is every index a
with (a >> t) & 1 == 0, paired with b = a XOR (1 << t); the stride between
paired elements is 2^t.  Controlled gates enumerate only indices whose
control bits are all 1.

Each strategy runs in `sequential` or `parallel` dispatch.  Parallel
dispatch partitions the work into disjoint output regions handed to a
thread pool; for direct_index the partition is the same chunking as
sequential dispatch, so results are bitwise identical.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, wait
from contextlib import contextmanager
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .errors import DenseCapExceeded, DuplicateQubit, MissingParameter, QubitIndexOutOfRange
from .gates import GateMatrix, gate_matrix, general_gate
from .state import StateVector

CHUNK_PAIRS = 1 << 16
DENSE_QUBIT_CAP = 12

STRATEGY_IDS = ("kron_dense", "kron_lazy", "tensordot", "flat_index", "direct_index")
DISPATCH_MODES = ("sequential", "parallel")

_MAX_WORKERS = min(8, os.cpu_count() or 1)
_pool: ThreadPoolExecutor | None = None


def _executor() -> ThreadPoolExecutor:
    global _pool
    if _pool is None:
        _pool = ThreadPoolExecutor(max_workers=_MAX_WORKERS)
    return _pool


def _run_tasks(tasks, parallel: bool) -> None:
    if parallel:
        futures = [_executor().submit(t) for t in tasks]
        wait(futures)
        for f in futures:
            f.result()
    else:
        for t in tasks:
            t()


# ---------------------------------------------------------------------------
# scratch-allocation accounting (test hook)

_alloc_log: list[int] | None = None


def _note_alloc(n_elements: int) -> None:
    if _alloc_log is not None:
        _alloc_log.append(int(n_elements))


@contextmanager
def record_allocations():
    """Record element counts of kernel scratch/index allocations.

    Used by tests to assert that direct_index never allocates a buffer
    proportional to 2^n while flat_index does.
    """
    global _alloc_log
    prev = _alloc_log
    _alloc_log = log = []
    try:
        yield log
    finally:
        _alloc_log = prev


# ---------------------------------------------------------------------------
# pair index enumeration

def _insert_zero_bits(j: np.ndarray, positions) -> np.ndarray:
    # positions must be ascending; each step opens a 0 bit at position p
    for p in positions:
        j = ((j >> p) << (p + 1)) | (j & ((1 << p) - 1))
    return j


def pair_indices(n: int, t: int, controls=(), *, start: int = 0, stop: int | None = None):
    """Index pairs (a, b=a XOR 2^t) for a gate on target t.

    Enumerates the zero-set (target bit 0, all control bits 1) positions
    [start, stop) and returns (idx0, idx1) as int64 arrays.  Without
    controls the 2^{n-1} pairs partition [0, 2^n) exactly.
    """
    free_bits = n - 1 - len(controls)
    total = 1 << free_bits
    if stop is None:
        stop = total
    _note_alloc(stop - start)
    j = np.arange(start, stop, dtype=np.int64)
    j = _insert_zero_bits(j, sorted((t, *controls)))
    cmask = np.int64(0)
    for c in controls:
        cmask |= np.int64(1) << np.int64(c)
    idx0 = j | cmask
    idx1 = idx0 | (np.int64(1) << np.int64(t))
    return idx0, idx1


def _chunk_bounds(total: int, chunk: int = CHUNK_PAIRS):
    for start in range(0, total, chunk):
        yield start, min(start + chunk, total)


def iter_pair_chunks(n: int, t: int, controls=(), chunk: int = CHUNK_PAIRS):
    for start, stop in _chunk_bounds(1 << (n - 1 - len(controls)), chunk):
        yield pair_indices(n, t, controls, start=start, stop=stop)


def _swap_indices(n: int, q1: int, q2: int, *, start: int = 0, stop: int | None = None):
    # pairs (a, b) with a having q1=1,q2=0 and b = a XOR (2^q1 | 2^q2)
    total = 1 << (n - 2)
    if stop is None:
        stop = total
    _note_alloc(stop - start)
    j = np.arange(start, stop, dtype=np.int64)
    j = _insert_zero_bits(j, sorted((q1, q2)))
    idx_a = j | (np.int64(1) << np.int64(q1))
    idx_b = j | (np.int64(1) << np.int64(q2))
    return idx_a, idx_b


def _iter_swap_chunks(n: int, q1: int, q2: int, chunk: int = CHUNK_PAIRS):
    total = 1 << (n - 2)
    for start in range(0, total, chunk):
        yield _swap_indices(n, q1, q2, start=start, stop=min(start + chunk, total))


# ---------------------------------------------------------------------------
# validation

def _check_qubits(state: StateVector, gate: GateMatrix, targets, controls) -> None:
    qubits = tuple(targets) + tuple(controls)
    for q in qubits:
        if not isinstance(q, (int, np.integer)) or not 0 <= q < state.n:
            raise QubitIndexOutOfRange(f"qubit {q} out of range for n={state.n}")
    if len(set(qubits)) != len(qubits):
        raise DuplicateQubit(f"duplicate qubit in {qubits}")
    if gate.kind == "SWAP":
        if len(targets) != 2 or controls:
            raise ValueError("SWAP takes exactly two targets and no controls")
    else:
        if len(targets) != 1:
            raise ValueError(f"{gate.kind} takes exactly one target")
        if gate.kind in ("CNOT", "CZ", "CP") and len(controls) != 1:
            raise ValueError(f"{gate.kind} takes exactly one control")


# ---------------------------------------------------------------------------
# direct_index: chunked in-place scatter-write

def apply_gate_direct(state: StateVector, gate: GateMatrix, targets, controls=(),
                      *, parallel: bool = False) -> None:
    """Apply a gate via XOR pair indexing, in place.

    Tasks carry chunk bounds and build their index arrays inside the
    worker, so live scratch is bounded by workers x CHUNK_PAIRS, never
    by 2^n.
    """
    _check_qubits(state, gate, targets, controls)
    n = state.n
    amps = state.amps
    if gate.kind == "SWAP":
        q1, q2 = targets

        def swap_task(start, stop):
            idx_a, idx_b = _swap_indices(n, q1, q2, start=start, stop=stop)
            _note_alloc(idx_a.size)
            a = amps[idx_a]
            amps[idx_a] = amps[idx_b]
            amps[idx_b] = a

        tasks = [(lambda s=s, e=e: swap_task(s, e)) for s, e in _chunk_bounds(1 << (n - 2))]
        _run_tasks(tasks, parallel)
        return

    t = targets[0]
    m = gate.local
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]

    def update_task(start, stop):
        idx0, idx1 = pair_indices(n, t, controls, start=start, stop=stop)
        _note_alloc(2 * idx0.size)
        a = amps[idx0]
        b = amps[idx1]
        amps[idx0] = m00 * a + m01 * b
        amps[idx1] = m10 * a + m11 * b

    tasks = [(lambda s=s, e=e: update_task(s, e))
             for s, e in _chunk_bounds(1 << (n - 1 - len(controls)))]
    _run_tasks(tasks, parallel)


# ---------------------------------------------------------------------------
# flat_index: explicit index gathering with O(2^n) scratch

def apply_gate_flat(state: StateVector, gate: GateMatrix, targets, controls=(),
                    *, parallel: bool = False) -> None:
    """Gather full zero/one index vectors, compute new amplitude vectors,
    write back."""
    _check_qubits(state, gate, targets, controls)
    amps = state.amps
    if gate.kind == "SWAP":
        q1, q2 = targets
        idx_a, idx_b = _swap_indices(state.n, q1, q2)
        _note_alloc(idx_a.size)

        def swap_range(lo, hi):
            a = amps[idx_a[lo:hi]]
            amps[idx_a[lo:hi]] = amps[idx_b[lo:hi]]
            amps[idx_b[lo:hi]] = a

        _run_tasks(_range_tasks(swap_range, idx_a.size, parallel), parallel)
        return

    t = targets[0]
    idx0, idx1 = pair_indices(state.n, t, controls)
    m = gate.local
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    _note_alloc(2 * idx0.size)

    def update_range(lo, hi):
        a = amps[idx0[lo:hi]]
        b = amps[idx1[lo:hi]]
        amps[idx0[lo:hi]] = m00 * a + m01 * b
        amps[idx1[lo:hi]] = m10 * a + m11 * b

    _run_tasks(_range_tasks(update_range, idx0.size, parallel), parallel)


def _range_tasks(fn, total: int, parallel: bool):
    if not parallel:
        return [lambda: fn(0, total)]
    step = max(1, -(-total // _MAX_WORKERS))
    return [(lambda lo=lo: fn(lo, min(lo + step, total)))
            for lo in range(0, total, step)]


# ---------------------------------------------------------------------------
# tensordot: rank-n tensor contraction along the target axis

def _tensor_subviews(tensor: np.ndarray, banned_axes, max_split: int = 3):
    """Split a [2]*k tensor along up to max_split free leading axes.

    Yields (subview, remap) where remap translates an axis index of the
    full tensor into the subview's axis numbering.
    """
    free = [ax for ax in range(tensor.ndim) if ax not in banned_axes]
    split = free[:max_split]
    if not split:
        yield tensor, (lambda ax: ax)
        return
    for combo in product((0, 1), repeat=len(split)):
        idx: list = [slice(None)] * tensor.ndim
        for ax, bit in zip(split, combo):
            idx[ax] = bit
        sub = tensor[tuple(idx)]

        def remap(ax, _split=tuple(split)):
            return ax - sum(1 for s in _split if s < ax)

        yield sub, remap


def _contract_target(view: np.ndarray, local: np.ndarray, ax_t: int, ctrl_axes) -> None:
    _note_alloc(view.size)
    if ctrl_axes:
        k = len(ctrl_axes)
        moved = np.moveaxis(view, ctrl_axes, range(k))
        sub = moved[(1,) * k]
        ax_sub = ax_t - sum(1 for c in ctrl_axes if c < ax_t)
        new = np.tensordot(local, sub, axes=([1], [ax_sub]))
        sub[...] = np.moveaxis(new, 0, ax_sub)
    else:
        new = np.tensordot(local, view, axes=([1], [ax_t]))
        view[...] = np.moveaxis(new, 0, ax_t)


def _swap_axes_copy(view: np.ndarray, ax1: int, ax2: int) -> None:
    _note_alloc(view.size)
    view[...] = np.swapaxes(view, ax1, ax2).copy()


def apply_gate_tensordot(state: StateVector, gate: GateMatrix, targets, controls=(),
                         *, parallel: bool = False) -> None:
    """Apply a gate as a tensor contraction on the [2]*n view of the state."""
    _check_qubits(state, gate, targets, controls)
    n = state.n
    tensor = state.amps.reshape((2,) * n)
    if gate.kind == "SWAP":
        ax1, ax2 = (n - 1 - q for q in targets)
        if not parallel or n < 3:
            _swap_axes_copy(tensor, ax1, ax2)
            return
        tasks = [(lambda v=sub, a1=remap(ax1), a2=remap(ax2): _swap_axes_copy(v, a1, a2))
                 for sub, remap in _tensor_subviews(tensor, {ax1, ax2})]
        _run_tasks(tasks, parallel=True)
        return

    ax_t = n - 1 - targets[0]
    ctrl_axes = tuple(n - 1 - c for c in controls)
    local = gate.local
    if not parallel or n - 1 - len(controls) < 1:
        _contract_target(tensor, local, ax_t, ctrl_axes)
        return
    banned = {ax_t, *ctrl_axes}
    tasks = []
    for sub, remap in _tensor_subviews(tensor, banned):
        a = remap(ax_t)
        c = tuple(remap(cx) for cx in ctrl_axes)
        tasks.append(lambda v=sub, a=a, c=c: _contract_target(v, local, a, c))
    _run_tasks(tasks, parallel=True)


# ---------------------------------------------------------------------------
# kron_dense: materialized operator (correctness oracle)

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _kron_chain(n: int, placed: dict, dtype) -> np.ndarray:
    # qubit 0 is the last Kronecker factor (fastest-varying index bit)
    factors = [np.asarray(placed.get(q, _PAULI["I"]), dtype=dtype) for q in range(n - 1, -1, -1)]
    return reduce(np.kron, factors)


def dense_operator(n: int, gate: GateMatrix, targets, controls=(), *, dtype=np.complex64) -> np.ndarray:
    """Materialize the full 2^n x 2^n operator for one gate.

    Built from Kronecker chains only (no pair-index arithmetic), so it is an
    independent reference for the other kernels.  Controlled gates use
    U = I + P1^(controls) (x) (G - I)^(target); SWAP uses the identity
    SWAP = (II + XX + YY + ZZ) / 2.
    """
    dtype = np.dtype(dtype)
    if gate.kind == "SWAP":
        q1, q2 = targets
        acc = np.zeros((1 << n, 1 << n), dtype=dtype)
        for p in ("I", "X", "Y", "Z"):
            acc += _kron_chain(n, {q1: _PAULI[p], q2: _PAULI[p]}, dtype)
        return 0.5 * acc
    t = targets[0]
    local = np.asarray(gate.local, dtype=dtype)
    if controls:
        placed = {c: _P1 for c in controls}
        placed[t] = local - np.eye(2)
        return np.eye(1 << n, dtype=dtype) + _kron_chain(n, placed, dtype)
    return _kron_chain(n, {t: local}, dtype)


def apply_gate_kron_dense(state: StateVector, gate: GateMatrix, targets, controls=(),
                          *, parallel: bool = False, dense_cap: int = DENSE_QUBIT_CAP) -> None:
    """Multiply by the materialized operator. O(4^n) memory; capped."""
    _check_qubits(state, gate, targets, controls)
    if state.n > dense_cap:
        raise DenseCapExceeded(
            f"dense operator at n={state.n} needs {(4 ** state.n) * state.dtype.itemsize / 2**20:.0f}"
            f" MiB; cap is {dense_cap} qubits"
        )
    _note_alloc(4 ** state.n)
    op = dense_operator(state.n, gate, targets, controls, dtype=state.dtype)
    amps = state.amps
    if not parallel:
        amps[:] = op @ amps
        return
    out = np.empty_like(amps)

    def block(lo, hi):
        out[lo:hi] = op[lo:hi] @ amps

    _run_tasks(_range_tasks(block, amps.size, True), parallel=True)
    amps[:] = out


# ---------------------------------------------------------------------------
# kron_lazy: block-wise operator application without materialization

def _lazy_matvec_1q(x: np.ndarray, n: int, t: int, m: np.ndarray,
                    *, parallel: bool = False) -> np.ndarray:
    """y = (I (x) m (x) I) x for a 2x2 block m at qubit t, block-wise."""
    left = 1 << (n - 1 - t)
    right = 1 << t
    v = x.reshape(left, 2, right)
    _note_alloc(x.size)
    out = np.empty_like(v)
    if not parallel or max(left, right) < 2:
        np.einsum("ij,ljr->lir", m, v, out=out)
        return out.reshape(-1)
    if left >= right:
        step = max(1, -(-left // _MAX_WORKERS))
        tasks = [(lambda lo=lo: np.einsum("ij,ljr->lir", m, v[lo:lo + step], out=out[lo:lo + step]))
                 for lo in range(0, left, step)]
    else:
        step = max(1, -(-right // _MAX_WORKERS))
        tasks = [(lambda lo=lo: np.einsum("ij,ljr->lir", m, v[:, :, lo:lo + step],
                                          out=out[:, :, lo:lo + step]))
                 for lo in range(0, right, step)]
    _run_tasks(tasks, parallel=True)
    return out.reshape(-1)


def apply_gate_kron_lazy(state: StateVector, gate: GateMatrix, targets, controls=(),
                         *, parallel: bool = False) -> None:
    """Apply the Kronecker-structured operator without materializing it.

    Controlled gates compose projector applications,
    y = x - sel + G(sel) with sel = (P1 at each control) x; SWAP uses
    (II + XX + YY + ZZ)/2 as a sum of lazy 1-qubit applications.
    """
    _check_qubits(state, gate, targets, controls)
    n = state.n
    x = state.amps
    dtype = state.dtype
    if gate.kind == "SWAP":
        q1, q2 = targets
        acc = x.copy()
        _note_alloc(x.size)
        for p in ("X", "Y", "Z"):
            m = _PAULI[p].astype(dtype)
            term = _lazy_matvec_1q(x, n, q1, m, parallel=parallel)
            term = _lazy_matvec_1q(term, n, q2, m, parallel=parallel)
            acc += term
        x[:] = 0.5 * acc
        return
    t = targets[0]
    local = np.asarray(gate.local, dtype=dtype)
    if controls:
        p1 = _P1.astype(dtype)
        sel = x
        for c in controls:
            sel = _lazy_matvec_1q(sel, n, c, p1, parallel=parallel)
        new_sel = _lazy_matvec_1q(sel, n, t, local, parallel=parallel)
        x[:] = x - sel + new_sel
        return
    x[:] = _lazy_matvec_1q(x, n, t, local, parallel=parallel)


# ---------------------------------------------------------------------------
# strategy dispatch

APPLY_FNS = {
    "direct_index": apply_gate_direct,
    "flat_index": apply_gate_flat,
    "tensordot": apply_gate_tensordot,
    "kron_dense": apply_gate_kron_dense,
    "kron_lazy": apply_gate_kron_lazy,
}


@dataclass(frozen=True)
class KernelStrategy:
    """One gate-application algorithm plus its dispatch mode."""

    id: str
    dispatch: str = "sequential"

    def __post_init__(self):
        if self.id not in STRATEGY_IDS:
            raise ValueError(f"unknown strategy {self.id!r}; choose from {STRATEGY_IDS}")
        if self.dispatch not in DISPATCH_MODES:
            raise ValueError(f"unknown dispatch {self.dispatch!r}; choose from {DISPATCH_MODES}")

    @property
    def label(self) -> str:
        return self.id if self.dispatch == "sequential" else f"{self.id}:{self.dispatch}"


def as_strategy(spec) -> KernelStrategy:
    """Coerce 'direct_index' / 'direct_index:parallel' / KernelStrategy."""
    if isinstance(spec, KernelStrategy):
        return spec
    text = str(spec)
    if ":" in text:
        sid, dispatch = text.split(":", 1)
        return KernelStrategy(sid, dispatch)
    return KernelStrategy(text)


def _gate_for_op(op, dtype) -> GateMatrix:
    if op.kind == "G2":
        if op.matrix is None:
            raise MissingParameter(f"G2 op on qubit {op.target} has no matrix")
        return general_gate(op.matrix, dtype=dtype, check_unitary=False)
    return gate_matrix(op.kind, op.theta, dtype=dtype)


def op_qubits(op) -> tuple[tuple, tuple]:
    """(targets, controls) tuple for a circuit op."""
    if op.kind == "SWAP":
        return (op.target, op.second), ()
    if op.control is not None:
        return (op.target,), (op.control,)
    return (op.target,), ()


def apply_gate(state: StateVector, strategy, gate: GateMatrix, targets, controls=()) -> None:
    strat = as_strategy(strategy)
    APPLY_FNS[strat.id](state, gate, targets, controls, parallel=strat.dispatch == "parallel")


def run_circuit(state: StateVector, circuit, strategy="direct_index") -> None:
    """Apply every gate of a circuit in order via the selected strategy.

    Aborts on the first gate error; norm is preserved to within
    1e-5 * gate_count under single precision.
    """
    strat = as_strategy(strategy)
    fn = APPLY_FNS[strat.id]
    par = strat.dispatch == "parallel"
    dtype = state.dtype
    for op in circuit.ops:
        gate = _gate_for_op(op, dtype)
        targets, controls = op_qubits(op)
        fn(state, gate, targets, controls, parallel=par)
