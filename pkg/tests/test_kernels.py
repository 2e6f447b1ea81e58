import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_circuit
from qsimbench.circuits import build_ghz, build_qft
from qsimbench.errors import DenseCapExceeded, DuplicateQubit, QubitIndexOutOfRange
from qsimbench.gates import gate_matrix
from qsimbench.kernels import (
    APPLY_FNS,
    CHUNK_PAIRS,
    KernelStrategy,
    STRATEGY_IDS,
    apply_gate_direct,
    apply_gate_flat,
    apply_gate_kron_dense,
    apply_gate_kron_lazy,
    apply_gate_tensordot,
    as_strategy,
    pair_indices,
    record_allocations,
    run_circuit,
)
from qsimbench.state import init_zero_state, state_norm

S2 = 1 / np.sqrt(2)


def final_state(circuit, strategy):
    s = init_zero_state(circuit.n)
    run_circuit(s, circuit, strategy)
    return s.amps


def max_dev(a, b):
    return float(np.max(np.abs(a.astype(np.complex128) - b.astype(np.complex128))))


# ---------------------------------------------------------------------------
# pair enumeration

def test_pair_example_t2():
    # target bit 2: index 1 pairs with 1 XOR 4 = 5
    idx0, idx1 = pair_indices(4, 2)
    pairs = dict(zip(idx0.tolist(), idx1.tolist()))
    assert pairs[1] == 5


@pytest.mark.parametrize("n,t", [(1, 0), (3, 0), (3, 2), (6, 3)])
def test_pair_partition_exhaustive(n, t):
    idx0, idx1 = pair_indices(n, t)
    assert idx0.size == idx1.size == 2 ** (n - 1)
    combined = np.sort(np.concatenate([idx0, idx1]))
    np.testing.assert_array_equal(combined, np.arange(2 ** n))


@given(st.integers(1, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1))))
def test_pair_partition_property(nt):
    n, t = nt
    idx0, idx1 = pair_indices(n, t)
    combined = np.sort(np.concatenate([idx0, idx1]))
    np.testing.assert_array_equal(combined, np.arange(2 ** n))
    # flipping bit t maps each zero-set index to its partner
    np.testing.assert_array_equal(idx0 ^ (1 << t), idx1)


def test_pair_indices_with_control():
    n, t, c = 4, 1, 3
    idx0, idx1 = pair_indices(n, t, (c,))
    assert idx0.size == 2 ** (n - 2)
    assert np.all((idx0 >> c) & 1 == 1)
    assert np.all((idx0 >> t) & 1 == 0)
    np.testing.assert_array_equal(idx1, idx0 | (1 << t))


# ---------------------------------------------------------------------------
# single-gate anchors

def test_hadamard_on_single_qubit():
    s = init_zero_state(1)
    apply_gate_direct(s, gate_matrix("H"), (0,))
    np.testing.assert_allclose(s.amps, [S2, S2], atol=1e-7)


def test_direct_cnot_matches_small_matvec_oracle():
    # CNOT(control 0, target 1) permutation built by explicit basis mapping
    def cnot_oracle(vec):
        out = np.zeros_like(vec)
        for a, amp in enumerate(vec):
            b = a ^ 0b10 if a & 0b01 else a
            out[b] = amp
        return out

    start = np.array([S2, S2, 0, 0], dtype=np.complex64)
    expected = cnot_oracle(start)
    np.testing.assert_allclose(expected, [S2, 0, 0, S2], atol=1e-7)

    s = init_zero_state(2)
    s.amps[:] = start
    apply_gate_direct(s, gate_matrix("CNOT"), (1,), (0,))
    np.testing.assert_allclose(s.amps, expected, atol=1e-7)


def test_flat_x_on_qubit_1():
    s = init_zero_state(2)
    apply_gate_flat(s, gate_matrix("X"), (1,))
    np.testing.assert_array_equal(np.nonzero(s.amps)[0], [2])


def test_flat_ghz4():
    amps = final_state(build_ghz(4), "flat_index")
    nz = np.nonzero(np.abs(amps) > 1e-7)[0]
    np.testing.assert_array_equal(nz, [0, 15])
    np.testing.assert_allclose(np.abs(amps[nz]), S2, atol=1e-6)


def test_dense_z_flips_sign_of_one_component():
    s = init_zero_state(2)
    s.amps[:] = [S2, S2, 0, 0]
    apply_gate_kron_dense(s, gate_matrix("Z"), (0,))
    np.testing.assert_allclose(s.amps, [S2, -S2, 0, 0], atol=1e-7)


def test_tensordot_contracts_axis_zero_for_top_qubit():
    # gate on qubit n-1 must equal a contraction along axis 0 of the [2]*n view
    rng = np.random.default_rng(7)
    n = 3
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    amps = (amps / np.linalg.norm(amps)).astype(np.complex64)
    h = gate_matrix("H")

    expected = np.tensordot(h.entries, amps.reshape((2,) * n), axes=([1], [0])).reshape(-1)

    s = init_zero_state(n)
    s.amps[:] = amps
    apply_gate_tensordot(s, h, (n - 1,))
    np.testing.assert_allclose(s.amps, expected, atol=1e-6)


def test_kron_lazy_identity_is_bitwise_noop():
    rng = np.random.default_rng(0)
    s = init_zero_state(5)
    s.amps[:] = (rng.normal(size=32) + 1j * rng.normal(size=32)).astype(np.complex64)
    before = s.amps.copy()
    ident = gate_matrix("P", 0.0)  # diag(1, 1)
    apply_gate_kron_lazy(s, ident, (2,))
    np.testing.assert_array_equal(s.amps, before)


def test_kron_lazy_h_twice_restores():
    rng = np.random.default_rng(1)
    s = init_zero_state(5)
    amps = rng.normal(size=32) + 1j * rng.normal(size=32)
    s.amps[:] = (amps / np.linalg.norm(amps)).astype(np.complex64)
    before = s.amps.copy()
    h = gate_matrix("H")
    apply_gate_kron_lazy(s, h, (3,))
    apply_gate_kron_lazy(s, h, (3,))
    assert max_dev(s.amps, before) < 1e-6


def test_dense_cap():
    s = init_zero_state(13)
    with pytest.raises(DenseCapExceeded):
        apply_gate_kron_dense(s, gate_matrix("H"), (0,))
    # a raised cap admits n=13
    apply_gate_kron_dense(s, gate_matrix("X"), (0,), dense_cap=13)
    assert np.nonzero(s.amps)[0].tolist() == [1]


def test_dense_size_arithmetic():
    # 2^12 x 2^12 complex64 = 128 MiB is the default cap boundary
    assert (2 ** 12) ** 2 * 8 == 128 * 2 ** 20


# ---------------------------------------------------------------------------
# cross-kernel equivalence

@pytest.mark.parametrize("seed", range(5))
def test_random_circuits_all_strategies_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    circuit = random_circuit(rng, n, int(rng.integers(5, 30)))
    states = {sid: final_state(circuit, sid) for sid in STRATEGY_IDS}
    ref = states["kron_dense"]
    for sid, amps in states.items():
        assert max_dev(amps, ref) < 1e-6, f"{sid} deviates from dense oracle"


def test_qft10_all_strategies_pairwise_below_1e6():
    circuit = build_qft(10)
    states = [final_state(circuit, sid) for sid in STRATEGY_IDS]
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            assert max_dev(states[i], states[j]) < 1e-6


def test_same_strategy_twice_is_deterministic():
    circuit = build_qft(6)
    a = final_state(circuit, "tensordot")
    b = final_state(circuit, "tensordot")
    assert a.tobytes() == b.tobytes()


# ---------------------------------------------------------------------------
# run_circuit and dispatch

def test_empty_circuit_is_noop():
    from qsimbench.circuits import Circuit
    s = init_zero_state(4)
    before = s.amps.copy()
    run_circuit(s, Circuit(n=4, ops=()), "direct_index")
    np.testing.assert_array_equal(s.amps, before)


def test_ghz20_two_nonzero_amplitudes():
    amps = final_state(build_ghz(20), "direct_index")
    nz = np.nonzero(amps)[0]
    np.testing.assert_array_equal(nz, [0, 2 ** 20 - 1])
    np.testing.assert_allclose(np.abs(amps[nz]), S2, atol=1e-6)


@pytest.mark.parametrize("sid", STRATEGY_IDS)
def test_parallel_matches_sequential(sid):
    rng = np.random.default_rng(42)
    circuit = random_circuit(rng, 6, 20)
    seq = final_state(circuit, sid)
    par = final_state(circuit, f"{sid}:parallel")
    if sid == "direct_index":
        assert seq.tobytes() == par.tobytes()
    else:
        assert max_dev(seq, par) < 1e-7


def test_norm_preserved_per_gate_qft8():
    for sid in STRATEGY_IDS:
        circuit = build_qft(8)
        s = init_zero_state(8)
        for op in circuit.ops:
            run_circuit(s, type(circuit)(n=8, ops=(op,)), sid)
            assert abs(state_norm(s) - 1.0) < 1e-5


def test_strategy_parsing():
    assert as_strategy("direct_index").dispatch == "sequential"
    assert as_strategy("tensordot:parallel").dispatch == "parallel"
    assert as_strategy(KernelStrategy("flat_index")).id == "flat_index"
    with pytest.raises(ValueError):
        as_strategy("bogus")
    with pytest.raises(ValueError):
        as_strategy("tensordot:bogus")


# ---------------------------------------------------------------------------
# errors and allocation accounting

def test_qubit_index_out_of_range():
    s = init_zero_state(3)
    with pytest.raises(QubitIndexOutOfRange):
        apply_gate_direct(s, gate_matrix("H"), (3,))


def test_duplicate_qubit():
    s = init_zero_state(3)
    with pytest.raises(DuplicateQubit):
        apply_gate_direct(s, gate_matrix("CNOT"), (1,), (1,))


@pytest.mark.parametrize("n", [17, 20])
def test_direct_index_allocations_bounded_by_chunk(n):
    s = init_zero_state(n)
    with record_allocations() as log:
        apply_gate_direct(s, gate_matrix("H"), (0,))
        apply_gate_direct(s, gate_matrix("H"), (n - 1,))
    assert max(log) <= 2 * CHUNK_PAIRS  # constant, independent of n


def test_flat_index_allocates_full_scratch():
    n = 17
    s = init_zero_state(n)
    with record_allocations() as log:
        apply_gate_flat(s, gate_matrix("H"), (0,))
    assert max(log) >= 2 ** (n - 1)
