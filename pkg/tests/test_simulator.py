"""Sparse statevector simulator: gates, invariants, block extraction."""
import math

import numpy as np
import pytest

from blockenc.circuit import CircuitBuilder, Gate, GateKind
from blockenc.simulator import (
    SparseState,
    SupportCapError,
    check_clean,
    dense_unitary,
    encode_register,
    extract_block,
    run_circuit,
    spectral_norm,
)


def test_x_on_zero():
    st = SparseState.basis(1)
    st.apply(Gate(GateKind.X, (0,)))
    assert st.amplitudes == {1: 1.0 + 0.0j}


def test_h_on_zero():
    st = SparseState.basis(1)
    st.apply(Gate(GateKind.H, (0,)))
    amp = 1 / math.sqrt(2)
    assert abs(st.amplitudes[0] - amp) < 1e-12
    assert abs(st.amplitudes[1] - amp) < 1e-12


def test_ry_amplitudes():
    theta = 2 * math.acos(0.6)
    st = SparseState.basis(1)
    st.apply(Gate(GateKind.RY, (0,), (), theta))
    assert abs(st.amplitudes[0] - 0.6) < 1e-12
    assert abs(st.amplitudes[1] - 0.8) < 1e-12


def test_negative_polarity_controls():
    st = SparseState.basis(2)  # both qubits |0>
    st.apply(Gate(GateKind.CNOT, (1,), ((0, False),)))
    assert st.amplitudes == {2: 1.0 + 0.0j}


def _random_circuit(rng, n=4, ops=60):
    b = CircuitBuilder()
    b.allocate("q", n)
    for _ in range(ops):
        kinds = [GateKind.H, GateKind.T, GateKind.X, GateKind.S,
                 GateKind.G, GateKind.RY, GateKind.CNOT,
                 GateKind.CSWAP, GateKind.CZ, GateKind.TOFFOLI]
        kind = kinds[int(rng.integers(len(kinds)))]
        qs = [int(q) for q in rng.permutation(n)]
        if kind is GateKind.CNOT:
            b.gate(kind, (qs[0],), ((qs[1], bool(rng.integers(2))),))
        elif kind is GateKind.CSWAP:
            b.gate(kind, (qs[0], qs[1]), ((qs[2], True),))
        elif kind is GateKind.CZ:
            b.gate(kind, (qs[0], qs[1]))
        elif kind is GateKind.TOFFOLI:
            b.gate(kind, (qs[0],), ((qs[1], True), (qs[2], False)))
        elif kind is GateKind.RY:
            b.gate(kind, qs[0], angle=float(rng.uniform(0, 2 * math.pi)))
        else:
            b.gate(kind, qs[0])
    return b.build()


def test_norm_preserved():
    rng = np.random.default_rng(0)
    for _ in range(10):
        c = _random_circuit(rng)
        st = run_circuit(c, int(rng.integers(16)))
        assert abs(st.norm() - 1.0) < 1e-10


def test_linearity():
    rng = np.random.default_rng(1)
    c = _random_circuit(rng)
    a, b = 0.6, 0.8j
    st = SparseState(4, {3: a, 9: b})
    st.run(c)
    st0 = run_circuit(c, 3)
    st1 = run_circuit(c, 9)
    for idx in set(st.amplitudes) | set(st0.amplitudes) | set(st1.amplitudes):
        combined = a * st0.amplitudes.get(idx, 0) + b * st1.amplitudes.get(idx, 0)
        assert abs(st.amplitudes.get(idx, 0) - combined) < 1e-10


def test_adjoint_inverts():
    rng = np.random.default_rng(2)
    for _ in range(10):
        c = _random_circuit(rng)
        basis = int(rng.integers(16))
        st = run_circuit(c, basis)
        st.run(c.adjoint())
        assert abs(abs(st.amplitudes.get(basis, 0)) - 1.0) < 1e-9
        assert sum(abs(a) ** 2 for i, a in st.amplitudes.items()
                   if i != basis) < 1e-18


def test_check_clean():
    st = SparseState.basis(2, 0)
    assert check_clean(st, (0, 1))
    st = SparseState(2, {0: 1 / math.sqrt(2), 2: 1 / math.sqrt(2)})
    assert not check_clean(st, (1,))
    assert check_clean(st, (0,))


def test_support_cap():
    b = CircuitBuilder()
    b.allocate("q", 8)
    for q in range(8):
        b.gate(GateKind.H, q)
    with pytest.raises(SupportCapError):
        run_circuit(b.build(), support_cap=100)


def test_spectral_norm_examples():
    assert abs(spectral_norm(np.diag([3.0, 4.0])) - 4.0) < 1e-9
    assert abs(spectral_norm(np.array([[0, 1], [1, 0]])) - 1.0) < 1e-9


def test_spectral_norm_vs_svd_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        want = np.linalg.svd(m, compute_uv=False)[0]
        assert abs(spectral_norm(m) - want) < 1e-8


def test_extract_block_identity():
    b = CircuitBuilder()
    reg = b.allocate("data", 2)
    b.allocate("anc", 1)
    ext = extract_block(b.build(), reg.qubits)
    assert np.abs(ext.block - np.eye(4)).max() < 1e-12
    assert ext.all_clean


def test_extract_block_single_ry():
    theta = 1.234
    b = CircuitBuilder()
    reg = b.allocate("data", 1)
    b.gate(GateKind.RY, 0, angle=theta)
    ext = extract_block(b.build(), reg.qubits)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    assert np.abs(ext.block - np.array([[c, -s], [s, c]])).max() < 1e-12


def test_extract_block_norm_bound():
    rng = np.random.default_rng(4)
    c = _random_circuit(rng, n=4)
    ext = extract_block(c, (0, 1))
    assert spectral_norm(ext.block) <= 1 + 1e-10
    assert ext.unitary_witness < 1e-10


def test_dense_unitary_matches_kron():
    b = CircuitBuilder()
    b.allocate("q", 2)
    b.gate(GateKind.H, 0)
    u = dense_unitary(b.build().ops, 2)
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.abs(u - np.kron(h, np.eye(2))).max() < 1e-12


def test_support_cap_env_override(monkeypatch):
    monkeypatch.setenv("BLOCKENC_SUPPORT_CAP", "64")
    st = SparseState.basis(8)
    assert st.support_cap == 64
