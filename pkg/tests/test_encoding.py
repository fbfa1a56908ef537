"""Block-encoding assembly: parameter selection and end-to-end extraction."""
import math

import numpy as np
import pytest

from blockenc.encoding import (
    BlockEncodingConfig,
    Method,
    Normalization,
    Variant,
    build_block_encoding,
    build_controlled_block_encoding,
    build_symmetric_block_encoding,
    select_parameters,
)
from blockenc.qram import ConfigurationError, QramModel
from blockenc.simulator import (
    SparseState,
    encode_register,
    extract_block,
    spectral_norm,
)


def test_select_parameters_fixed_example():
    params = select_parameters(0.01, 10.0, 4, Method.FIXED_PRECISION)
    assert params.t == 15
    assert params.r_y == math.ceil(3 * math.log2(1000) + 3 * 2 + 9)


def test_select_parameters_prerotated_example():
    params = select_parameters(0.01, 10.0, 4, Method.PRE_ROTATED)
    assert params.r_y == 42
    assert params.t is None


def test_select_parameters_table1_point():
    params = select_parameters(0.01, 993.8, 4, Method.PRE_ROTATED)
    assert params.r_y == 62


def test_select_parameters_domain():
    with pytest.raises(ValueError):
        select_parameters(-1.0, 1.0, 2)
    with pytest.raises(ValueError):
        select_parameters(0.1, 0.0, 2)


def test_parameter_soundness_bounds():
    """Chosen (t, delta) meet the analytic error budget (criterion 6)."""
    for epsilon in (1e-1, 1e-2, 1e-3):
        for alpha in (1.0, 10.0, 1000.0):
            for big_n in (4, 16):
                n = big_n.bit_length() - 1
                p = select_parameters(epsilon, alpha, n, Method.FIXED_PRECISION)
                total = (4 * p.t * n * p.delta_decomp * alpha
                         + math.pi * n * 2.0 ** -p.t * alpha)
                assert total <= epsilon + 1e-12
                p = select_parameters(epsilon, alpha, n, Method.PRE_ROTATED)
                assert 4 * n * p.delta_decomp * alpha <= epsilon + 1e-12


def test_qnorm_circuit_request_rejected():
    cfg = BlockEncodingConfig(normalization=Normalization.Q_NORM)
    with pytest.raises(ConfigurationError, match="classical report"):
        build_block_encoding(np.eye(2), cfg)


def test_prerotated_requires_flags_model():
    cfg = BlockEncodingConfig(method=Method.PRE_ROTATED,
                              qram=QramModel.SELECT_SWAP, lam=1)
    with pytest.raises(ConfigurationError):
        build_block_encoding(np.eye(2), cfg)


def test_identity_block_fixed():
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=0, t=8)
    res = build_block_encoding(np.eye(2), cfg)
    ext = extract_block(res.circuit, res.in_qubits)
    assert np.abs(ext.block - np.eye(2) / math.sqrt(2)).max() < 4e-2


def test_random_4x4_prerotated_exact():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4))
    cfg = BlockEncodingConfig(method=Method.PRE_ROTATED,
                              qram=QramModel.FLAGS, lam=2)
    res = build_block_encoding(a, cfg)
    ext = extract_block(res.circuit, res.in_qubits)
    assert spectral_norm(a - res.alpha * ext.block) <= 1e-9
    assert ext.unitary_witness < 1e-10


def test_random_4x4_fixed_ss_bound():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 4))
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=1, t=8)
    res = build_block_encoding(a, cfg)
    ext = extract_block(res.circuit, res.in_qubits)
    err = spectral_norm(a - res.alpha * ext.block)
    assert err <= math.pi * 2 * 2.0 ** -8 * res.alpha


def test_matrix_element_identity():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((2, 2))
    cfg = BlockEncodingConfig(method=Method.PRE_ROTATED,
                              qram=QramModel.FLAGS, lam=1)
    res = build_block_encoding(a, cfg)
    ext = extract_block(res.circuit, res.in_qubits)
    for j in range(2):
        for k in range(2):
            assert abs(ext.block[j, k] * res.alpha - a[j, k]) < 1e-9


def controlled_block(res, control_bits):
    circuit = res.circuit
    extra = 0
    for q, bit in zip(res.control_qubits, control_bits):
        if bit:
            extra |= 1 << q
    dim = 1 << len(res.in_qubits)
    block = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        st = SparseState.basis(circuit.total_qubits,
                               encode_register(res.in_qubits, k) | extra)
        st.run(circuit)
        for idx, amp in st.amplitudes.items():
            other = idx & ~extra
            for q in res.in_qubits:
                other &= ~(1 << q)
            if other == 0 and (idx & extra) == extra:
                block[st.register_value(idx, res.in_qubits), k] = amp
    return block


def test_controlled_block_encoding():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4))
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=1, t=8,
                              variant=Variant.CONTROLLED)
    res = build_controlled_block_encoding(a, cfg)
    off = controlled_block(res, (0,))
    assert np.abs(off - np.eye(4)).max() < 1e-10
    on = controlled_block(res, (1,))
    assert spectral_norm(a - res.alpha * on) <= math.pi * 2 * 2.0 ** -8 * res.alpha


def test_multi_controlled_block_encoding():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((2, 2))
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=1, t=8,
                              variant=Variant.CONTROLLED, num_controls=2)
    res = build_controlled_block_encoding(a, cfg)
    for bits in ((0, 0), (0, 1), (1, 0)):
        block = controlled_block(res, bits)
        assert np.abs(block - np.eye(2)).max() < 1e-10, bits
    on = controlled_block(res, (1, 1))
    assert spectral_norm(a - res.alpha * on) <= math.pi * 2.0 ** -8 * res.alpha


def test_symmetric_structure_1x1():
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=0, t=8,
                              variant=Variant.SYMMETRIC)
    res = build_symmetric_block_encoding(np.array([[1.0]]), cfg)
    ext = extract_block(res.circuit, res.in_qubits, out_qubits=res.out_qubits)
    block = res.alpha * ext.block
    assert abs(block[0, 1] - 1.0) < 4e-2
    assert abs(block[1, 0] - 1.0) < 4e-2
    assert abs(block[0, 0]) < 4e-2
    assert abs(block[1, 1]) < 4e-2


def test_symmetric_random_2x2():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((2, 2))
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=0, t=8,
                              variant=Variant.SYMMETRIC)
    res = build_symmetric_block_encoding(a, cfg)
    assert abs(res.alpha - np.linalg.norm(a)) < 1e-12  # ||A||_F, not 2||A||_F
    ext = extract_block(res.circuit, res.in_qubits, out_qubits=res.out_qubits)
    abar = np.zeros((4, 4))
    abar[:2, 2:] = a
    abar[2:, :2] = a.T
    tol = math.pi * res.n * 2.0 ** -8 * res.alpha
    assert spectral_norm(abar - res.alpha * ext.block[:4, :4]) <= tol


def test_output_norm_unitarity():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((2, 2))
    for cfg in (BlockEncodingConfig(method=Method.FIXED_PRECISION,
                                    qram=QramModel.SELECT_SWAP, lam=1, t=6),
                BlockEncodingConfig(method=Method.PRE_ROTATED,
                                    qram=QramModel.FLAGS, lam=1)):
        res = build_block_encoding(a, cfg)
        ext = extract_block(res.circuit, res.in_qubits)
        assert ext.unitary_witness < 1e-10


def test_padding_report():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((3, 5))
    cfg = BlockEncodingConfig(method=Method.FIXED_PRECISION,
                              qram=QramModel.SELECT_SWAP, lam=0, t=4)
    res = build_block_encoding(a, cfg)
    assert res.original_shape == (3, 5)
    assert res.padded_shape == (8, 8)
