"""Block-encoding assembly: parameter selection, standard/controlled/symmetric
variants.

A block-encoding is the product of a plain state-preparation leg (the row-norm
state), a register swap, and the adjoint of a controlled-state-preparation leg
(the row states); the top-left block of the resulting unitary equals A/alpha
with alpha the Frobenius norm.  The block indices live on the bottom n-qubit
register; every other qubit belongs to the <0| projector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .angle_tree import (
    build_tree,
    matrix_trees,
    pad_to_power_of_two,
    quantized_tree_bits,
    zero_tree,
)
from .circuit import Circuit, CircuitBuilder, Gate, GateKind
from .decomp import and_toffoli, parallel_cswap_clean
from .qram import (
    BucketBrigadeLoad,
    ConfigurationError,
    LoadSpec,
    QramModel,
    SelectSwapLoad,
)
from .stateprep import (
    csp_prerotated_ops,
    fixed_init_ops,
    fixed_rows_for_trees,
    sp_fixed_ops,
    sp_prerotated_ops,
)


class Method(str, Enum):
    FIXED_PRECISION = "fixed"
    PRE_ROTATED = "prerotated"


class Variant(str, Enum):
    STANDARD = "standard"
    CONTROLLED = "controlled"
    SYMMETRIC = "symmetric"


class Normalization(str, Enum):
    FROBENIUS = "frobenius"
    Q_NORM = "qnorm"


@dataclass(frozen=True)
class BlockEncodingConfig:
    method: Method = Method.FIXED_PRECISION
    qram: QramModel = QramModel.SELECT_SWAP
    lam: int = 0
    epsilon: float = 0.01
    variant: Variant = Variant.STANDARD
    normalization: Normalization = Normalization.FROBENIUS
    t: int | None = None
    num_controls: int = 1

    def validate(self, n):
        if self.normalization is Normalization.Q_NORM:
            raise ConfigurationError(
                "the q-norm normalization is a classical report only; "
                "no circuit generation is defined for it")
        if self.method is Method.PRE_ROTATED:
            if self.qram is not QramModel.FLAGS or self.lam != n:
                raise ConfigurationError(
                    "the pre-rotated method is only available with the flags "
                    "access model and lambda = n")
        else:
            if self.qram is QramModel.FLAGS:
                raise ConfigurationError(
                    "the flags access model is only used by the pre-rotated "
                    "method")
            if not 0 <= self.lam <= n:
                raise ConfigurationError("lambda must lie in [0, n]")


@dataclass(frozen=True)
class EncodingParams:
    """epsilon-driven parameter choice (leading terms, O(.) dropped)."""

    t: int | None
    r_y: int
    delta_decomp: float
    alpha: float


def select_parameters(epsilon, alpha, n,
                      method=Method.FIXED_PRECISION) -> EncodingParams:
    if epsilon <= 0 or alpha <= 0:
        raise ValueError("epsilon and alpha must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    la = math.log2(alpha / epsilon)
    ln = math.log2(n) if n > 1 else 0.0
    if method is Method.FIXED_PRECISION:
        t = math.ceil(la + math.log2(math.pi) + ln + 1)
        delta = epsilon / (8 * t * alpha * n)
        r_y = math.ceil(3 * la + 3 * ln + 9)
        return EncodingParams(t, r_y, delta, alpha)
    delta = epsilon / (4 * alpha * n)
    r_y = math.ceil(3 * la + 3 * ln + 6)
    return EncodingParams(None, r_y, delta, alpha)


@dataclass(frozen=True)
class BlockEncodingResult:
    circuit: Circuit
    alpha: float
    n: int
    in_qubits: tuple
    out_qubits: tuple
    config: BlockEncodingConfig
    params: EncodingParams | None = None
    original_shape: tuple | None = None
    padded_shape: tuple | None = None
    control_qubits: tuple = ()


def _adjoint_ops(ops):
    return [op.adjoint() for op in reversed(ops)]


def _prepare_matrix(a, square=True):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    original = tuple(a.shape)
    padded = pad_to_power_of_two(a)
    if square and padded.shape[0] != padded.shape[1]:
        side = max(padded.shape)
        squared = np.zeros((side, side))
        squared[: padded.shape[0], : padded.shape[1]] = padded
        padded = squared
    return padded, original, tuple(padded.shape)


class _FixedLegs:
    """Shared machinery for the fixed-precision legs of a block-encoding."""

    def __init__(self, builder, data, dblock, control, row_trees, phi_tree,
                 n, t, cfg, corrupt_angle=False):
        big_n = 1 << n
        d = (big_n - 1) * t + big_n
        rows = fixed_rows_for_trees(row_trees, t)
        if corrupt_angle:
            rows = [list(r) for r in rows]
            rows[0][0] ^= 1
            rows = [tuple(r) for r in rows]
        spec = LoadSpec(n=n, data_width=d, lam=cfg.lam, model=cfg.qram,
                        rows=tuple(rows))
        if cfg.qram is QramModel.SELECT_SWAP:
            self.plan = SelectSwapLoad(builder, control, dblock, spec)
        else:
            self.plan = BucketBrigadeLoad(builder, control, dblock, spec)
        self.data = data
        self.dblock = dblock
        self.a_slots = {r: tuple(dblock[(r - 1) * t: r * t])
                        for r in range(1, big_n)}
        self.s_block = tuple(dblock[(big_n - 1) * t:])
        self.n = n
        self.t = t
        if phi_tree is not None:
            bits, signs = quantized_tree_bits(phi_tree, t)
            self.phi_init = fixed_init_ops(self.a_slots, self.s_block, bits,
                                           signs)
        else:
            self.phi_init = None

    def sp_ops(self):
        return sp_fixed_ops(self.data, self.a_slots, self.s_block, self.n,
                            self.t)

    def leg1_ops(self):
        return self.phi_init + self.sp_ops() + self.phi_init

    def load_ops(self):
        return self.plan.build_ops()


def build_block_encoding(a, cfg: BlockEncodingConfig,
                         corrupt_angle=False) -> BlockEncodingResult:
    """Standard-variant U_A; the block lives on the ``control`` register."""
    if cfg.variant is Variant.CONTROLLED:
        return build_controlled_block_encoding(a, cfg)
    if cfg.variant is Variant.SYMMETRIC:
        return build_symmetric_block_encoding(a, cfg)
    padded, original, shape = _prepare_matrix(a)
    n = shape[0].bit_length() - 1
    if n < 1:
        raise ConfigurationError("need a matrix of at least 2x2 after padding")
    cfg.validate(n)
    row_trees, phi_tree, alpha = matrix_trees(padded)
    params = select_parameters(cfg.epsilon, alpha, n, cfg.method)
    b = CircuitBuilder()
    data = b.allocate("data", n)
    if cfg.method is Method.FIXED_PRECISION:
        t = cfg.t if cfg.t is not None else params.t
        dblock = b.allocate("dblock", ((1 << n) - 1) * t + (1 << n))
        control = b.allocate("control", n)
        legs = _FixedLegs(b, data.qubits, dblock.qubits, control.qubits,
                          row_trees, phi_tree, n, t, cfg, corrupt_angle)
        b.begin_stage("leg1_sp_phi")
        b.extend(legs.leg1_ops())
        b.begin_stage("register_swap")
        for qa, qb in zip(data.qubits, control.qubits):
            b.gate(GateKind.SWAP, (qa, qb))
        b.begin_stage("leg2_load")
        b.extend(legs.load_ops())
        b.begin_stage("leg2_sp_dagger")
        b.extend(_adjoint_ops(legs.sp_ops()))
        b.begin_stage("leg2_load_dagger")
        b.extend(_adjoint_ops(legs.load_ops()))
    else:
        big_n = 1 << n
        angle = b.allocate("angle", big_n - 1)
        flag = b.allocate("flag", big_n - 1)
        control = b.allocate("control", n)
        leg2, plan = csp_prerotated_ops(b, data.qubits, angle.qubits,
                                        flag.qubits, control.qubits, row_trees)
        slots = {r: angle.qubits[r - 1] for r in range(1, big_n)}
        f_slots = {r: flag.qubits[r - 1] for r in range(1, big_n)}
        pa, pb = plan.copies[0][3], plan.copies[0][4]
        b.begin_stage("leg1_sp_phi")
        b.extend(sp_prerotated_ops(data.qubits, slots, f_slots, pa, pb,
                                   phi_tree))
        b.begin_stage("register_swap")
        for qa, qb in zip(data.qubits, control.qubits):
            b.gate(GateKind.SWAP, (qa, qb))
        b.begin_stage("leg2_csp_dagger")
        b.extend(_adjoint_ops(leg2))
    circuit = b.build()
    return BlockEncodingResult(circuit, alpha, n, control.qubits,
                               control.qubits, cfg, params, original, shape)


def build_controlled_block_encoding(a, cfg: BlockEncodingConfig,
                                    num_controls=None) -> BlockEncodingResult:
    """CU_A: identity unless all control qubits are |1>.

    A D-qubit staging register receives the loaded (or X-written) angle data;
    a phase-correct controlled-swap layer moves it into the block the state
    preparation reads, so control |0> leaves the all-zero angle tree in place
    and the whole circuit acts as the identity.
    """
    padded, original, shape = _prepare_matrix(a)
    n = shape[0].bit_length() - 1
    cfg.validate(n)
    if cfg.method is not Method.FIXED_PRECISION:
        raise ConfigurationError(
            "the controlled variant is implemented for the fixed-precision "
            "method (the flags loader would need doubly-controlled staging)")
    m = num_controls if num_controls is not None else cfg.num_controls
    if m < 1:
        raise ConfigurationError("need at least one control qubit")
    row_trees, phi_tree, alpha = matrix_trees(padded)
    params = select_parameters(cfg.epsilon, alpha, n, cfg.method)
    t = cfg.t if cfg.t is not None else params.t
    big_n = 1 << n
    d = (big_n - 1) * t + big_n

    b = CircuitBuilder()
    ctrl = b.allocate("ctrl", m)
    data = b.allocate("data", n)
    dblock = b.allocate("dblock", d)
    stage = b.allocate("stage", d)
    control = b.allocate("control", n)
    and_reg = b.maybe_allocate("and_anc", m - 1)
    pool = b.allocate("cswap_pool", 2 * max(d, n))
    legs = _FixedLegs(b, data.qubits, dblock.qubits, control.qubits,
                      row_trees, phi_tree, n, t, cfg)

    if m == 1:
        gate_control = ctrl[0]
        and_ops = []
    else:
        and_ops = [and_toffoli(ctrl[0], ctrl[1], and_reg[0],
                               ancilla=pool.qubits[0])]
        for i in range(2, m):
            and_ops.append(and_toffoli(and_reg[i - 2], ctrl[i],
                                       and_reg[i - 1], ancilla=pool.qubits[0]))
        gate_control = and_reg[m - 2]

    def staged_cswap():
        pairs = tuple(zip(dblock.qubits, stage.qubits))
        return and_ops + [parallel_cswap_clean(
            control=gate_control, pairs=pairs,
            ancillas=pool.qubits[: 2 * d])] + _adjoint_ops(and_ops)

    stage_init = fixed_rows_for_trees([phi_tree], t)[0]
    stage_x = [Gate(GateKind.X, (stage[i],)) for i, bit in enumerate(stage_init)
               if bit]
    b.begin_stage("leg1_sp_phi")
    b.extend(stage_x)
    b.extend(staged_cswap())
    b.extend(legs.sp_ops())
    b.extend(staged_cswap())
    b.extend(stage_x)
    b.begin_stage("register_swap")
    b.extend(and_ops)
    b.add(parallel_cswap_clean(control=gate_control,
                               pairs=tuple(zip(data.qubits, control.qubits)),
                               ancillas=pool.qubits[2: 2 + 2 * n]))
    b.extend(_adjoint_ops(and_ops))
    b.begin_stage("leg2")
    load_into_stage = _retarget_load(legs, stage.qubits, dblock.qubits)
    b.extend(load_into_stage)
    b.extend(staged_cswap())
    b.extend(_adjoint_ops(legs.sp_ops()))
    b.extend(staged_cswap())
    b.extend(_adjoint_ops(load_into_stage))
    circuit = b.build()
    return BlockEncodingResult(circuit, alpha, n, control.qubits,
                               control.qubits, cfg, params, original, shape,
                               control_qubits=ctrl.qubits)


def _retarget_load(legs, stage_qubits, dblock_qubits):
    """Rebuild the LOAD ops with the data register redirected to staging."""
    remap = dict(zip(dblock_qubits, stage_qubits))
    ops = []
    for op in legs.load_ops():
        ops.append(_remap_op(op, remap))
    return ops


def _remap_op(op, remap):
    if isinstance(op, Gate):
        return Gate(op.kind, tuple(remap.get(q, q) for q in op.targets),
                    tuple((remap.get(q, q), p) for q, p in op.controls),
                    op.angle)
    from .circuit import Macro
    return Macro(op.kind, op.params,
                 [_remap_op(g, remap) for g in op.expansion],
                 op.t_count, op.t_depth, op.extra_ancillas)


def symmetric_family_trees(a):
    """Controlled-state-preparation trees for the symmetrized encoding.

    With M = 2^m >= N and ell = m + 1, control value i < M selects the i-th
    row state on indices M..M+N-1; M <= i < M+N selects the row-norm state on
    indices 0..M-1; larger i select the all-zero tree.
    """
    a = np.asarray(a, dtype=float)
    m_rows, n_cols = a.shape
    ell = (m_rows.bit_length() - 1) + 1
    dim = 1 << ell
    row_norms = np.linalg.norm(a, axis=1)
    trees = []
    for i in range(dim):
        vec = np.zeros(dim)
        if i < m_rows:
            if np.any(a[i]):
                vec[m_rows: m_rows + n_cols] = a[i]
                trees.append(build_tree(vec, ell))
            else:
                trees.append(zero_tree(ell))
        elif i < m_rows + n_cols:
            vec[:m_rows] = row_norms
            trees.append(build_tree(vec, ell))
        else:
            trees.append(zero_tree(ell))
    return trees, ell


def build_symmetric_block_encoding(a, cfg: BlockEncodingConfig) -> BlockEncodingResult:
    """Block-encode the off-diagonal symmetrized matrix [[0, A], [A^T, 0]].

    Both legs are the same controlled-state preparation over the symmetrized
    state family; normalization stays ||A||_F (not 2||A||_F).
    """
    if cfg.method is not Method.FIXED_PRECISION:
        raise ConfigurationError("the symmetric variant uses fixed precision")
    padded, original, shape = _prepare_matrix(a, square=False)
    if shape[0] < shape[1]:
        raise ConfigurationError(
            "symmetrized encoding assumes M >= N; transpose the input")
    alpha = float(np.linalg.norm(padded))
    if alpha == 0:
        raise ConfigurationError("matrix is all zero")
    trees, ell = symmetric_family_trees(padded)
    params = select_parameters(cfg.epsilon, alpha, ell, cfg.method)
    t = cfg.t if cfg.t is not None else params.t
    big_n = 1 << ell
    d = (big_n - 1) * t + big_n
    b = CircuitBuilder()
    data = b.allocate("data", ell)
    dblock = b.allocate("dblock", d)
    control = b.allocate("control", ell)
    cfg_inner = cfg
    legs = _FixedLegs(b, data.qubits, dblock.qubits, control.qubits,
                      trees, None, ell, t, cfg_inner)
    csp = legs.load_ops() + legs.sp_ops() + _adjoint_ops(legs.load_ops())
    b.begin_stage("csp")
    b.extend(csp)
    b.begin_stage("register_swap")
    for qa, qb in zip(data.qubits, control.qubits):
        b.gate(GateKind.SWAP, (qa, qb))
    b.begin_stage("csp_dagger")
    b.extend(_adjoint_ops(csp))
    circuit = b.build()
    return BlockEncodingResult(circuit, alpha, ell, control.qubits,
                               control.qubits, cfg, params, original, shape)
