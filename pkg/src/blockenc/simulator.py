"""Sparse statevector simulation and block extraction.

States are hash maps from basis-index integers to complex amplitudes (bit q
of the index is qubit q), which keeps block-encoding circuits tractable at
50+ qubits: ancillas stay basis-correlated with the address, so the support
per basis input remains small except through H layers.
"""
from __future__ import annotations

import cmath
import math
import os

import numpy as np

from .circuit import Circuit, Gate, GateKind, Macro

DEFAULT_SUPPORT_CAP = 1 << 20
_SUPPORT_CAP_ENV = "BLOCKENC_SUPPORT_CAP"


class SimulationError(Exception):
    pass


class SupportCapError(SimulationError):
    """Raised when the sparse support outgrows the configured cap."""


def support_cap_default() -> int:
    value = os.environ.get(_SUPPORT_CAP_ENV)
    return int(value) if value else DEFAULT_SUPPORT_CAP


_SQ2 = 1.0 / math.sqrt(2.0)
_H = ((complex(_SQ2), complex(_SQ2)), (complex(_SQ2), complex(-_SQ2)))


def _g_matrix():
    s = np.diag([1.0, 1.0j])
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) * _SQ2
    t = np.diag([1.0, cmath.exp(1j * math.pi / 4)])
    g = s.conj().T @ h @ t @ h @ s
    return ((complex(g[0, 0]), complex(g[0, 1])),
            (complex(g[1, 0]), complex(g[1, 1])))


_G = _g_matrix()
_GDG = ((complex(_G[0][0].conjugate()), complex(_G[1][0].conjugate())),
        (complex(_G[0][1].conjugate()), complex(_G[1][1].conjugate())))


def _ry_matrix(theta):
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return ((complex(c), complex(-s)), (complex(s), complex(c)))


class SparseState:
    """Mutable sparse state; single owner per simulation run."""

    def __init__(self, num_qubits, amplitudes=None, prune_threshold=1e-14,
                 support_cap=None):
        self.num_qubits = num_qubits
        self.amplitudes = dict(amplitudes) if amplitudes else {0: 1.0 + 0.0j}
        self.prune_threshold = prune_threshold
        self.support_cap = support_cap if support_cap is not None else support_cap_default()
        self.pruned_weight = 0.0

    @classmethod
    def basis(cls, num_qubits, index=0, **kw):
        return cls(num_qubits, {index: 1.0 + 0.0j}, **kw)

    def copy(self):
        s = SparseState(self.num_qubits, self.amplitudes,
                        self.prune_threshold, self.support_cap)
        s.pruned_weight = self.pruned_weight
        return s

    def norm(self):
        return math.sqrt(sum((a * a.conjugate()).real for a in self.amplitudes.values()))

    def support(self):
        return len(self.amplitudes)

    def _controls_pass(self, idx, controls):
        for q, positive in controls:
            if bool((idx >> q) & 1) != positive:
                return False
        return True

    def apply(self, op):
        if isinstance(op, Macro):
            for g in op.expansion:
                self._apply_gate(g)
        elif isinstance(op, Gate):
            self._apply_gate(g=op)
        else:
            raise SimulationError(f"unknown op {op!r}")
        return self

    def _apply_gate(self, g):
        kind = g.kind
        amps = self.amplitudes
        if kind is GateKind.X:
            mask = 1 << g.targets[0]
            self.amplitudes = {idx ^ mask: a for idx, a in amps.items()}
        elif kind is GateKind.Z:
            q = g.targets[0]
            for idx in amps:
                if (idx >> q) & 1:
                    amps[idx] = -amps[idx]
        elif kind in (GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG):
            q = g.targets[0]
            phase = {GateKind.S: 1j, GateKind.SDG: -1j,
                     GateKind.T: cmath.exp(1j * math.pi / 4),
                     GateKind.TDG: cmath.exp(-1j * math.pi / 4)}[kind]
            for idx in amps:
                if (idx >> q) & 1:
                    amps[idx] = amps[idx] * phase
        elif kind is GateKind.H:
            self._apply_1q(g.targets[0], _H)
        elif kind is GateKind.G:
            self._apply_1q(g.targets[0], _G)
        elif kind is GateKind.GDG:
            self._apply_1q(g.targets[0], _GDG)
        elif kind is GateKind.RY:
            self._apply_1q(g.targets[0], _ry_matrix(g.angle))
        elif kind in (GateKind.CRY, GateKind.CCRY):
            self._apply_1q(g.targets[0], _ry_matrix(g.angle), g.controls)
        elif kind in (GateKind.CNOT, GateKind.FANOUT_CNOT, GateKind.TOFFOLI,
                      GateKind.MCX):
            mask = 0
            for t in g.targets:
                mask |= 1 << t
            controls = g.controls
            new = {}
            for idx, a in amps.items():
                if self._controls_pass(idx, controls):
                    idx ^= mask
                new[idx] = new.get(idx, 0.0) + a
            self.amplitudes = new
        elif kind is GateKind.CZ:
            qa, qb = g.targets
            for idx in amps:
                if (idx >> qa) & 1 and (idx >> qb) & 1:
                    amps[idx] = -amps[idx]
        elif kind in (GateKind.SWAP, GateKind.CSWAP):
            qa, qb = g.targets
            controls = g.controls
            new = {}
            for idx, a in amps.items():
                if not controls or self._controls_pass(idx, controls):
                    ba = (idx >> qa) & 1
                    bb = (idx >> qb) & 1
                    if ba != bb:
                        idx ^= (1 << qa) | (1 << qb)
                new[idx] = new.get(idx, 0.0) + a
            self.amplitudes = new
        else:
            raise SimulationError(f"unknown gate kind {kind}")
        if len(self.amplitudes) > self.support_cap:
            raise SupportCapError(
                f"support {len(self.amplitudes)} exceeds cap {self.support_cap}; "
                "reduce D, t, or n (or raise BLOCKENC_SUPPORT_CAP)")

    def _apply_1q(self, q, m, controls=()):
        thr = self.prune_threshold
        mask = 1 << q
        new = {}
        pruned = 0.0
        for idx, a in self.amplitudes.items():
            if controls and not self._controls_pass(idx, controls):
                new[idx] = new.get(idx, 0.0) + a
                continue
            b = (idx >> q) & 1
            base = idx & ~mask
            for nb in (0, 1):
                coeff = m[nb][b]
                if coeff != 0:
                    key = base | (mask if nb else 0)
                    new[key] = new.get(key, 0.0) + coeff * a
        for idx in [k for k, v in new.items() if abs(v) < thr]:
            pruned += abs(new[idx]) ** 2
            del new[idx]
        self.pruned_weight += pruned
        self.amplitudes = new

    def run(self, circuit: Circuit):
        for op in circuit.ops:
            self.apply(op)
        return self

    def register_value(self, idx, qubits):
        """Read a register value; qubits listed most-significant first."""
        value = 0
        for q in qubits:
            value = (value << 1) | ((idx >> q) & 1)
        return value

    def to_dense(self):
        vec = np.zeros(1 << self.num_qubits, dtype=complex)
        for idx, a in self.amplitudes.items():
            vec[idx] = a
        return vec


def basis_index(assignments) -> int:
    """Build a basis index from {qubit: bit}."""
    idx = 0
    for q, b in assignments.items():
        if b:
            idx |= 1 << q
    return idx


def encode_register(qubits, value) -> int:
    """Basis index with ``value`` written big-endian across ``qubits``."""
    idx = 0
    width = len(qubits)
    for i, q in enumerate(qubits):
        if (value >> (width - 1 - i)) & 1:
            idx |= 1 << q
    return idx


def check_clean(state: SparseState, qubits) -> bool:
    """True iff every stored basis state has bit 0 at all listed qubits."""
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return all((idx & mask) == 0 for idx in state.amplitudes)


def run_circuit(circuit: Circuit, initial_index=0, **kw) -> SparseState:
    state = SparseState.basis(circuit.total_qubits, initial_index, **kw)
    return state.run(circuit)


class BlockExtract:
    """Extracted top-left block of a circuit unitary.

    ``column_leaks[k]`` is the squared weight of column k outside the
    <0|-projected block.  For a unitary acting purely on the data register
    the leaks vanish; for a genuine block-encoding they carry the expected
    orthogonal-complement weight 1 - ||column||^2.
    """

    def __init__(self, block, column_leaks, column_norms, in_qubits,
                 out_qubits):
        self.block = block
        self.column_leaks = tuple(column_leaks)
        self.column_norms = tuple(column_norms)
        self.in_qubits = tuple(in_qubits)
        self.out_qubits = tuple(out_qubits)

    @property
    def all_clean(self):
        """True when every column stayed inside the projected block."""
        return all(leak < 5e-11 for leak in self.column_leaks)

    @property
    def unitary_witness(self):
        """Max deviation of (block weight + leak) from 1 over the columns."""
        return max(abs(norm2 + leak - 1.0) for norm2, leak
                   in zip(self.column_norms, self.column_leaks))


def extract_block(circuit: Circuit, in_qubits, dim=None, out_qubits=None,
                  support_cap=None) -> BlockExtract:
    """Run the circuit on inputs |0...0>|k> and collect <0...0,j|U|0...0,k>.

    ``in_qubits``/``out_qubits`` denote the data register (most-significant
    qubit first); all other qubits form the <0| projector.
    """
    in_qubits = tuple(in_qubits)
    out_qubits = tuple(out_qubits) if out_qubits is not None else in_qubits
    n_out = len(out_qubits)
    dim_in = dim if dim is not None else 1 << len(in_qubits)
    dim_out = 1 << n_out
    out_mask = 0
    for q in out_qubits:
        out_mask |= 1 << q
    block = np.zeros((dim_out, dim_in), dtype=complex)
    leaks = []
    norms = []
    for k in range(dim_in):
        state = SparseState.basis(circuit.total_qubits,
                                  encode_register(in_qubits, k),
                                  support_cap=support_cap)
        state.run(circuit)
        leak = 0.0
        kept = 0.0
        for idx, a in state.amplitudes.items():
            if idx & ~out_mask:
                leak += (a * a.conjugate()).real
            else:
                block[state.register_value(idx, out_qubits), k] = a
                kept += (a * a.conjugate()).real
        leaks.append(leak)
        norms.append(kept)
    return BlockExtract(block, leaks, norms, in_qubits, out_qubits)


def spectral_norm(matrix, tol=1e-10, max_iter=10000, seed=7) -> float:
    """Largest singular value by power iteration on M^dagger M (N <= 64)."""
    m = np.asarray(matrix, dtype=complex)
    if max(m.shape) > 64:
        raise ValueError("spectral_norm supports matrices up to 64x64")
    mm = m.conj().T @ m
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(mm.shape[0]) + 1j * rng.standard_normal(mm.shape[0])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = mm @ v
        lam = np.linalg.norm(w)
        if lam < tol:
            return 0.0
        v = w / lam
        if abs(lam - prev) < tol * max(1.0, lam):
            break
        prev = lam
    return math.sqrt(lam)


def dense_unitary(ops, num_qubits) -> np.ndarray:
    """Dense unitary of an op list (<= 12 qubits), built column by column."""
    if num_qubits > 12:
        raise ValueError("dense_unitary limited to 12 qubits")
    dim = 1 << num_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        # Columns are indexed with qubit 0 as the most significant bit so
        # that matrices read in standard |q0 q1 ...> order.
        state = SparseState(num_qubits,
                            {encode_register(range(num_qubits), col): 1.0 + 0.0j})
        for op in ops:
            state.apply(op)
        for idx, a in state.amplitudes.items():
            u[state.register_value(idx, range(num_qubits)), col] = a
    return u
