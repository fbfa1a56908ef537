"""Clifford+T gate decompositions and costed macro factories.

Each factory returns either a ``CostedFragment`` (a gate list whose counted
resources reproduce the declared cost) or a ``Macro`` with a declared cost and
an exact unitary expansion.  Phase-incorrect fragments permute basis states
correctly but pick up -1 phases on some inputs; they are marked
``phase_exact=False`` and are only used where the phase lands in garbage or
cancels against the adjoint leg.
"""
from __future__ import annotations

import math

from .circuit import Gate, GateKind, Macro, MacroKind


class ParameterError(ValueError):
    pass


class CostedFragment:
    """Gate list plus its declared (t_count, t_depth, ancillas) cost.

    Declared costs exclude rotation synthesis; ``rotations`` counts the RY
    gates in the fragment, each of which costs R_y when the circuit is
    counted with a synthesis budget.
    """

    __slots__ = ("gates", "t_count", "t_depth", "ancillas", "phase_exact",
                 "rotations")

    def __init__(self, gates, t_count, t_depth, ancillas, phase_exact,
                 rotations=0):
        self.gates = tuple(gates)
        self.t_count = t_count
        self.t_depth = t_depth
        self.ancillas = ancillas
        self.phase_exact = phase_exact
        self.rotations = rotations

    @property
    def declared_cost(self):
        return (self.t_count, self.t_depth, self.ancillas)


TWO_PI = 2.0 * math.pi


def canonical_ry_halves(theta):
    """Split a rotation angle into (half_angle, z_correction).

    The controlled rotation is emitted with half-angle ``h`` chosen near zero
    (theta reduced mod 2*pi toward the shorter arc); when the reduction winds
    an odd multiple of 2*pi, a Z on the control restores the exact
    controlled-Ry(theta) unitary.
    """
    k = 0
    reduced = math.fmod(theta, 2 * TWO_PI)
    if reduced < 0:
        reduced += 2 * TWO_PI
    if math.pi <= reduced < 3 * math.pi:
        k = 1
    elif reduced >= 3 * math.pi:
        k = 2
    return (reduced - TWO_PI * k) / 2.0, k % 2 == 1


def controlled_ry_gates(theta, controls, target):
    """Exact controlled-Ry(theta) over any number of positive controls."""
    h, z_fix = canonical_ry_halves(theta)
    n_ctrl = len(controls)
    if n_ctrl == 1:
        flip = Gate(GateKind.CNOT, (target,), ((controls[0], True),))
    elif n_ctrl == 2:
        flip = Gate(GateKind.TOFFOLI, (target,),
                    ((controls[0], True), (controls[1], True)))
    else:
        raise ParameterError("controlled_ry supports 1 or 2 controls")
    gates = [flip, Gate(GateKind.RY, (target,), (), -h),
             flip, Gate(GateKind.RY, (target,), (), h)]
    if z_fix:
        if n_ctrl == 1:
            gates.append(Gate(GateKind.Z, (controls[0],)))
        else:
            gates.append(Gate(GateKind.CZ, tuple(controls)))
    return gates


def controlled_ry(theta, doubly=False, controls=None, target=None):
    """Controlled-Ry fragment (flip, half-rotation, flip, half-rotation).

    For theta in [pi, 2*pi) the half-angle winds through -pi/2 and a Z (CZ
    when doubly controlled) on the control restores the exact unitary.
    """
    if not 0 <= theta < TWO_PI + 1e-12:
        raise ParameterError("theta must lie in [0, 2*pi)")
    if controls is None:
        controls = (0, 1) if doubly else (0,)
    if target is None:
        target = max(controls) + 1
    gates = controlled_ry_gates(theta, tuple(controls), target)
    return CostedFragment(gates, 0, 0, 0, phase_exact=True, rotations=2)


def _toffoli_core(c_hi, c_lo, target):
    """G-gate chain acting as a Toffoli up to a -1 phase on one basis state."""
    return [
        Gate(GateKind.GDG, (target,)),
        Gate(GateKind.CNOT, (target,), ((c_lo, True),)),
        Gate(GateKind.GDG, (target,)),
        Gate(GateKind.CNOT, (target,), ((c_hi, True),)),
        Gate(GateKind.G, (target,)),
        Gate(GateKind.CNOT, (target,), ((c_lo, True),)),
        Gate(GateKind.G, (target,)),
    ]


def toffoli_phase_incorrect(c_hi=0, c_lo=1, target=2):
    """T-depth-4, T-count-4 Toffoli, exact up to a sign on one basis state."""
    return CostedFragment(_toffoli_core(c_hi, c_lo, target), 4, 4, 0, False)


def cswap_phase_incorrect(control=0, a=1, b=2):
    """T-depth-4, T-count-4 controlled-swap, phase-incorrect."""
    gates = [Gate(GateKind.CNOT, (a,), ((b, True),))]
    gates += _toffoli_core(control, a, b)
    gates.append(Gate(GateKind.CNOT, (a,), ((b, True),)))
    return CostedFragment(gates, 4, 4, 0, False)


def multi_cswap_registers(reg_size=None, control=0, reg_a=None, reg_b=None,
                          control_positive=True):
    """Controlled-swap between two equal-size multi-qubit registers.

    Layered emission: the four G layers act across all target pairs in
    parallel and the shared control enters through a single fanout-CNOT, so
    the counted cost is (4t, 4, 0).  Phase-incorrect.
    """
    if reg_a is None or reg_b is None:
        if reg_size is None or reg_size < 1:
            raise ParameterError("reg_size must be >= 1")
        reg_a = tuple(range(1, 1 + reg_size))
        reg_b = tuple(range(1 + reg_size, 1 + 2 * reg_size))
    reg_a = tuple(reg_a)
    reg_b = tuple(reg_b)
    if len(reg_a) != len(reg_b) or not reg_a:
        raise ParameterError("registers must be equal nonempty size")
    gates = parallel_cswap_phase_incorrect_gates(
        [(control, control_positive)], tuple(zip(reg_a, reg_b)))
    t = len(reg_a)
    return CostedFragment(gates, 4 * t, 4, 0, False)


def parallel_cswap_phase_incorrect_gates(controls, pairs, layered=False):
    """Layer of phase-incorrect cswaps sharing one (polarized) control.

    Default emission is one whole controlled-swap fragment per target pair; the
    shared control enters each fragment only as a control (architecturally a
    single fanout-CNOT), so the fragments occupy a common depth-4 layer
    while the sparse-simulation support stays bounded (each G chain closes
    back to a permutation before the next pair branches).

    ``layered=True`` emits the layered form instead - per-layer G walls
    around one explicit fanout-CNOT - which pins the whole column to a
    common start in the dependency DAG; the simulation support then grows
    with 2^pairs mid-column, so it is reserved for narrow columns.
    """
    controls = tuple(controls)
    pairs = tuple(pairs)
    gates = []
    if layered:
        for a, b in pairs:
            gates.append(Gate(GateKind.CNOT, (a,), ((b, True),)))
        for _, b in pairs:
            gates.append(Gate(GateKind.GDG, (b,)))
        for a, b in pairs:
            gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
        for _, b in pairs:
            gates.append(Gate(GateKind.GDG, (b,)))
        gates.append(Gate(GateKind.FANOUT_CNOT,
                          tuple(b for _, b in pairs), controls))
        for _, b in pairs:
            gates.append(Gate(GateKind.G, (b,)))
        for a, b in pairs:
            gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
        for _, b in pairs:
            gates.append(Gate(GateKind.G, (b,)))
        for a, b in pairs:
            gates.append(Gate(GateKind.CNOT, (a,), ((b, True),)))
        return gates
    for a, b in pairs:
        gates.append(Gate(GateKind.CNOT, (a,), ((b, True),)))
        gates.append(Gate(GateKind.GDG, (b,)))
        gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
        gates.append(Gate(GateKind.GDG, (b,)))
        gates.append(Gate(GateKind.CNOT, (b,), controls))
        gates.append(Gate(GateKind.G, (b,)))
        gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
        gates.append(Gate(GateKind.G, (b,)))
        gates.append(Gate(GateKind.CNOT, (a,), ((b, True),)))
    return gates


def parallel_cswap_clean(num_pairs=None, control=0, pairs=None, ancillas=None,
                         control_positive=True):
    """Phase-correct parallel controlled-swap macro (CNOT-conjugated
    Toffolis with a fanned-out control copy).

    Cost (4k, 1, 2k): one copy ancilla plus one Toffoli ancilla per pair.
    When explicit ``ancillas`` (the copy qubits) are supplied from a pool
    register the macro declares only the k Toffoli scratch qubits; with a
    full 2k-qubit pool it declares zero.
    """
    if pairs is None:
        if num_pairs is None or num_pairs < 1:
            raise ParameterError("num_pairs must be >= 1")
        pairs = tuple((1 + 2 * i, 2 + 2 * i) for i in range(num_pairs))
    pairs = tuple(pairs)
    k = len(pairs)
    if ancillas is None:
        base = max((control,) + tuple(q for p in pairs for q in p)) + 1
        copies = tuple(range(base, base + k))
        extra = 2 * k
    else:
        ancillas = tuple(ancillas)
        if len(ancillas) >= 2 * k:
            copies = ancillas[:k]
            extra = 0
        elif len(ancillas) >= k:
            copies = ancillas[:k]
            extra = k
        else:
            raise ParameterError("need at least k ancillas")
    ctrl = ((control, control_positive),)
    gates = [Gate(GateKind.FANOUT_CNOT, copies, ctrl)]
    for a, b in pairs:
        gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
    for (a, b), cp in zip(pairs, copies):
        gates.append(Gate(GateKind.TOFFOLI, (a,), ((b, True), (cp, True))))
    for a, b in pairs:
        gates.append(Gate(GateKind.CNOT, (b,), ((a, True),)))
    gates.append(Gate(GateKind.FANOUT_CNOT, copies, ctrl))
    return Macro(MacroKind.PARALLEL_CSWAP_CLEAN, {"k": k}, gates,
                 t_count=4 * k, t_depth=1, extra_ancillas=extra)


def and_toffoli(c1, c2, target, ancilla=None):
    """Measurement-assisted Toffoli macro: T-count 4, T-depth 1.

    The expansion is a plain Toffoli (the exact measurement-free unitary);
    the jones-style scratch qubit is declared unless supplied explicitly.
    """
    gates = [Gate(GateKind.TOFFOLI, (target,), ((c1, True), (c2, True)))]
    extra = 1 if ancilla is None else 0
    return Macro(MacroKind.AND_TOFFOLI, {}, gates, 4, 1, extra)


def _match_controls(select_qubits, value):
    s = len(select_qubits)
    return tuple((q, bool((value >> (s - 1 - i)) & 1))
                 for i, q in enumerate(select_qubits))


def unary_select(s=None, write_rows=None, select_qubits=None, ancillas=None,
                 footprint=()):
    """Unary-iteration select macro writing one classical row per address.

    ``write_rows[j]`` lists the fanout target qubits for select value j.
    Cost is the unary iteration model: T-count = T-depth = 4*(2^s - 1) with
    s - 1 scratch ancillas.  The expansion computes an address-match flag
    with a mixed-polarity MCX, fanout-writes the row, and uncomputes; for
    s = 1 the polarized select bit drives the fanout directly.
    """
    if select_qubits is None:
        if s is None or s < 1:
            raise ParameterError("s must be >= 1")
        select_qubits = tuple(range(s))
    select_qubits = tuple(select_qubits)
    s = len(select_qubits)
    if s < 1:
        raise ParameterError("s must be >= 1")
    rows = 1 << s
    if write_rows is None:
        write_rows = [() for _ in range(rows)]
    if len(write_rows) != rows:
        raise ParameterError(f"write_rows must have 2^{s} entries")
    gates = []
    if s == 1:
        extra = 0
        for j in range(2):
            targets = tuple(write_rows[j])
            if targets:
                gates.append(Gate(GateKind.FANOUT_CNOT, targets,
                                  ((select_qubits[0], bool(j)),)))
    else:
        if ancillas:
            flag = tuple(ancillas)[0]
            extra = 0
        else:
            base = max(select_qubits + tuple(q for row in write_rows for q in row),
                       default=0) + 1
            flag = base
            extra = s - 1
        for j in range(rows):
            mcx = Gate(GateKind.MCX, (flag,), _match_controls(select_qubits, j))
            gates.append(mcx)
            targets = tuple(write_rows[j])
            if targets:
                gates.append(Gate(GateKind.FANOUT_CNOT, targets, ((flag, True),)))
            gates.append(mcx)
    return Macro(MacroKind.UNARY_SELECT, {"s": s}, gates,
                 t_count=4 * (rows - 1), t_depth=4 * (rows - 1),
                 extra_ancillas=extra, footprint=footprint)


def unary_step(select_qubits, from_value, to_value, flag):
    """One walk step of unary iteration: uncompute flag(j), compute flag(j+1).

    Carries the amortized cost (4, 4, 0); the 2^s - 1 steps of a full loop
    reproduce the 4*(2^s - 1) model.
    """
    select_qubits = tuple(select_qubits)
    gates = [
        Gate(GateKind.MCX, (flag,), _match_controls(select_qubits, from_value)),
        Gate(GateKind.MCX, (flag,), _match_controls(select_qubits, to_value)),
    ]
    return Macro(MacroKind.UNARY_STEP,
                 {"from": from_value, "to": to_value}, gates, 4, 4, 0)


def ry_synthesis_cost(delta) -> int:
    """Leading-order T-count of synthesizing one Ry rotation to error delta."""
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    return math.ceil(3 * math.log2(1.0 / delta))
