"""Symbolic gates and their lowering to laser pulses.

The machine knows rotations, controlled-not gates of one, two and many
controls, the controlled phase, the two Grover building blocks (the
single-bit Fourier transform and the inversion-about-zero transform), and
three measurement-flavoured operations (set/clear a bit, retire-and-reuse
a qubit).

3-state lowering produces the literal pulse sequences:

* CNot(m, n)   -> V_n(pi/2,-pi/2), U_m(pi,0), U^_n(2pi,0), U_m(pi,0),
                  V_n(pi/2,pi/2)                          (5 pulses)
* CPhase(m, n) -> U_m(pi,0), U^_n(2pi,0), U_m(pi,0)       (3 pulses)
* CCNot(l,m,n) -> the CNot dressing around U_l(pi,0),
                  [U^_m, U^_n, U^_n, U^_m](pi,0), U_l(pi,0)
* MultiNot     -> same nesting continued over extra controls
* Fourier(q)   -> V_q(pi/2,-pi/2), U_q(2pi,0)
* GroverR      -> U_s(pi,0), U~ absorb pass, U^_last(2pi,0),
                  U~ release pass with negative angle, U_s(pi,0)
                  (2L+1 pulses for L search qubits)

2-state lowering keeps V/U pulses as-is and replaces each rotation through
the auxiliary level by a single-pass paired rotation.  Consecutive
rotations of one pair collapse into one rotation by their summed ideal
angle carrying a combined error angle; dispatch within a pulse group is
exclusive (each state element is affected by at most one pair).

Decay bookkeeping inside a group mirrors the 3-state pulse timeline:
amplitude captured by a pair sits in the auxiliary level (phonon 0)
between its absorb and release slots and is sheltered from phonon decay
for exactly those slots.  Zero-error runs of the two models therefore
decay identically, element by element.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import pi

import numpy as np

from . import statespace
from .errors import (DEC_NONE, DecMethod, DecoherenceConfig, ERR_NONE,
                     ErrorConfig, ErrorMode, TrialStreams,
                     decoherence_after_pulse, draw_error_angles, renormalize)
from .pulse import PulseKind, PulseSpec, apply_paired_rotation, apply_pulse
from .statespace import ContractViolation, ModelKind, QuantumState


class GateKind(Enum):
    ROTATION = "rotation"
    CNOT = "cnot"
    CPHASE = "cphase"
    CCNOT = "ccnot"
    MULTI_NOT = "multinot"
    FOURIER = "fourier"
    GROVER_R = "grover_r"
    SET_BIT = "setbit"
    CLEAR_BIT = "clearbit"
    REUSE_RENORM = "reuse"


LOGIC_KINDS = frozenset({GateKind.CNOT, GateKind.CPHASE, GateKind.CCNOT,
                         GateKind.MULTI_NOT, GateKind.SET_BIT,
                         GateKind.CLEAR_BIT})

#: conditional bit flip used by set/clear, phase convention fixed here
FLIP_PHI = -pi / 2


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ContractViolation(f"gate qubits must be distinct: {self.qubits}")

    @property
    def is_logic(self) -> bool:
        return self.kind in LOGIC_KINDS

    # constructors ----------------------------------------------------------

    @staticmethod
    def rotation(q: int, theta: float, phi: float) -> "Gate":
        return Gate(GateKind.ROTATION, (q,), theta, phi)

    @staticmethod
    def x(q: int) -> "Gate":
        """Bit flip realized as V(pi, pi/2): |g> -> |e0> with no phase."""
        return Gate(GateKind.ROTATION, (q,), pi, pi / 2)

    @staticmethod
    def x_inverse(q: int) -> "Gate":
        """Exact inverse of :meth:`x`; used to undo basis dressing."""
        return Gate(GateKind.ROTATION, (q,), -pi, pi / 2)

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate(GateKind.CNOT, (control, target))

    @staticmethod
    def cphase(m: int, n: int) -> "Gate":
        return Gate(GateKind.CPHASE, (m, n))

    @staticmethod
    def ccnot(c1: int, c2: int, target: int) -> "Gate":
        return Gate(GateKind.CCNOT, (c1, c2, target))

    @staticmethod
    def multi_not(controls, target: int) -> "Gate":
        controls = tuple(controls)
        if len(controls) == 1:
            return Gate.cnot(controls[0], target)
        if len(controls) == 2:
            return Gate.ccnot(controls[0], controls[1], target)
        return Gate(GateKind.MULTI_NOT, controls + (target,))

    @staticmethod
    def fourier(q: int) -> "Gate":
        return Gate(GateKind.FOURIER, (q,))

    @staticmethod
    def grover_r(l_qubits, s: int) -> "Gate":
        return Gate(GateKind.GROVER_R, tuple(l_qubits) + (s,))

    @staticmethod
    def set_bit(q: int) -> "Gate":
        return Gate(GateKind.SET_BIT, (q,))

    @staticmethod
    def clear_bit(q: int) -> "Gate":
        return Gate(GateKind.CLEAR_BIT, (q,))

    @staticmethod
    def reuse_renorm(q: int) -> "Gate":
        return Gate(GateKind.REUSE_RENORM, (q,))


class CombineMethod(Enum):
    SIMPLE = "simple"
    MIXED = "mixed"


def combine_error_angles(delta_first: float, delta_second: float,
                         method: CombineMethod, gate_is_logic: bool,
                         intra_cancels: bool) -> float:
    """Collapse the two error angles of a replaced pulse pair into one.

    The simple method always takes the difference, crediting both intra-
    and inter-gate cancellation.  The mixed method keeps the difference for
    logic gates and for pairs whose pulse pattern cancels internally, and
    adds the angles otherwise.
    """
    if method is CombineMethod.SIMPLE or gate_is_logic or intra_cancels:
        return delta_first - delta_second
    return delta_first + delta_second


# -- lowered operation types -------------------------------------------------


@dataclass(frozen=True)
class PairEntry:
    """One replaced rotation through the auxiliary level.

    ``slots`` are the positions of the replaced pulses inside their group's
    3-state timeline (one slot for a single 2pi pulse, two for a pi pair).
    ``trigger_digit`` selects which qubit level couples: 0 for a U^ pair,
    1 for a U~ pair; the trigger phonon is always 1.
    """

    qubit: int
    trigger_digit: int
    total_theta: float
    phi: float
    slots: tuple[int, ...]
    intra_cancels: bool = False

    @property
    def pulse_kind(self) -> PulseKind:
        return PulseKind.U_HAT if self.trigger_digit == 0 else PulseKind.U_TILDE


@dataclass(frozen=True)
class PairedGroup:
    """A maximal run of auxiliary-level pulses executed in one pass."""

    entries: tuple[PairEntry, ...]
    num_slots: int


# -- lowerings ---------------------------------------------------------------


def _cnot_like_pulses(controls: tuple[int, ...], target: int) -> list[PulseSpec]:
    """Shared pulse skeleton of CNot / CCNot / MultiNot (3-state)."""
    c1, rest = controls[0], controls[1:]
    seq = [PulseSpec(PulseKind.V, target, pi / 2, -pi / 2),
           PulseSpec(PulseKind.U, c1, pi, 0.0)]
    if not rest:
        seq.append(PulseSpec(PulseKind.U_HAT, target, 2 * pi, 0.0))
    else:
        seq += [PulseSpec(PulseKind.U_HAT, c, pi, 0.0) for c in rest]
        seq += [PulseSpec(PulseKind.U_HAT, target, pi, 0.0)] * 2
        seq += [PulseSpec(PulseKind.U_HAT, c, pi, 0.0) for c in reversed(rest)]
    seq += [PulseSpec(PulseKind.U, c1, pi, 0.0),
            PulseSpec(PulseKind.V, target, pi / 2, pi / 2)]
    return seq


def _grover_r_pulses(l_qubits: tuple[int, ...], s: int) -> list[PulseSpec]:
    body = l_qubits[:-1]
    seq = [PulseSpec(PulseKind.U, s, pi, 0.0)]
    seq += [PulseSpec(PulseKind.U_TILDE, q, pi, 0.0) for q in body]
    seq.append(PulseSpec(PulseKind.U_HAT, l_qubits[-1], 2 * pi, 0.0))
    seq += [PulseSpec(PulseKind.U_TILDE, q, -pi, 0.0) for q in reversed(body)]
    seq.append(PulseSpec(PulseKind.U, s, pi, 0.0))
    return seq


def _nested_group(controls: tuple[int, ...], target: int) -> PairedGroup:
    """The auxiliary core of CCNot/MultiNot as one dispatch group."""
    rest = controls[1:]
    k = len(rest)
    num = 2 * k + 2
    entries = []
    for j, c in enumerate(rest):
        entries.append(PairEntry(c, 0, 2 * pi, 0.0, (j, num - 1 - j),
                                 intra_cancels=True))
    entries.append(PairEntry(target, 0, 2 * pi, 0.0, (k, k + 1),
                             intra_cancels=False))
    return PairedGroup(tuple(entries), num)


@lru_cache(maxsize=None)
def lower_gate_threestate(gate: Gate) -> tuple[PulseSpec, ...]:
    """Pulse sequence of a unitary gate, in application order, errors zeroed."""
    if gate.kind is GateKind.ROTATION:
        return (PulseSpec(PulseKind.V, gate.qubits[0], gate.theta, gate.phi),)
    if gate.kind is GateKind.CNOT:
        return tuple(_cnot_like_pulses(gate.qubits[:1], gate.qubits[1]))
    if gate.kind is GateKind.CPHASE:
        m, n = gate.qubits
        return (PulseSpec(PulseKind.U, m, pi, 0.0),
                PulseSpec(PulseKind.U_HAT, n, 2 * pi, 0.0),
                PulseSpec(PulseKind.U, m, pi, 0.0))
    if gate.kind in (GateKind.CCNOT, GateKind.MULTI_NOT):
        return tuple(_cnot_like_pulses(gate.qubits[:-1], gate.qubits[-1]))
    if gate.kind is GateKind.FOURIER:
        q = gate.qubits[0]
        return (PulseSpec(PulseKind.V, q, pi / 2, -pi / 2),
                PulseSpec(PulseKind.U, q, 2 * pi, 0.0))
    if gate.kind is GateKind.GROVER_R:
        return tuple(_grover_r_pulses(gate.qubits[:-1], gate.qubits[-1]))
    raise ContractViolation(
        f"{gate.kind.value} is not a pure pulse sequence; apply_gate handles it")


@lru_cache(maxsize=None)
def lower_gate_twostate(gate: Gate):
    """Mixed sequence of direct pulses and paired-rotation groups."""
    if gate.kind in (GateKind.ROTATION, GateKind.FOURIER):
        return lower_gate_threestate(gate)
    if gate.kind is GateKind.CNOT:
        m, n = gate.qubits
        group = PairedGroup((PairEntry(n, 0, 2 * pi, 0.0, (0,)),), 1)
        return (PulseSpec(PulseKind.V, n, pi / 2, -pi / 2),
                PulseSpec(PulseKind.U, m, pi, 0.0), group,
                PulseSpec(PulseKind.U, m, pi, 0.0),
                PulseSpec(PulseKind.V, n, pi / 2, pi / 2))
    if gate.kind is GateKind.CPHASE:
        m, n = gate.qubits
        group = PairedGroup((PairEntry(n, 0, 2 * pi, 0.0, (0,)),), 1)
        return (PulseSpec(PulseKind.U, m, pi, 0.0), group,
                PulseSpec(PulseKind.U, m, pi, 0.0))
    if gate.kind in (GateKind.CCNOT, GateKind.MULTI_NOT):
        controls, target = gate.qubits[:-1], gate.qubits[-1]
        group = _nested_group(controls, target)
        return (PulseSpec(PulseKind.V, target, pi / 2, -pi / 2),
                PulseSpec(PulseKind.U, controls[0], pi, 0.0), group,
                PulseSpec(PulseKind.U, controls[0], pi, 0.0),
                PulseSpec(PulseKind.V, target, pi / 2, pi / 2))
    if gate.kind is GateKind.GROVER_R:
        l_qubits, s = gate.qubits[:-1], gate.qubits[-1]
        body = l_qubits[:-1]
        num = 2 * len(l_qubits) - 1
        entries = []
        for j, q in enumerate(body):
            entries.append(PairEntry(q, 1, 0.0, 0.0, (j, num - 1 - j),
                                     intra_cancels=False))
        entries.append(PairEntry(l_qubits[-1], 0, 2 * pi, 0.0,
                                 (len(body),), intra_cancels=False))
        group = PairedGroup(tuple(entries), num)
        return (PulseSpec(PulseKind.U, s, pi, 0.0), group,
                PulseSpec(PulseKind.U, s, pi, 0.0))
    raise ContractViolation(
        f"{gate.kind.value} is not a pure pulse sequence; apply_gate handles it")


def gate_pulse_count(gate: Gate) -> int:
    """Laser pulses one gate costs (the conditional flip counted once)."""
    if gate.kind in (GateKind.SET_BIT, GateKind.CLEAR_BIT,
                     GateKind.REUSE_RENORM):
        return 1
    return len(lower_gate_threestate(gate))


# -- execution ---------------------------------------------------------------


def _dispatch_masks(state: QuantumState, group: PairedGroup) -> list[np.ndarray]:
    """Exclusive per-entry configuration masks (first matching pair fires)."""
    remaining = np.ones(state.num_configs, dtype=bool)
    masks = []
    for entry in group.entries:
        fire = remaining & (state.config_bits(entry.qubit) == entry.trigger_digit)
        masks.append(fire)
        remaining &= ~fire
    return masks


def _shelter_intervals(state: QuantumState, group: PairedGroup,
                       masks: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Per-configuration [absorb, release) slot interval spent in ``e1``.

    Amplitude captured by a pulse pair sits in the auxiliary level (phonon
    0) between the pair's two slots; configurations outside any fired pair
    get an empty interval.
    """
    absorb = np.full(state.num_configs, group.num_slots, dtype=np.int64)
    release = np.full(state.num_configs, group.num_slots, dtype=np.int64)
    for entry, mask in zip(group.entries, masks):
        if len(entry.slots) == 2:
            absorb[mask] = entry.slots[0]
            release[mask] = entry.slots[1]
    return absorb, release


def _group_decoherence(state: QuantumState, group: PairedGroup,
                       masks: list[np.ndarray], dec_cfg: DecoherenceConfig,
                       rng: TrialStreams) -> None:
    """Decoherence for a group's slots with per-element sheltering.

    The phonon-1 slice of the main plane decays once per slot except while
    sheltered in ``e1``; the auxiliary plane decays by its stored phonon
    digit every slot.  The decay method applies the per-element exponents
    in one shot and so reproduces the 3-state pulse timeline exactly.  The
    spontaneous-emission method walks the slots one by one, rolling each
    emission against the phonon probability the 3-state model would see at
    that point; a jump destroys sheltered amplitude along with the rest of
    the phonon-0 content, quantum-jump style.
    """
    dec = dec_cfg.dec
    absorb, release = _shelter_intervals(state, group, masks)
    view = state.cfg_view()
    if dec_cfg.method is DecMethod.DECAY:
        if dec == 0.0:
            return
        weights = group.num_slots - (release - absorb)
        view[0, :, 1] *= np.exp(-dec / 2.0 * weights)
        view[1, :, 1] *= np.exp(-dec / 2.0 * group.num_slots)
        return
    factor = np.exp(-dec / 2.0)
    for slot in range(group.num_slots):
        exposed = (slot < absorb) | (slot >= release)
        view[0, exposed, 1] *= factor
        view[1, :, 1] *= factor
        renormalize(state)
        main_ph1 = view[0, exposed, 1]
        aux_ph1 = view[1, :, 1]
        p_phonon = float(np.vdot(main_ph1, main_ph1).real
                         + np.vdot(aux_ph1, aux_ph1).real)
        if rng.emit.uniform() < dec * p_phonon:
            view[0, :, 0] = np.where(exposed, view[0, :, 1], 0.0)
            view[0, :, 1] = 0.0
            view[1, :, 0] = view[1, :, 1]
            view[1, :, 1] = 0.0
            renormalize(state)


def _apply_group(state: QuantumState, gate: Gate, group: PairedGroup,
                 err_cfg: ErrorConfig, combine: CombineMethod,
                 rng: TrialStreams, dec_cfg: DecoherenceConfig) -> None:
    if err_cfg.mode is ErrorMode.NONE:
        draws = [(0.0, 0.0)] * group.num_slots
    else:
        draws = [draw_error_angles(err_cfg, rng.op)
                 for _ in range(group.num_slots)]
    masks = _dispatch_masks(state, group)
    for entry, mask in zip(group.entries, masks):
        if len(entry.slots) == 1:
            dth, dph = draws[entry.slots[0]]
        else:
            a, b = entry.slots
            dth = combine_error_angles(draws[a][0], draws[b][0], combine,
                                       gate.is_logic, entry.intra_cancels)
            dph = combine_error_angles(draws[a][1], draws[b][1], combine,
                                       gate.is_logic, entry.intra_cancels)
        if not mask.any():
            continue
        apply_paired_rotation(state, entry.qubit, entry.total_theta, dth,
                              entry.phi, dph, kind=entry.pulse_kind,
                              config_mask=mask)
    if dec_cfg.method is not DecMethod.NONE:
        _group_decoherence(state, group, masks, dec_cfg, rng)


def _apply_errored_pulse(state: QuantumState, spec: PulseSpec,
                         err_cfg: ErrorConfig, rng: TrialStreams,
                         dec_cfg: DecoherenceConfig) -> None:
    dth, dph = draw_error_angles(err_cfg, rng.op)
    apply_pulse(state, spec.with_errors(dth, dph))
    decoherence_after_pulse(state, dec_cfg, rng.emit)


def apply_gate(state: QuantumState, gate: Gate,
               err_cfg: ErrorConfig = ERR_NONE,
               combine: CombineMethod = CombineMethod.SIMPLE,
               rng: TrialStreams | None = None,
               dec_cfg: DecoherenceConfig = DEC_NONE,
               reuse_reference: np.ndarray | None = None):
    """Execute one gate: draw fresh pulse errors, apply, decohere.

    Measurement-flavoured gates consume the measurement stream; their
    conditional flip is an ordinary pulse with its own error draws.  For a
    REUSE_RENORM gate the caller passes the zero-error support mask
    captured at the same point of the reference run (``reuse_reference``);
    when it is omitted the gate acts as its own reference and the captured
    support mask is returned.
    """
    if rng is None:
        rng = TrialStreams(0)
    if gate.kind in (GateKind.SET_BIT, GateKind.CLEAR_BIT):
        want = 1 if gate.kind is GateKind.SET_BIT else 0
        outcome = statespace.measure_qubit(state, gate.qubits[0], rng.measure)
        if outcome != want:
            flip = PulseSpec(PulseKind.V, gate.qubits[0], pi, FLIP_PHI)
            _apply_errored_pulse(state, flip, err_cfg, rng, dec_cfg)
        return None
    if gate.kind is GateKind.REUSE_RENORM:
        q = gate.qubits[0]
        undo = PulseSpec(PulseKind.V, q, pi / 2, -pi / 2)
        _apply_errored_pulse(state, undo, err_cfg, rng, dec_cfg)
        pre_norm = statespace.squared_norm(state)
        statespace.clear_excited(state, q)
        if reuse_reference is None:
            return statespace.support_mask(state)
        statespace.rescale_error_amplitudes(state, reuse_reference,
                                            target=pre_norm)
        return None
    if state.model is ModelKind.THREE_STATE:
        for spec in lower_gate_threestate(gate):
            _apply_errored_pulse(state, spec, err_cfg, rng, dec_cfg)
        return None
    for op in lower_gate_twostate(gate):
        if isinstance(op, PairedGroup):
            _apply_group(state, gate, op, err_cfg, combine, rng, dec_cfg)
        else:
            _apply_errored_pulse(state, op, err_cfg, rng, dec_cfg)
    return None
