"""Laser-pulse transformations.

Every operation of the simulated machine is a sequence of laser pulses.  A
pulse rotates one pair of levels of one ion; the pair is selected by the
laser tuning:

* ``V``       couples ``|g> <-> |e0>`` on the addressed qubit alone,
* ``U``       couples ``|e0>|0>_p <-> |g>|1>_p`` (qubit and phonon),
* ``U_HAT``   couples ``|e1>|0>_p <-> |g>|1>_p``,
* ``U_TILDE`` couples ``|e1>|0>_p <-> |e0>|1>_p``.

The rotation itself is always the same 2x2 block

    [[cos(t/2), -i e^{-i phi} sin(t/2)],
     [-i e^{i phi} sin(t/2), cos(t/2)]]

acting on the coupled pair; everything else is untouched.  For the U kinds
the 4x4 form over the basis (a|0>_p, a|1>_p, b|0>_p, b|1>_p) -- a the lower
of the two coupled ion levels -- embeds that block on the middle pair
(a|1>_p, b|0>_p) inside an identity.

Operational errors enter as additive perturbations of both angles: the
pulse executes with theta + dtheta and phi + dphi.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .statespace import ContractViolation, ModelKind, QuantumState


class PulseKind(Enum):
    V = "V"
    U = "U"
    U_HAT = "U^"
    U_TILDE = "U~"


#: coupled ion levels (lower, upper) per kind, digits g=0, e0=1, e1=2
COUPLED_LEVELS = {
    PulseKind.V: (0, 1),
    PulseKind.U: (0, 1),
    PulseKind.U_HAT: (0, 2),
    PulseKind.U_TILDE: (1, 2),
}


@dataclass(frozen=True)
class PulseSpec:
    """One laser pulse: ideal angles plus injected error angles."""

    kind: PulseKind
    qubit: int
    theta: float
    phi: float
    dtheta: float = 0.0
    dphi: float = 0.0

    def with_errors(self, dtheta: float, dphi: float) -> "PulseSpec":
        return PulseSpec(self.kind, self.qubit, self.theta, self.phi,
                         dtheta, dphi)


def rotation_block(theta: float, phi: float) -> np.ndarray:
    """The 2x2 rotation shared by every pulse kind."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    return np.array(
        [[c, -1j * np.exp(-1j * phi) * s],
         [-1j * np.exp(1j * phi) * s, c]], dtype=np.complex128)


def pulse_matrix(kind: PulseKind, theta: float, phi: float) -> np.ndarray:
    """2x2 matrix for V, 4x4 for the U kinds (identity corners)."""
    block = rotation_block(theta, phi)
    if kind is PulseKind.V:
        return block
    mat = np.eye(4, dtype=np.complex128)
    mat[1:3, 1:3] = block
    return mat


def _rotate_pair(x: np.ndarray, y: np.ndarray, block: np.ndarray) -> None:
    """In-place 2x2 rotation of two equally shaped amplitude slices."""
    new_x = block[0, 0] * x + block[0, 1] * y
    y[...] = block[1, 0] * x + block[1, 1] * y
    x[...] = new_x


def apply_pulse(state: QuantumState, spec: PulseSpec) -> None:
    """Apply one pulse in place using its effective (error-shifted) angles.

    The 3-state model supports every kind.  The 2-state model supports the
    kinds it can represent directly (V and U); rotations through the
    auxiliary level must go through :func:`apply_paired_rotation` instead.
    """
    block = rotation_block(spec.theta + spec.dtheta, spec.phi + spec.dphi)
    view = state.digit_view(spec.qubit)
    if state.model is ModelKind.THREE_STATE:
        a, b = COUPLED_LEVELS[spec.kind]
        if spec.kind is PulseKind.V:
            _rotate_pair(view[:, 0], view[:, 1], block)
        else:
            _rotate_pair(view[:, a, :, 1], view[:, b, :, 0], block)
        return
    if spec.kind is PulseKind.V:
        _rotate_pair(view[0, :, 0], view[0, :, 1], block)
    elif spec.kind is PulseKind.U:
        _rotate_pair(view[0, :, 0, :, 1], view[0, :, 1, :, 0], block)
    else:
        raise ContractViolation(
            f"{spec.kind.value} pulses have no direct 2-state form; use a "
            "paired rotation")


def apply_paired_rotation(state: QuantumState, qubit: int,
                          total_theta: float, delta_theta: float,
                          phi: float = 0.0, delta_phi: float = 0.0,
                          kind: PulseKind = PulseKind.U_HAT,
                          trigger: tuple[int, int] | None = None,
                          config_mask: np.ndarray | None = None) -> None:
    """Single-pass 2-state replacement for a rotation through ``e1``.

    Main-plane elements matching the trigger (qubit digit, phonon bit) are
    rotated against their same-index auxiliary-plane partner by the angle
    ``total_theta + delta_theta`` (the summed ideal angle of the replaced
    pulse or pulse pair plus the combined error angle).  Leakage accumulates
    in the auxiliary plane and is only ever touched again by later paired
    rotations on the same index.  ``config_mask`` restricts the matched
    configurations; gate lowerings use it to keep the pairs of one pulse
    group disjoint.
    """
    if state.model is not ModelKind.TWO_STATE:
        raise ContractViolation("paired rotations are a 2-state operation")
    if kind in (PulseKind.V, PulseKind.U):
        raise ContractViolation("only auxiliary-level kinds are replaced by "
                                "paired rotations")
    trig_digit = 0 if kind is PulseKind.U_HAT else 1
    trig_phonon = 1
    if trigger is not None:
        trig_digit, trig_phonon = trigger
    block = rotation_block(total_theta + delta_theta, phi + delta_phi)
    view = state.digit_view(qubit)
    main = view[0, :, trig_digit, :, trig_phonon]
    aux = view[1, :, trig_digit, :, trig_phonon]
    if config_mask is None:
        _rotate_pair(main, aux, block)
        return
    m = state.num_qubits
    mview = config_mask.reshape(2 ** (m - qubit - 1), 2, 2**qubit)[:, trig_digit, :]
    x = main[mview]
    y = aux[mview]
    main[mview] = block[0, 0] * x + block[0, 1] * y
    aux[mview] = block[1, 0] * x + block[1, 1] * y
