"""Complex state-vector storage for the two ion-trap simulation models.

Two representations of an M-qubit ion chain share one interface:

* 3-state model -- every qubit is a full three-level ion (ground ``g``,
  excited ``e0``, auxiliary ``e1``) plus the shared phonon bit, giving
  ``2 * 3**M`` complex amplitudes.
* 2-state model -- qubits keep only ``g``/``e0`` and a single auxiliary
  amplitude plane is shared by all qubits, giving ``2**(M+2)`` amplitudes
  (``2**M`` qubit configurations x 2 phonon values x {main, aux} planes).

Index layout (fixed by this package, see the digit helpers below):

* qubit 0 is the least-significant digit of the configuration index,
* the phonon bit occupies the lowest position so the phonon-paired
  amplitudes of one configuration sit next to each other,
* in the 2-state model the auxiliary plane is the highest index bit.

3-state position: ``(sum_q digit_q * 3**q) * 2 + phonon`` with digits
g=0, e0=1, e1=2.  2-state position:
``plane * 2**(M+1) + (sum_q bit_q * 2**q) * 2 + phonon``.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_MEM_CAP_BYTES = 4 * 1024**3
MEM_CAP_ENV = "IONSIM_MEM_CAP_BYTES"

NORM_TOL = 1e-9
RENORM_TOL = 1e-12

_AMP_BYTES = 16  # complex128


class CapacityError(Exception):
    """Requested state exceeds the configured memory cap."""


class ContractViolation(Exception):
    """An operation was called outside its documented contract."""


class DegenerateStateError(Exception):
    """State norm is (numerically) zero where a nonzero norm is required."""


class ModelKind(Enum):
    THREE_STATE = "3state"
    TWO_STATE = "2state"


def storage_length(model: ModelKind, num_qubits: int) -> int:
    """Number of complex amplitudes a state of this model and size holds."""
    if num_qubits < 1:
        raise ContractViolation(f"num_qubits must be >= 1, got {num_qubits}")
    if model is ModelKind.THREE_STATE:
        return 2 * 3**num_qubits
    return 2 ** (num_qubits + 2)


def memory_cap_bytes() -> int:
    raw = os.environ.get(MEM_CAP_ENV)
    if raw is None:
        return DEFAULT_MEM_CAP_BYTES
    return int(raw)


@dataclass
class QuantumState:
    """Amplitudes plus layout metadata for one simulated register file.

    ``registers`` maps register names to qubit index ranges; it is carried
    along for marginals and reporting but never constrains operations.
    """

    model: ModelKind
    num_qubits: int
    amps: np.ndarray
    registers: dict[str, range] = field(default_factory=dict)

    def copy(self) -> "QuantumState":
        return QuantumState(self.model, self.num_qubits, self.amps.copy(),
                            dict(self.registers))

    @property
    def num_configs(self) -> int:
        if self.model is ModelKind.THREE_STATE:
            return 3**self.num_qubits
        return 2**self.num_qubits

    # -- internal views ----------------------------------------------------

    def cfg_view(self) -> np.ndarray:
        """(configs, phonon) view; 2-state gets (plane, configs, phonon)."""
        if self.model is ModelKind.THREE_STATE:
            return self.amps.reshape(3**self.num_qubits, 2)
        return self.amps.reshape(2, 2**self.num_qubits, 2)

    def digit_view(self, qubit: int) -> np.ndarray:
        """View split along one qubit's digit.

        3-state shape: (high, 3, low, phonon); 2-state shape:
        (plane, high, 2, low, phonon).  Axis holding the digit lets pulse
        kernels slice coupled levels without building index arrays.
        """
        m = self.num_qubits
        if not 0 <= qubit < m:
            raise ContractViolation(f"qubit {qubit} out of range for M={m}")
        if self.model is ModelKind.THREE_STATE:
            return self.amps.reshape(3 ** (m - qubit - 1), 3, 3**qubit, 2)
        return self.amps.reshape(2, 2 ** (m - qubit - 1), 2, 2**qubit, 2)

    def config_bits(self, qubit: int) -> np.ndarray:
        """Per-configuration digit of one qubit (2-state only), shape (2**M,)."""
        if self.model is not ModelKind.TWO_STATE:
            raise ContractViolation("config_bits is a 2-state helper")
        idx = np.arange(2**self.num_qubits)
        return (idx >> qubit) & 1


def new_state(model: ModelKind, num_qubits: int, initial_bits: int = 0,
              registers: dict[str, range] | None = None) -> QuantumState:
    """Basis state with qubit digits set from ``initial_bits``, phonon 0.

    Bit j of ``initial_bits`` becomes qubit j's digit (g for 0, e0 for 1).
    """
    length = storage_length(model, num_qubits)
    if length * _AMP_BYTES > memory_cap_bytes():
        raise CapacityError(
            f"state of {length} amplitudes ({length * _AMP_BYTES} bytes) exceeds "
            f"memory cap {memory_cap_bytes()} bytes")
    if initial_bits < 0 or initial_bits >= 2**num_qubits:
        raise ContractViolation(
            f"initial_bits {initial_bits} does not fit in {num_qubits} qubits")
    amps = np.zeros(length, dtype=np.complex128)
    if model is ModelKind.THREE_STATE:
        cfg = 0
        for q in range(num_qubits):
            if (initial_bits >> q) & 1:
                cfg += 3**q
        amps[cfg * 2] = 1.0
    else:
        amps[initial_bits * 2] = 1.0
    return QuantumState(model, num_qubits, amps, dict(registers or {}))


def _check_compatible(a: QuantumState, b: QuantumState) -> None:
    if a.model is not b.model or a.num_qubits != b.num_qubits:
        raise ContractViolation(
            f"state mismatch: {a.model.value}/M={a.num_qubits} vs "
            f"{b.model.value}/M={b.num_qubits}")


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> over every stored amplitude (aux plane included)."""
    _check_compatible(a, b)
    return complex(np.vdot(a.amps, b.amps))


def squared_norm(state: QuantumState) -> float:
    """Sum of |amp|^2; equals the survival probability under the decay method."""
    n = np.vdot(state.amps, state.amps).real
    return float(n)


def renormalize(state: QuantumState) -> float:
    """Scale the state back to unit norm; returns the factor applied."""
    n = squared_norm(state)
    if n <= 0.0:
        raise DegenerateStateError("cannot renormalize a zero state")
    factor = 1.0 / np.sqrt(n)
    state.amps *= factor
    return float(factor)


def _qubit_probabilities(state: QuantumState, qubit: int) -> tuple[float, float]:
    view = state.digit_view(qubit)
    if state.model is ModelKind.THREE_STATE:
        aux = view[:, 2]
        if aux.size and np.abs(aux).max() > NORM_TOL:
            raise ContractViolation(
                f"qubit {qubit} carries auxiliary amplitude; measurement is "
                "defined on the computational pair only")
        p0 = float(np.vdot(view[:, 0], view[:, 0]).real)
        p1 = float(np.vdot(view[:, 1], view[:, 1]).real)
    else:
        p0 = float(np.vdot(view[:, :, 0], view[:, :, 0]).real)
        p1 = float(np.vdot(view[:, :, 1], view[:, :, 1]).real)
    return p0, p1


def measure_qubit(state: QuantumState, qubit: int, rng) -> int:
    """Projective measurement of one qubit.

    The outcome is drawn with Born probabilities; amplitudes inconsistent
    with it are zeroed and the state is rescaled back to its pre-measurement
    norm (unit norm stays unit norm, a decayed norm keeps its survival
    meaning).
    """
    p0, p1 = _qubit_probabilities(state, qubit)
    total = p0 + p1
    if total <= 0.0:
        raise DegenerateStateError("cannot measure a zero state")
    outcome = 1 if rng.uniform() < p1 / total else 0
    view = state.digit_view(qubit)
    if state.model is ModelKind.THREE_STATE:
        view[:, 1 - outcome] = 0.0
    else:
        view[:, :, 1 - outcome] = 0.0
    kept = p1 if outcome else p0
    state.amps *= np.sqrt(total / kept)
    return outcome


def _resolve_register(state: QuantumState, register) -> range:
    if isinstance(register, str):
        register = state.registers[register]
    if isinstance(register, range):
        if register.step != 1:
            raise ContractViolation("register ranges must be contiguous")
        return register
    raise ContractViolation(f"bad register spec: {register!r}")


def probability_of_value(state: QuantumState, register, value: int) -> float:
    """Probability that measuring ``register`` yields ``value``.

    Marginalizes over every other qubit, the phonon and (2-state) both
    planes.  In the 3-state model, configurations with auxiliary amplitude
    inside the register spell no bit value and never match.
    """
    reg = _resolve_register(state, register)
    width = len(reg)
    if reg.start < 0 or reg.stop > state.num_qubits:
        raise ContractViolation(f"register {reg} outside M={state.num_qubits}")
    if value < 0 or value >= 2**width:
        raise ContractViolation(f"value {value} does not fit register {reg}")
    if state.model is ModelKind.TWO_STATE:
        cfg = np.arange(2**state.num_qubits)
        mask = ((cfg >> reg.start) & (2**width - 1)) == value
        sel = state.cfg_view()[:, mask, :]
        return float(np.vdot(sel, sel).real)
    cfg = np.arange(3**state.num_qubits)
    mask = np.ones(cfg.shape, dtype=bool)
    for j, q in enumerate(reg):
        digit = (cfg // 3**q) % 3
        mask &= digit == ((value >> j) & 1)
    sel = state.cfg_view()[mask, :]
    return float(np.vdot(sel, sel).real)


def clear_excited(state: QuantumState, qubit: int) -> float:
    """Zero every amplitude whose qubit digit is e0; returns the removed weight.

    2-state clearing covers both planes at the matching configurations.
    """
    view = state.digit_view(qubit)
    if state.model is ModelKind.THREE_STATE:
        sel = view[:, 1]
    else:
        sel = view[:, :, 1]
    removed = float(np.vdot(sel, sel).real)
    sel[...] = 0.0
    return removed


def rescale_error_amplitudes(state: QuantumState, reference_mask: np.ndarray,
                             target: float = 1.0) -> float:
    """Restore the squared norm by scaling only off-reference amplitudes.

    ``reference_mask`` flags the positions populated by the matching
    zero-error run; amplitude outside it exists only because of injected
    error and absorbs the weight lost by a preceding clear.  ``target`` is
    the squared norm to restore (1 for normalized runs, the pre-clear
    survival norm under the decay method).  Returns the factor applied to
    the error amplitudes (1.0 when nothing needed doing).
    """
    if reference_mask.shape != state.amps.shape:
        raise ContractViolation("reference mask shape mismatch")
    total = squared_norm(state)
    if total <= 0.0:
        raise DegenerateStateError("state fully cleared; nothing to rescale")
    err = state.amps[~reference_mask]
    err_weight = float(np.vdot(err, err).real)
    deficit = target - total
    if abs(deficit) < 1e-15:
        return 1.0
    if err_weight <= 1e-30 or err_weight + deficit <= 0.0:
        # No error amplitude to absorb the loss; fall back to a plain rescale.
        state.amps *= np.sqrt(target / total)
        return 1.0
    factor = np.sqrt((err_weight + deficit) / err_weight)
    state.amps[~reference_mask] = err * factor
    return float(factor)


def support_mask(state: QuantumState, tol: float = 1e-12) -> np.ndarray:
    """Boolean mask of positions carrying amplitude above ``tol``."""
    return np.abs(state.amps) > tol


# -- debug dump ------------------------------------------------------------

_DUMP_MAGIC = b"IONSIM01"
_MODEL_TAG = {ModelKind.THREE_STATE: 3, ModelKind.TWO_STATE: 2}


def write_state_dump(state: QuantumState, path) -> None:
    """Binary dump: 16-byte header then little-endian (re, im) doubles."""
    header = _DUMP_MAGIC + struct.pack("<II", _MODEL_TAG[state.model],
                                       state.num_qubits)
    pairs = np.empty((state.amps.size, 2), dtype="<f8")
    pairs[:, 0] = state.amps.real
    pairs[:, 1] = state.amps.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pairs.tobytes())


def read_state_dump(path) -> QuantumState:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:8] != _DUMP_MAGIC:
            raise ContractViolation("bad state dump magic")
        tag, m = struct.unpack("<II", header[8:])
        model = {3: ModelKind.THREE_STATE, 2: ModelKind.TWO_STATE}[tag]
        raw = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 2)
    amps = (raw[:, 0] + 1j * raw[:, 1]).astype(np.complex128)
    if amps.size != storage_length(model, m):
        raise ContractViolation("state dump length mismatch")
    return QuantumState(model, m, amps)
