"""Brute-force reference paths used to validate the simulator.

Two independent evaluators:

* a dense-matrix composer over the full 3-state space (practical up to
  four qubits) that multiplies out explicit full-space embeddings of each
  pulse, built here from scratch rather than through the strided kernels
  it is meant to check;
* a classical bit-level replay for circuits made of NOT/CNOT/CCNOT-style
  gates, used to check the factoring networks against plain modular
  arithmetic on every input.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .circuits import CircuitProgram
from .gates import Gate, GateKind, lower_gate_threestate
from .pulse import PulseSpec
from .statespace import ContractViolation, ModelKind, QuantumState

MAX_ORACLE_QUBITS = 4


class OracleMismatch(AssertionError):
    """Simulated state strayed from the dense reference beyond tolerance."""


@dataclass
class DenseUnitary:
    dimension: int
    matrix: np.ndarray

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def _rotation(theta: float, phi: float) -> np.ndarray:
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    return np.array([[c, -1j * np.exp(-1j * phi) * s],
                     [-1j * np.exp(1j * phi) * s, c]])


_LEVELS = {"V": (0, 1), "U": (0, 1), "U^": (0, 2), "U~": (1, 2)}


def _pulse_full_matrix(spec: PulseSpec, num_qubits: int) -> np.ndarray:
    """Full-space embedding of one pulse, written with naive index loops."""
    dim = 2 * 3**num_qubits
    mat = np.eye(dim, dtype=np.complex128)
    rot = _rotation(spec.theta + spec.dtheta, spec.phi + spec.dphi)
    a, b = _LEVELS[spec.kind.value]
    step = 3**spec.qubit
    for cfg in range(3**num_qubits):
        if (cfg // step) % 3 != a:
            continue
        partner = cfg + (b - a) * step
        if spec.kind.value == "V":
            for ph in (0, 1):
                i, j = cfg * 2 + ph, partner * 2 + ph
                mat[i, i], mat[i, j] = rot[0, 0], rot[0, 1]
                mat[j, i], mat[j, j] = rot[1, 0], rot[1, 1]
        else:
            i, j = cfg * 2 + 1, partner * 2  # (a, phonon 1) vs (b, phonon 0)
            mat[i, i], mat[i, j] = rot[0, 0], rot[0, 1]
            mat[j, i], mat[j, j] = rot[1, 0], rot[1, 1]
    return mat


def dense_unitary_of(source, num_qubits: int) -> DenseUnitary:
    """Compose full-space pulse embeddings in application order.

    ``source`` is a pulse sequence, a gate list, or a program; gates are
    lowered through the canonical 3-state lowering with errors zeroed.
    """
    if num_qubits > MAX_ORACLE_QUBITS:
        raise ContractViolation(
            f"dense oracle capped at {MAX_ORACLE_QUBITS} qubits")
    if isinstance(source, CircuitProgram):
        source = source.gates
    pulses: list[PulseSpec] = []
    for item in source:
        if isinstance(item, PulseSpec):
            pulses.append(item)
        elif isinstance(item, Gate):
            pulses.extend(lower_gate_threestate(item))
        else:
            raise ContractViolation(f"cannot compose {item!r}")
    dim = 2 * 3**num_qubits
    total = np.eye(dim, dtype=np.complex128)
    for spec in pulses:
        total = _pulse_full_matrix(spec, num_qubits) @ total
    return DenseUnitary(dim, total)


def assert_equivalent(simulated: QuantumState, expected: np.ndarray,
                      tol: float = 1e-12) -> float:
    """Max elementwise deviation after aligning one global phase.

    The phase is fixed by the first reference amplitude of usable size;
    deviations above ``tol`` raise.
    """
    if simulated.model is not ModelKind.THREE_STATE:
        raise ContractViolation("dense oracle states live in the 3-state space")
    sim = simulated.amps
    if sim.shape != expected.shape:
        raise ContractViolation("dimension mismatch against the oracle")
    nonzero = np.flatnonzero(np.abs(expected) > 1e-12)
    aligned = sim
    if nonzero.size:
        idx = nonzero[0]
        if abs(sim[idx]) > 1e-15:
            phase = (expected[idx] / abs(expected[idx])) / (sim[idx] / abs(sim[idx]))
            aligned = sim * phase
    deviation = float(np.abs(aligned - expected).max())
    if deviation > tol:
        raise OracleMismatch(
            f"simulated state deviates from dense oracle by {deviation:.3e} "
            f"(tol {tol:.1e})")
    return deviation


# -- classical replay ----------------------------------------------------------


def classical_run(program: CircuitProgram, initial_bits: int = 0) -> int:
    """Replay a classical-reversible circuit on definite bits.

    Rotations by +-pi act as bit flips; superposition-creating gates are
    rejected.  Returns the final bit pattern (qubit j at bit j).
    """
    bits = initial_bits
    for g in program.gates:
        if g.kind is GateKind.ROTATION:
            if abs(abs(g.theta) - pi) > 1e-12:
                raise ContractViolation(
                    f"rotation by {g.theta} is not classical")
            bits ^= 1 << g.qubits[0]
        elif g.kind is GateKind.CNOT:
            if bits >> g.qubits[0] & 1:
                bits ^= 1 << g.qubits[1]
        elif g.kind is GateKind.CCNOT:
            if (bits >> g.qubits[0] & 1) and (bits >> g.qubits[1] & 1):
                bits ^= 1 << g.qubits[2]
        elif g.kind is GateKind.MULTI_NOT:
            if all(bits >> q & 1 for q in g.qubits[:-1]):
                bits ^= 1 << g.qubits[-1]
        elif g.kind is GateKind.SET_BIT:
            bits |= 1 << g.qubits[0]
        elif g.kind is GateKind.CLEAR_BIT:
            bits &= ~(1 << g.qubits[0])
        else:
            raise ContractViolation(f"{g.kind.value} has no classical replay")
    return bits


def register_value(program: CircuitProgram, bits: int, name: str) -> int:
    reg = program.registers[name]
    return (bits >> reg.start) & ((1 << len(reg)) - 1)
