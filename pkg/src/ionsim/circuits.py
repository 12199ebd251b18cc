"""Benchmark circuit generators.

Three families reproduce the simulation workloads:

* factor-21 by table lookup: the modular exponential is written directly
  into the output register, one NOT-dressed multi-controlled flip per
  input value and output bit.  Exponential in the input width, but exact
  and compact for small moduli.
* factor-15 by repeated squaring: a chain of conditional modular
  multiplies built from NOT/CNOT/CCNOT ripple arithmetic.  An L-bit
  modulus costs 5L+4 qubits: input A (2L+1), product (L), an addition
  accumulator (L+1) and carry/flag scratch (L+2).  Variants: the full
  circuit, a single multiply step, and the reduced form that keeps only
  3 input qubits and retires/reuses the third one between the trailing
  multiplies (valid because the factor-15 period divides 4, so those
  multiplies are by 1).
* Grover search over 2**key_bits items with a marked key: NOT-dressed
  multi-controlled oracle onto the flip register r, then the diffusion
  transform as Fourier / inversion-about-zero / Fourier, with the helper
  register s feeding the inversion.

Generators are pure; programs are immutable descriptions a runner
executes against either simulation model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import asin, ceil, floor, gcd, log2, pi, sqrt

import numpy as np

from . import statespace
from .gates import Gate, GateKind, gate_pulse_count
from .pulse import PulseKind, PulseSpec, apply_pulse
from .statespace import ContractViolation, QuantumState


@dataclass
class CircuitProgram:
    name: str
    num_qubits: int
    registers: dict[str, range]
    gates: list[Gate]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for reg in self.registers.values():
            if reg.start < 0 or reg.stop > self.num_qubits:
                raise ContractViolation(f"register {reg} outside the qubit count")
            overlap = seen.intersection(reg)
            if overlap:
                raise ContractViolation(f"registers overlap at qubits {overlap}")
            seen.update(reg)
        for g in self.gates:
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise ContractViolation(f"gate {g} references out-of-range qubits")

    def pulse_count(self) -> int:
        """Laser pulses the program costs (informational, both models)."""
        return sum(gate_pulse_count(g) for g in self.gates)

    def dump(self) -> str:
        """Stable line-oriented text form, one gate per line."""
        lines = [f"PROGRAM {self.name} {self.num_qubits}"]
        for name, reg in self.registers.items():
            lines.append(f"REGISTER {name} {reg.start} {reg.stop}")
        for g in self.gates:
            parts = ["GATE", g.kind.value] + [str(q) for q in g.qubits]
            if g.kind is GateKind.ROTATION:
                parts += [repr(g.theta), repr(g.phi)]
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"


def parse_program(text: str) -> CircuitProgram:
    name, num_qubits = "custom", 0
    registers: dict[str, range] = {}
    gates: list[Gate] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "PROGRAM":
            name, num_qubits = parts[1], int(parts[2])
        elif parts[0] == "REGISTER":
            registers[parts[1]] = range(int(parts[2]), int(parts[3]))
        elif parts[0] == "GATE":
            kind = GateKind(parts[1])
            if kind is GateKind.ROTATION:
                gates.append(Gate.rotation(int(parts[2]), float(parts[3]),
                                           float(parts[4])))
            else:
                qubits = tuple(int(p) for p in parts[2:])
                gates.append(Gate(kind, qubits))
        else:
            raise ContractViolation(f"unparseable program line: {line}")
    return CircuitProgram(name, num_qubits, registers, gates)


# -- gate-list helpers --------------------------------------------------------


def _inverse_gates(gates: list[Gate]) -> list[Gate]:
    out = []
    for g in reversed(gates):
        if g.kind is GateKind.ROTATION:
            out.append(Gate.rotation(g.qubits[0], -g.theta, g.phi))
        else:
            out.append(g)  # cnot/ccnot/multinot/cphase are self-inverse
    return out


def _prep_rotations(qubits) -> list[Gate]:
    """Equal-superposition preparation, one V(pi/2, pi/2) per qubit."""
    return [Gate.rotation(q, pi / 2, pi / 2) for q in qubits]


# -- reversible constant arithmetic ------------------------------------------
#
# All adders work against compile-time constants, so the carry logic
# specializes per bit: a set constant bit turns the majority into an OR.
# Carries live in dedicated scratch bits and are always uncomputed; sums
# are written top-down interleaved with the carry uncompute so every
# carry still sees the original low bits.


def _carry_chain(r_bits, c_bits, const: int, width: int) -> list[Gate]:
    """Carries of r + const into c_bits; c_bits[i] = carry into position i+1."""
    g: list[Gate] = []
    for i in range(width):
        ki = (const >> i) & 1
        if i == 0:
            if ki:
                g.append(Gate.cnot(r_bits[0], c_bits[0]))
        else:
            g.append(Gate.ccnot(r_bits[i], c_bits[i - 1], c_bits[i]))
            if ki:
                g.append(Gate.cnot(r_bits[i], c_bits[i]))
                g.append(Gate.cnot(c_bits[i - 1], c_bits[i]))
    return g


def _ctrl_const_add(u: int, r_bits, c_bits, const: int, width: int) -> list[Gate]:
    """r += const if u, over ``width`` bits; the top carry is dropped."""
    g = _carry_chain(r_bits, c_bits, const, width - 1)
    for i in range(width - 1, -1, -1):
        if (const >> i) & 1:
            g.append(Gate.cnot(u, r_bits[i]))
        if i > 0:
            g.append(Gate.ccnot(u, c_bits[i - 1], r_bits[i]))
            j = i - 1  # uncompute the carry into position i before touching r[j]
            kj = (const >> j) & 1
            if j == 0:
                if kj:
                    g.append(Gate.cnot(r_bits[0], c_bits[0]))
            else:
                if kj:
                    g.append(Gate.cnot(c_bits[j - 1], c_bits[j]))
                    g.append(Gate.cnot(r_bits[j], c_bits[j]))
                g.append(Gate.ccnot(r_bits[j], c_bits[j - 1], c_bits[j]))
    return g


def _ctrl_mod_add(t: int, b: int, r_bits, c_bits, k: int, modulus: int,
                  width_l: int) -> list[Gate]:
    """r (< modulus, width_l+1 bits) += k mod modulus, under control t.

    Sequence: flag b := t AND [r >= modulus - k] via a comparison carry
    chain; add k under t; subtract modulus under b; clear b by comparing
    the result against k.
    """
    g: list[Gate] = []
    cmp1 = (1 << width_l) - (modulus - k)
    chain = _carry_chain(r_bits, c_bits, cmp1, width_l)
    g += chain
    g.append(Gate.ccnot(t, c_bits[width_l - 1], b))
    g += list(reversed(chain))
    g += _ctrl_const_add(t, r_bits, c_bits, k, width_l + 1)
    g += _ctrl_const_add(b, r_bits, c_bits, (1 << (width_l + 1)) - modulus,
                         width_l + 1)
    cmp2 = (1 << width_l) - k
    chain = _carry_chain(r_bits, c_bits, cmp2, width_l)
    g += chain
    g.append(Gate.ccnot(t, c_bits[width_l - 1], b))
    g += list(reversed(chain))
    g.append(Gate.cnot(t, b))
    return g


def _cond_multiply(a: int, p_bits, r_bits, t: int, b: int, c_bits,
                   factor: int, modulus: int, width_l: int) -> list[Gate]:
    """product <- factor * product mod modulus when a is set, else unchanged.

    Builds factor*product into the accumulator by shift-and-add, copies the
    untouched product into it on the unset branch, swaps, then clears the
    accumulator by running the build phase backwards with the inverse
    factor.  All scratch returns to zero.
    """
    inverse = pow(factor, -1, modulus)

    def build(c: int) -> list[Gate]:
        g: list[Gate] = []
        for i in range(width_l):
            k = (c << i) % modulus
            if k == 0:
                continue
            g.append(Gate.ccnot(a, p_bits[i], t))
            g += _ctrl_mod_add(t, b, r_bits, c_bits, k, modulus, width_l)
            g.append(Gate.ccnot(a, p_bits[i], t))
        g.append(Gate.x(a))
        g += [Gate.ccnot(a, p_bits[i], r_bits[i]) for i in range(width_l)]
        g.append(Gate.x_inverse(a))
        return g

    g = build(factor)
    for i in range(width_l):
        g += [Gate.cnot(p_bits[i], r_bits[i]), Gate.cnot(r_bits[i], p_bits[i]),
              Gate.cnot(p_bits[i], r_bits[i])]
    g += _inverse_gates(build(inverse))
    return g


# -- factoring builders --------------------------------------------------------


class ModexpVariant(Enum):
    FULL = "full"
    SINGLE_MULT = "single_mult"
    A3BIT = "a3bit"


@dataclass(frozen=True)
class ModexpSpec:
    l: int
    x: int
    n: int
    variant: ModexpVariant = ModexpVariant.FULL

    def __post_init__(self):
        if gcd(self.x, self.n) != 1 or not 1 < self.x < self.n:
            raise ContractViolation(
                f"base {self.x} must be in (1, {self.n}) and coprime to it")
        if not 2 ** (self.l - 1) <= self.n < 2**self.l:
            raise ContractViolation(f"modulus {self.n} is not {self.l} bits wide")
        if self.variant is ModexpVariant.A3BIT and pow(self.x, 4, self.n) != 1:
            raise ContractViolation(
                "the 3-bit input reduction needs the base's order to divide 4")


@dataclass(frozen=True)
class GroverSpec:
    key_bits: int
    key: int
    iterations: int = 1

    def __post_init__(self):
        if self.key_bits < 1:
            raise ContractViolation("key_bits must be >= 1")
        if not 0 <= self.key < 2**self.key_bits:
            raise ContractViolation(f"key {self.key} outside the search space")
        if self.iterations < 1:
            raise ContractViolation("iterations must be >= 1")


def build_modexp(spec: ModexpSpec,
                 prepare_superposition: bool = True) -> CircuitProgram:
    """Repeated-squaring modular exponentiation f(A) = x^A mod n."""
    l = spec.l
    if spec.variant is ModexpVariant.FULL:
        a_bits = 2 * l + 1
    elif spec.variant is ModexpVariant.SINGLE_MULT:
        a_bits = 1
    else:
        a_bits = 3
    a_reg = range(0, a_bits)
    p_reg = range(a_bits, a_bits + l)
    acc_reg = range(p_reg.stop, p_reg.stop + l + 1)
    fl_reg = range(acc_reg.stop, acc_reg.stop + l + 2)
    p_bits, r_bits = list(p_reg), list(acc_reg)
    t, b, c_bits = fl_reg[0], fl_reg[1], list(fl_reg)[2:]

    gates: list[Gate] = []
    if prepare_superposition:
        gates += _prep_rotations(a_reg)
    gates.append(Gate.x(p_bits[0]))  # product := 1

    if spec.variant is ModexpVariant.SINGLE_MULT:
        steps = [(a_reg[0], spec.x, False)]
    else:
        steps = []
        for j in range(2 * l + 1):
            control = a_reg[j] if j < a_bits else a_reg[a_bits - 1]
            steps.append((control, pow(spec.x, 2**j, spec.n), j >= a_bits))
    for control, factor, reuse in steps:
        if reuse:
            gates.append(Gate.reuse_renorm(control))
            if prepare_superposition:
                gates.append(Gate.rotation(control, pi / 2, pi / 2))
        gates += _cond_multiply(control, p_bits, r_bits, t, b, c_bits,
                                factor, spec.n, l)

    names = {ModexpVariant.FULL: f"f{spec.n}_long",
             ModexpVariant.SINGLE_MULT: "mult",
             ModexpVariant.A3BIT: f"f{spec.n}_3bit"}
    return CircuitProgram(
        names[spec.variant], fl_reg.stop,
        {"A": a_reg, "product": p_reg, "scratch1": acc_reg, "scratch2": fl_reg},
        gates, meta={"x": spec.x, "n": spec.n, "l": l,
                     "variant": spec.variant.value})


def build_f21_lookup(l_a: int = 6, x: int = 2, n: int = 21,
                     prepare_superposition: bool = True) -> CircuitProgram:
    """Table-lookup f(A) = x^A mod n, one dressed flip block per input value."""
    if gcd(x, n) != 1 or not 1 < x < n:
        raise ContractViolation(f"base {x} must be coprime to {n}")
    l_f = ceil(log2(n))
    a_reg = range(0, l_a)
    f_reg = range(l_a, l_a + l_f)
    gates: list[Gate] = []
    if prepare_superposition:
        gates += _prep_rotations(a_reg)
    for a in range(2**l_a):
        value = pow(x, a, n)
        dress = [q for j, q in enumerate(a_reg) if not (a >> j) & 1]
        gates += [Gate.x(q) for q in dress]
        for j, q in enumerate(f_reg):
            if (value >> j) & 1:
                gates.append(Gate.multi_not(a_reg, q))
        gates += [Gate.x_inverse(q) for q in dress]
    return CircuitProgram(f"f{n}", f_reg.stop, {"A": a_reg, "F": f_reg},
                          gates, meta={"x": x, "n": n})


# -- Grover search -------------------------------------------------------------


def grover_iteration_count(space_size: int, num_solutions: int = 1) -> int:
    """Iterations that drive the marked-state probability to its first peak."""
    if not 1 <= num_solutions <= space_size:
        raise ContractViolation("need 1 <= solutions <= space size")
    theta = asin(sqrt(num_solutions / space_size))
    return max(1, floor(pi / (4 * theta)))


def build_grover(spec: GroverSpec, combine=None) -> CircuitProgram:
    """Marked-key search: prep, then `iterations` x [oracle, F, R, F].

    The flip register r is prepared as an equal superposition with opposite
    signs so a single evaluation of the characteristic function both marks
    and phase-flips; s stays set and feeds the inversion-about-zero.
    """
    kb = spec.key_bits
    l_reg = range(0, kb)
    r, s = kb, kb + 1
    gates: list[Gate] = [Gate.set_bit(s), Gate.set_bit(r),
                         Gate.rotation(r, pi / 2, pi / 2)]
    gates += _prep_rotations(l_reg)
    dress = [q for j, q in enumerate(l_reg) if not (spec.key >> j) & 1]
    for _ in range(spec.iterations):
        gates += [Gate.x(q) for q in dress]
        gates.append(Gate.multi_not(l_reg, r))
        gates += [Gate.x_inverse(q) for q in dress]
        gates += [Gate.fourier(q) for q in l_reg]
        gates.append(Gate.grover_r(l_reg, s))
        gates += [Gate.fourier(q) for q in l_reg]
    meta = {"key": spec.key, "key_bits": kb,
            "iterations": spec.iterations}
    if combine is not None:
        meta["combine"] = getattr(combine, "value", combine)
    return CircuitProgram("grover", kb + 2,
                          {"l": l_reg, "r": range(r, r + 1),
                           "s": range(s, s + 1)}, gates, meta=meta)


# -- qubit retirement ----------------------------------------------------------


def reuse_renorm(state: QuantumState, qubit: int,
                 reference_mask: np.ndarray | None = None) -> None:
    """Retire a logically disentangled qubit so it can be prepared afresh.

    Rotates the ideal superposition back to |g>, clears whatever stayed in
    |e0>, and restores the lost weight by scaling only the amplitudes the
    zero-error reference does not populate.  Without a reference mask the
    own post-clear support is used, which makes the zero-error case exact
    and lossless.
    """
    apply_pulse(state, PulseSpec(PulseKind.V, qubit, pi / 2, -pi / 2))
    pre = statespace.squared_norm(state)
    statespace.clear_excited(state, qubit)
    if statespace.squared_norm(state) <= 0.0:
        raise statespace.DegenerateStateError(
            "reuse cleared the entire state; qubit was not disentangled")
    if reference_mask is None:
        reference_mask = statespace.support_mask(state)
    statespace.rescale_error_amplitudes(state, reference_mask, target=pre)
