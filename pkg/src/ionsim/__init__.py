"""Pulse-level simulator of a trapped-ion quantum computer.

Simulates gate circuits as laser-pulse sequences under two state
representations (the full three-level model and a reduced two-level model
with a shared auxiliary plane), injects operational errors and phonon
decoherence, and measures result fidelity across seeded trials.
"""
from .analysis import (FidelityReport, OmegaEstimate, estimate_omega,
                       fidelity, reference_run, run_benchmark, run_program,
                       sweep)
from .circuits import (CircuitProgram, GroverSpec, ModexpSpec, ModexpVariant,
                       build_f21_lookup, build_grover, build_modexp,
                       grover_iteration_count, parse_program, reuse_renorm)
from .errors import (DecMethod, DecoherenceConfig, ErrorConfig, ErrorMode,
                     RngStream, TrialStreams, apply_decay,
                     decoherence_after_pulse, draw_error_angles,
                     emission_step)
from .gates import (CombineMethod, Gate, GateKind, apply_gate,
                    combine_error_angles, lower_gate_threestate,
                    lower_gate_twostate)
from .oracle import (DenseUnitary, assert_equivalent, classical_run,
                     dense_unitary_of, register_value)
from .pulse import (PulseKind, PulseSpec, apply_paired_rotation, apply_pulse,
                    pulse_matrix, rotation_block)
from .statespace import (CapacityError, ContractViolation,
                         DegenerateStateError, ModelKind, QuantumState,
                         inner_product, measure_qubit, new_state,
                         probability_of_value, read_state_dump, renormalize,
                         squared_norm, storage_length, write_state_dump)

__version__ = "0.1.0"
