"""Fidelity measurement, trial orchestration and parameter sweeps.

A benchmark run first produces the zero-error reference state (also
capturing the qubit-reuse support patterns), then executes seeded error
trials and scores each one as |<reference|trial>|^2.  The trial state is
never renormalized before scoring, so under the decay method the lost
norm stays part of the fidelity.

Every trial owns its own derived random streams, which makes runs
reproducible for a fixed master seed regardless of trial scheduling, and
lets the correlation estimator reuse the operational-error draws of one
run and the emission draws of another without further plumbing.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import CircuitProgram
from .errors import (DEC_NONE, DecMethod, DecoherenceConfig, ERR_NONE,
                     ErrorConfig, ErrorMode, TrialStreams)
from .gates import CombineMethod, Gate, GateKind, apply_gate
from .statespace import (ContractViolation, ModelKind, QuantumState,
                         inner_product, new_state, probability_of_value,
                         squared_norm)


def fidelity(psi: QuantumState, phi_ref: QuantumState) -> float:
    """|<phi_ref|psi>|^2 without renormalizing psi."""
    return abs(inner_product(phi_ref, psi)) ** 2


def run_program(program: CircuitProgram, model: ModelKind,
                err_cfg: ErrorConfig = ERR_NONE,
                dec_cfg: DecoherenceConfig = DEC_NONE,
                combine: CombineMethod = CombineMethod.SIMPLE,
                streams: TrialStreams | None = None,
                reuse_refs: list[np.ndarray] | None = None,
                initial_bits: int = 0):
    """Execute a program once; returns (state, captured reuse supports).

    When ``reuse_refs`` is given, each retire-and-reuse gate consumes the
    next mask from it; otherwise the run acts as its own reference and the
    captured masks are returned for later trials.
    """
    state = new_state(model, program.num_qubits, initial_bits,
                      program.registers)
    if streams is None:
        streams = TrialStreams(0)
    captured: list[np.ndarray] = []
    reuse_idx = 0
    for gate in program.gates:
        if gate.kind is GateKind.REUSE_RENORM and reuse_refs is not None:
            apply_gate(state, gate, err_cfg, combine, streams, dec_cfg,
                       reuse_reference=reuse_refs[reuse_idx])
            reuse_idx += 1
        else:
            mask = apply_gate(state, gate, err_cfg, combine, streams, dec_cfg)
            if mask is not None:
                captured.append(mask)
    return state, captured


def reference_run(program: CircuitProgram, model: ModelKind):
    """Zero-error, zero-decoherence run: the 'correct result' to score against."""
    return run_program(program, model, streams=TrialStreams(0, 0))


@dataclass
class FidelityReport:
    benchmark: str
    model: ModelKind
    combine: CombineMethod
    err_cfg: ErrorConfig
    dec_cfg: DecoherenceConfig
    trials: int
    seed: int
    fidelities: list[float] = field(default_factory=list)
    survival_norms: list[float] = field(default_factory=list)
    success_probs: list[float] | None = None
    trial_ids: list[int] = field(default_factory=list)

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def stderr_fidelity(self) -> float:
        if len(self.fidelities) < 2:
            return 0.0
        return float(np.std(self.fidelities, ddof=1) / np.sqrt(len(self.fidelities)))

    @property
    def mean_survival(self) -> float:
        return float(np.mean(self.survival_norms))

    @property
    def mean_success(self) -> float | None:
        if self.success_probs is None:
            return None
        return float(np.mean(self.success_probs))


def _success_probability(program: CircuitProgram, state: QuantumState):
    key = program.meta.get("key")
    if key is None or "l" not in program.registers:
        return None
    return probability_of_value(state, "l", key)


def run_benchmark(program: CircuitProgram, model: ModelKind,
                  err_cfg: ErrorConfig = ERR_NONE,
                  dec_cfg: DecoherenceConfig = DEC_NONE,
                  combine: CombineMethod = CombineMethod.SIMPLE,
                  trials: int = 4, seed: int = 0,
                  jobs: int = 1) -> FidelityReport:
    """Reference once, then ``trials`` seeded error runs; fidelity at the end.

    Trial t draws from streams keyed by (seed, t); the report lists trials
    in index order, so output is identical for any ``jobs`` value.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    ref_state, reuse_masks = reference_run(program, model)
    report = FidelityReport(program.name, model, combine, err_cfg, dec_cfg,
                            trials, seed)

    def one_trial(t: int):
        streams = TrialStreams(seed, t)
        state, _ = run_program(program, model, err_cfg, dec_cfg, combine,
                               streams, reuse_refs=reuse_masks)
        return (fidelity(state, ref_state), squared_norm(state),
                _success_probability(program, state))

    ids = list(range(1, trials + 1))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one_trial, ids))
    else:
        results = [one_trial(t) for t in ids]
    report.trial_ids = ids
    for fid, norm, success in results:
        report.fidelities.append(fid)
        report.survival_norms.append(norm)
        if success is not None:
            if report.success_probs is None:
                report.success_probs = []
            report.success_probs.append(success)
    return report


@dataclass
class OmegaEstimate:
    """Interaction of the two error families: omega = F_both - F_dec * F_op."""

    f_dec: float
    f_op: float
    f_both: float
    report_dec: FidelityReport
    report_op: FidelityReport
    report_both: FidelityReport

    @property
    def omega(self) -> float:
        return self.f_both - self.f_dec * self.f_op


def estimate_omega(program: CircuitProgram, model: ModelKind,
                   err_cfg: ErrorConfig, dec_cfg: DecoherenceConfig,
                   combine: CombineMethod = CombineMethod.SIMPLE,
                   trials: int = 4, seed: int = 0,
                   jobs: int = 1) -> OmegaEstimate:
    """Three matched-seed runs: errors only, decoherence only, both together.

    The shared master seed means the combined run replays the operational
    draws of the error-only run and the emission draws of the
    decoherence-only run, isolating the interaction term.
    """
    if err_cfg.mode is ErrorMode.NONE or dec_cfg.method is DecMethod.NONE:
        raise ContractViolation(
            "omega needs both an operational-error and a decoherence config")
    rep_op = run_benchmark(program, model, err_cfg, DEC_NONE, combine,
                           trials, seed, jobs)
    rep_dec = run_benchmark(program, model, ERR_NONE, dec_cfg, combine,
                            trials, seed, jobs)
    rep_both = run_benchmark(program, model, err_cfg, dec_cfg, combine,
                             trials, seed, jobs)
    return OmegaEstimate(rep_dec.mean_fidelity, rep_op.mean_fidelity,
                         rep_both.mean_fidelity, rep_dec, rep_op, rep_both)


SWEEP_AXES = ("sigma", "mu", "dec")


def sweep(program: CircuitProgram, model: ModelKind, axis: str, values,
          err_cfg: ErrorConfig = ERR_NONE,
          dec_cfg: DecoherenceConfig = DEC_NONE,
          combine: CombineMethod = CombineMethod.SIMPLE,
          trials: int = 4, seed: int = 0, jobs: int = 1):
    """One benchmark run per axis value; rows come back in input order."""
    values = list(values)
    if axis not in SWEEP_AXES:
        raise ContractViolation(f"sweep axis must be one of {SWEEP_AXES}")
    if not values:
        raise ContractViolation("sweep needs at least one value")
    rows = []
    for value in values:
        e, d = err_cfg, dec_cfg
        if axis == "sigma":
            mode = e.mode if e.mode is not ErrorMode.NONE else ErrorMode.NOISE
            e = replace(e, mode=mode, sigma=value)
        elif axis == "mu":
            mode = e.mode if e.mode is not ErrorMode.NONE else ErrorMode.BIAS
            e = replace(e, mode=mode, mu=value)
        else:
            method = (d.method if d.method is not DecMethod.NONE
                      else DecMethod.DECAY)
            d = replace(d, method=method, dec=value)
        report = run_benchmark(program, model, e, d, combine, trials, seed,
                               jobs)
        rows.append((value, report))
    return rows
