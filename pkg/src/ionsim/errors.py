"""Operational-error sampling and the two phonon decoherence engines.

Operational errors perturb the two angles of every laser pulse.  Bias
errors use a constant offset mu; noise draws fresh Gaussian angles per
pulse with standard deviation sigma; the combined mode draws Gaussian
angles around mu.

Decoherence acts on the shared phonon mode only.  After each pulse the
phonon-1 amplitudes decay by exp(-dec/2).  The ``decay`` method stops
there and lets the squared norm fall; the norm then reads as the
probability that the run survived without a spontaneous emission.  The
``spon_emit`` method renormalizes and then rolls for an actual emission
with probability dec * p_phonon; an emission collapses the phonon
superposition (quantum-jump style: the phonon-1 amplitude of every
configuration replaces the phonon-0 amplitude).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .statespace import ModelKind, QuantumState, renormalize


class ErrorMode(Enum):
    NONE = "none"
    BIAS = "bias"
    NOISE = "noise"
    BOTH = "both"


@dataclass(frozen=True)
class ErrorConfig:
    mode: ErrorMode = ErrorMode.NONE
    mu: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


ERR_NONE = ErrorConfig()


class DecMethod(Enum):
    NONE = "none"
    DECAY = "decay"
    SPON_EMIT = "spon_emit"


@dataclass(frozen=True)
class DecoherenceConfig:
    method: DecMethod = DecMethod.NONE
    dec: float = 0.0

    def __post_init__(self):
        if self.dec < 0:
            raise ValueError("dec must be >= 0")


DEC_NONE = DecoherenceConfig()


class RngStream:
    """Seeded uniform/Gaussian stream with platform-stable draws.

    Uniforms come from PCG64; Gaussians are built from them with the basic
    Box-Muller transform so the draw count per call is fixed and the values
    do not depend on the ziggurat tables of any particular numpy release.
    Identical (seed, key) always replays the identical sequence.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = seed
        self.key = key
        self._gen = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((seed,) + key)))
        self.draws = 0

    def uniform(self) -> float:
        self.draws += 1
        return float(self._gen.random())

    def gaussian(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return mu + sigma * float(z)


class TrialStreams:
    """Independent per-purpose substreams of one trial.

    Operational-angle draws, emission rolls and measurement collapses each
    consume their own stream, so a run with decoherence only replays the
    emission draws of a run that also injects operational errors.  That
    alignment is what lets matched-seed protocols isolate one error source.
    """

    def __init__(self, seed: int, trial: int = 0):
        self.seed = seed
        self.trial = trial
        self.op = RngStream(seed, (trial, 0))
        self.emit = RngStream(seed, (trial, 1))
        self.measure = RngStream(seed, (trial, 2))


def draw_error_angles(cfg: ErrorConfig, rng: RngStream) -> tuple[float, float]:
    """Fresh (dtheta, dphi) for one pulse; independent draws per angle."""
    if cfg.mode is ErrorMode.NONE:
        return 0.0, 0.0
    if cfg.mode is ErrorMode.BIAS:
        return cfg.mu, cfg.mu
    if cfg.mode is ErrorMode.NOISE:
        return rng.gaussian(0.0, cfg.sigma), rng.gaussian(0.0, cfg.sigma)
    return rng.gaussian(cfg.mu, cfg.sigma), rng.gaussian(cfg.mu, cfg.sigma)


def _phonon1_view(state: QuantumState) -> np.ndarray:
    if state.model is ModelKind.THREE_STATE:
        return state.cfg_view()[:, 1]
    return state.cfg_view()[:, :, 1]


def apply_decay(state: QuantumState, dec: float) -> None:
    """Multiply every phonon-1 amplitude (both planes) by exp(-dec/2)."""
    if dec == 0.0:
        return
    _phonon1_view(state)[...] *= np.exp(-dec / 2.0)


def phonon_probability(state: QuantumState) -> float:
    view = _phonon1_view(state)
    return float(np.vdot(view, view).real)


def emission_step(state: QuantumState, dec: float, rng: RngStream) -> bool:
    """Roll for a spontaneous emission; collapse the phonon if it happens.

    The emission probability is dec * p_phonon.  A jump moves the phonon-1
    amplitude of every configuration into the phonon-0 slot, zeroes the
    phonon-1 slots and renormalizes.  Exactly one uniform is consumed per
    call whether or not the jump fires.
    """
    p_phonon = phonon_probability(state)
    p_emit = dec * p_phonon
    if rng.uniform() >= p_emit:
        return False
    view = state.cfg_view()
    if state.model is ModelKind.THREE_STATE:
        view[:, 0] = view[:, 1]
        view[:, 1] = 0.0
    else:
        view[:, :, 0] = view[:, :, 1]
        view[:, :, 1] = 0.0
    renormalize(state)
    return True


def decoherence_after_pulse(state: QuantumState, cfg: DecoherenceConfig,
                            rng: RngStream) -> None:
    """The per-pulse decoherence step of the configured method."""
    if cfg.method is DecMethod.NONE:
        return
    if cfg.method is DecMethod.DECAY:
        apply_decay(state, cfg.dec)
        return
    apply_decay(state, cfg.dec)
    renormalize(state)
    emission_step(state, cfg.dec, rng)
