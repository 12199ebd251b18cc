from math import exp, pi

import numpy as np
import pytest

from ionsim import (DecMethod, DecoherenceConfig, ErrorConfig, ErrorMode,
                    ModelKind, PulseKind, PulseSpec, RngStream, TrialStreams,
                    apply_decay, apply_pulse, decoherence_after_pulse,
                    draw_error_angles, emission_step, new_state, squared_norm)


def phonon1_state(model=ModelKind.THREE_STATE):
    """Unit amplitude entirely in the phonon-1 slice."""
    st = new_state(model, 1, 0)
    st.amps[:] = 0
    st.amps[1] = 1.0
    return st


class TestDraws:
    def test_none(self):
        rng = RngStream(0)
        assert draw_error_angles(ErrorConfig(), rng) == (0.0, 0.0)
        assert rng.draws == 0

    def test_bias_is_deterministic(self):
        cfg = ErrorConfig(ErrorMode.BIAS, mu=pi / 1024)
        rng = RngStream(0)
        for _ in range(5):
            assert draw_error_angles(cfg, rng) == (pi / 1024, pi / 1024)
        assert rng.draws == 0

    def test_noise_zero_sigma(self):
        cfg = ErrorConfig(ErrorMode.NOISE, sigma=0.0)
        assert draw_error_angles(cfg, RngStream(1)) == (0.0, 0.0)

    def test_noise_statistics(self):
        sigma = pi / 128
        cfg = ErrorConfig(ErrorMode.NOISE, sigma=sigma)
        rng = RngStream(123)
        draws = np.array([draw_error_angles(cfg, rng)[0] for _ in range(100_000)])
        assert abs(draws.mean()) < 4 * sigma / np.sqrt(draws.size)
        assert draws.std() == pytest.approx(sigma, rel=0.02)

    def test_both_offsets_mean(self):
        cfg = ErrorConfig(ErrorMode.BOTH, mu=0.5, sigma=0.01)
        rng = RngStream(7)
        draws = np.array([draw_error_angles(cfg, rng)[1] for _ in range(20_000)])
        assert draws.mean() == pytest.approx(0.5, abs=0.001)

    def test_streams_reproducible(self):
        a = [RngStream(99, (4,)).gaussian() for _ in range(1)]
        b = [RngStream(99, (4,)).gaussian() for _ in range(1)]
        assert a == b
        assert RngStream(99).uniform() != RngStream(100).uniform()


class TestDecay:
    def test_zero_rate_noop(self):
        st = phonon1_state()
        before = st.amps.copy()
        apply_decay(st, 0.0)
        np.testing.assert_array_equal(st.amps, before)

    def test_phonon1_norm_factor(self):
        st = phonon1_state()
        apply_decay(st, 0.2)
        assert squared_norm(st) == pytest.approx(exp(-0.2), abs=1e-14)

    def test_phonon0_untouched(self):
        st = new_state(ModelKind.THREE_STATE, 1, 0)
        apply_decay(st, 5.0)
        assert squared_norm(st) == pytest.approx(1.0)

    def test_both_planes_two_state(self):
        st = new_state(ModelKind.TWO_STATE, 1, 0)
        st.amps[:] = 0
        view = st.cfg_view()
        view[0, 0, 1] = view[1, 1, 1] = 1 / np.sqrt(2)
        apply_decay(st, 0.1)
        assert squared_norm(st) == pytest.approx(exp(-0.1), abs=1e-14)

    def test_commutes_with_v_pulse(self):
        rng = np.random.default_rng(3)
        a = new_state(ModelKind.THREE_STATE, 2, 0)
        a.amps[:] = rng.normal(size=a.amps.size) + 1j * rng.normal(size=a.amps.size)
        b = a.copy()
        spec = PulseSpec(PulseKind.V, 1, 0.7, 0.3)
        apply_decay(a, 0.05)
        apply_pulse(a, spec)
        apply_pulse(b, spec)
        apply_decay(b, 0.05)
        assert np.abs(a.amps - b.amps).max() < 1e-13


class TestEmission:
    def test_no_phonon_never_emits(self):
        st = new_state(ModelKind.THREE_STATE, 2, 0b11)
        before = st.amps.copy()
        rng = RngStream(1)
        for _ in range(100):
            assert not emission_step(st, 1.0, rng)
        np.testing.assert_array_equal(st.amps, before)

    def test_emission_probability_product(self):
        # dec=1e-2 with half the weight in the phonon: p_emit = 5e-3,
        # checked against a 4-sigma binomial window over 10^4 trials
        dec, p_ph = 1e-2, 0.5
        p_emit = dec * p_ph
        rng = RngStream(42)
        hits = 0
        n = 10_000
        for _ in range(n):
            st = new_state(ModelKind.THREE_STATE, 1, 0)
            st.amps[:] = 0
            st.amps[0] = st.amps[1] = np.sqrt(0.5)
            hits += emission_step(st, dec, rng)
        margin = 4 * np.sqrt(p_emit * (1 - p_emit) / n)
        assert abs(hits / n - p_emit) < margin

    def test_collapse_moves_phonon(self):
        st = new_state(ModelKind.THREE_STATE, 1, 0)
        st.amps[:] = 0
        st.amps[0] = 0.6
        st.amps[1] = 0.8
        rng = RngStream(0)
        while not emission_step(st, 1.0, rng):
            pass
        assert st.amps[1] == 0.0
        assert abs(st.amps[0]) == pytest.approx(1.0, abs=1e-12)
        assert squared_norm(st) == pytest.approx(1.0, abs=1e-12)


class TestPerPulseStep:
    def test_none_is_noop(self):
        st = phonon1_state()
        before = st.amps.copy()
        decoherence_after_pulse(st, DecoherenceConfig(), RngStream(0))
        np.testing.assert_array_equal(st.amps, before)

    def test_decay_accumulates_exponent(self):
        st = phonon1_state()
        cfg = DecoherenceConfig(DecMethod.DECAY, 1e-3)
        rng = RngStream(0)
        k = 40
        for _ in range(k):
            decoherence_after_pulse(st, cfg, rng)
        assert squared_norm(st) == pytest.approx(exp(-k * 1e-3), abs=1e-12)

    def test_spon_emit_keeps_unit_norm(self):
        st = phonon1_state()
        cfg = DecoherenceConfig(DecMethod.SPON_EMIT, 1e-2)
        rng = RngStream(8)
        for _ in range(50):
            decoherence_after_pulse(st, cfg, rng)
            assert squared_norm(st) == pytest.approx(1.0, abs=1e-12)

    def test_trial_streams_are_independent(self):
        s = TrialStreams(5, 2)
        a = [s.op.uniform() for _ in range(3)]
        b = [s.emit.uniform() for _ in range(3)]
        assert a != b
        s2 = TrialStreams(5, 2)
        assert [s2.op.uniform() for _ in range(3)] == a
