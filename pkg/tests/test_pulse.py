from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionsim import (ModelKind, PulseKind, PulseSpec, apply_paired_rotation,
                    apply_pulse, new_state, pulse_matrix, squared_norm)
from ionsim.pulse import rotation_block

SQ2 = 1 / np.sqrt(2)


def three_state_pos(digits, phonon):
    return sum(d * 3**q for q, d in enumerate(digits)) * 2 + phonon


class TestMatrices:
    def test_basis_change_pair(self):
        # the two dressing rotations around a controlled-phase core
        np.testing.assert_allclose(pulse_matrix(PulseKind.V, pi / 2, -pi / 2),
                                   SQ2 * np.array([[1, 1], [-1, 1]]), atol=1e-14)
        np.testing.assert_allclose(pulse_matrix(PulseKind.V, pi / 2, pi / 2),
                                   SQ2 * np.array([[1, -1], [1, 1]]), atol=1e-14)

    def test_u_pi_block(self):
        mat = pulse_matrix(PulseKind.U, pi, 0)
        expect = np.eye(4, dtype=complex)
        expect[1:3, 1:3] = [[0, -1j], [-1j, 0]]
        np.testing.assert_allclose(mat, expect, atol=1e-14)

    def test_u_2pi_restriction(self):
        # with the phonon at rest only the diagonal survives: diag(1, -1)
        mat = pulse_matrix(PulseKind.U, 2 * pi, 0)
        np.testing.assert_allclose(np.diag(mat), [1, -1, -1, 1], atol=1e-14)

    @given(st.floats(0, 2 * pi), st.floats(0, 2 * pi))
    @settings(max_examples=80, deadline=None)
    def test_unitarity(self, theta, phi):
        for kind in PulseKind:
            mat = pulse_matrix(kind, theta, phi)
            np.testing.assert_allclose(mat @ mat.conj().T,
                                       np.eye(mat.shape[0]), atol=1e-14)


class TestThreeStateApplication:
    def test_zero_angle_is_identity(self):
        st_ = new_state(ModelKind.THREE_STATE, 2, 0b01)
        before = st_.amps.copy()
        apply_pulse(st_, PulseSpec(PulseKind.V, 0, 0.0, 1.234))
        np.testing.assert_array_equal(st_.amps, before)

    def test_u_pi_transfers_to_phonon(self):
        st_ = new_state(ModelKind.THREE_STATE, 1, 1)  # |e0>, phonon 0
        apply_pulse(st_, PulseSpec(PulseKind.U, 0, pi, 0))
        assert st_.amps[three_state_pos([0], 1)] == pytest.approx(-1j)

    def test_uhat_double_negates(self):
        st_ = new_state(ModelKind.THREE_STATE, 1, 0)
        st_.amps[:] = 0
        st_.amps[three_state_pos([0], 1)] = 1.0  # |g>|1>_p
        apply_pulse(st_, PulseSpec(PulseKind.U_HAT, 0, pi, 0))
        apply_pulse(st_, PulseSpec(PulseKind.U_HAT, 0, pi, 0))
        assert st_.amps[three_state_pos([0], 1)] == pytest.approx(-1.0, abs=1e-15)

    def test_utilde_couples_e0(self):
        st_ = new_state(ModelKind.THREE_STATE, 1, 0)
        st_.amps[:] = 0
        st_.amps[three_state_pos([1], 1)] = 1.0  # |e0>|1>_p
        apply_pulse(st_, PulseSpec(PulseKind.U_TILDE, 0, pi, 0))
        assert st_.amps[three_state_pos([2], 0)] == pytest.approx(-1j)

    @given(st.integers(0, 3), st.floats(-2 * pi, 2 * pi), st.floats(0, 2 * pi),
           st.sampled_from(list(PulseKind)))
    @settings(max_examples=60, deadline=None)
    def test_inverse_property(self, qubit, theta, phi, kind):
        rng = np.random.default_rng(9)
        st_ = new_state(ModelKind.THREE_STATE, 4, 0)
        st_.amps[:] = rng.normal(size=st_.amps.size) + 1j * rng.normal(size=st_.amps.size)
        st_.amps /= np.sqrt(squared_norm(st_))
        before = st_.amps.copy()
        apply_pulse(st_, PulseSpec(kind, qubit, theta, phi))
        assert squared_norm(st_) == pytest.approx(1.0, abs=1e-12)
        apply_pulse(st_, PulseSpec(kind, qubit, -theta, phi))
        assert np.abs(st_.amps - before).max() < 1e-12

    def test_error_angles_shift(self):
        ideal = new_state(ModelKind.THREE_STATE, 1, 0)
        shifted = new_state(ModelKind.THREE_STATE, 1, 0)
        apply_pulse(ideal, PulseSpec(PulseKind.V, 0, pi / 2 + 0.01, pi / 2 + 0.02))
        apply_pulse(shifted, PulseSpec(PulseKind.V, 0, pi / 2, pi / 2, 0.01, 0.02))
        np.testing.assert_allclose(shifted.amps, ideal.amps, atol=1e-15)


class TestPairedRotation:
    def target_pair(self, state, config, phonon=1):
        view = state.cfg_view()
        return view[0, config, phonon], view[1, config, phonon]

    def test_full_2pi_negates_main(self):
        st_ = new_state(ModelKind.TWO_STATE, 2, 0)
        st_.amps[:] = 0
        view = st_.cfg_view()
        view[0, 0, 1] = 1.0  # qubit digits g,g at phonon 1
        apply_paired_rotation(st_, 0, 2 * pi, 0.0)
        main, aux = self.target_pair(st_, 0)
        assert main == pytest.approx(-1.0, abs=1e-15)
        assert aux == 0.0

    def test_delta_leaks_into_aux(self):
        # oracle: two 3-state pi pulses with a sign flip between compose to
        # a 2x2 rotation by 2*pi + (d1 - d2); the paired rotation with the
        # combined delta must match both elements of that composition.
        d1, d2 = 0.013, -0.027
        r1 = rotation_block(pi + d1, 0)
        r2 = rotation_block(pi + d2, 0)
        oracle = r2 @ np.diag([-1, 1]) @ r1

        st_ = new_state(ModelKind.TWO_STATE, 2, 0)
        st_.amps[:] = 0
        st_.cfg_view()[0, 0, 1] = 1.0
        apply_paired_rotation(st_, 0, 2 * pi, d1 - d2)
        main, aux = self.target_pair(st_, 0)
        assert main == pytest.approx(complex(oracle[0, 0]), abs=1e-14)
        assert aux == pytest.approx(complex(oracle[1, 0]), abs=1e-14)
        assert abs(main) == pytest.approx(abs(np.cos((d1 - d2) / 2)), abs=1e-14)
        assert abs(aux) == pytest.approx(abs(np.sin((d1 - d2) / 2)), abs=1e-14)

    def test_non_matching_untouched(self):
        st_ = new_state(ModelKind.TWO_STATE, 2, 0b01)  # digit e0 on qubit 0
        before = st_.amps.copy()
        apply_paired_rotation(st_, 0, 2 * pi, 0.5)  # trigger digit g
        np.testing.assert_array_equal(st_.amps, before)

    def test_config_mask_restricts(self):
        st_ = new_state(ModelKind.TWO_STATE, 2, 0)
        st_.amps[:] = 0
        view = st_.cfg_view()
        view[0, 0, 1] = SQ2  # (g, g)
        view[0, 2, 1] = SQ2  # (g, e0)
        mask = np.zeros(4, dtype=bool)
        mask[2] = True
        apply_paired_rotation(st_, 0, 2 * pi, 0.0, config_mask=mask)
        assert view[0, 0, 1] == pytest.approx(SQ2)
        assert view[0, 2, 1] == pytest.approx(-SQ2)

    def test_tilde_trigger_digit(self):
        st_ = new_state(ModelKind.TWO_STATE, 1, 1)
        st_.amps[:] = 0
        st_.cfg_view()[0, 1, 1] = 1.0  # e0 at phonon 1
        apply_paired_rotation(st_, 0, 2 * pi, 0.0, kind=PulseKind.U_TILDE)
        assert st_.cfg_view()[0, 1, 1] == pytest.approx(-1.0)
