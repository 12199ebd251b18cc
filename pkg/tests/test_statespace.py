import numpy as np
import pytest

from ionsim import (CapacityError, ContractViolation, DegenerateStateError,
                    ModelKind, inner_product, measure_qubit, new_state,
                    probability_of_value, read_state_dump, renormalize,
                    squared_norm, storage_length, write_state_dump)
from ionsim.errors import RngStream
from ionsim.statespace import clear_excited, support_mask


class TestStorage:
    @pytest.mark.parametrize("m", range(1, 14))
    def test_length_formulas(self, m):
        assert storage_length(ModelKind.THREE_STATE, m) == 2 * 3**m
        assert storage_length(ModelKind.TWO_STATE, m) == 2 ** (m + 2)

    def test_three_state_m1_initial(self):
        st = new_state(ModelKind.THREE_STATE, 1, 0)
        assert st.amps.shape == (6,)
        assert st.amps[0] == 1.0
        assert np.count_nonzero(st.amps) == 1

    def test_two_state_m2_bits(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0b10)
        assert st.amps.shape == (16,)
        # qubit 1 set, phonon 0, main plane -> config 2, position 4
        assert st.amps[4] == 1.0
        assert np.count_nonzero(st.amps) == 1

    def test_f21_three_state_size(self):
        st = new_state(ModelKind.THREE_STATE, 11, 0)
        assert st.amps.size == 354294

    def test_memory_cap(self, monkeypatch):
        monkeypatch.setenv("IONSIM_MEM_CAP_BYTES", "1024")
        with pytest.raises(CapacityError):
            new_state(ModelKind.TWO_STATE, 8, 0)

    def test_index_roundtrip(self):
        # every position decodes to unique digits and re-encodes to itself
        for m in range(1, 5):
            st = new_state(ModelKind.THREE_STATE, m, 0)
            seen = set()
            for pos in range(st.amps.size):
                cfg, ph = divmod(pos, 2)
                digits = tuple((cfg // 3**q) % 3 for q in range(m))
                assert sum(d * 3**q for q, d in enumerate(digits)) == cfg
                seen.add((digits, ph))
            assert len(seen) == st.amps.size
        for m in range(1, 7):
            st = new_state(ModelKind.TWO_STATE, m, 0)
            assert st.amps.size == 2 ** (m + 2)


class TestNormsAndProducts:
    def test_inner_product_unit(self):
        st = new_state(ModelKind.THREE_STATE, 2, 0b01)
        assert inner_product(st, st) == pytest.approx(1.0, abs=1e-14)

    def test_inner_product_orthogonal(self):
        a = new_state(ModelKind.TWO_STATE, 2, 0)
        b = new_state(ModelKind.TWO_STATE, 2, 1)
        assert inner_product(a, b) == 0.0

    def test_inner_product_linearity(self):
        a = new_state(ModelKind.TWO_STATE, 3, 5)
        b = a.copy()
        b.amps *= 0.9
        assert inner_product(a, b) == pytest.approx(0.9, abs=1e-14)

    def test_inner_product_matches_norm(self):
        rng = np.random.default_rng(1)
        st = new_state(ModelKind.THREE_STATE, 3, 0)
        st.amps[:] = rng.normal(size=st.amps.size) + 1j * rng.normal(size=st.amps.size)
        ip = inner_product(st, st)
        assert ip.imag == pytest.approx(0.0, abs=1e-14)
        assert ip.real == pytest.approx(squared_norm(st), abs=1e-12)

    def test_mismatch_rejected(self):
        a = new_state(ModelKind.TWO_STATE, 2, 0)
        b = new_state(ModelKind.TWO_STATE, 3, 0)
        with pytest.raises(ContractViolation):
            inner_product(a, b)

    def test_renormalize(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0)
        st.amps *= 0.5
        factor = renormalize(st)
        assert factor == pytest.approx(2.0)
        assert squared_norm(st) == pytest.approx(1.0, abs=1e-12)

    def test_renormalize_zero_state(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0)
        st.amps[:] = 0.0
        with pytest.raises(DegenerateStateError):
            renormalize(st)


class TestMeasurement:
    def test_definite_outcome(self):
        st = new_state(ModelKind.THREE_STATE, 2, 0b10)
        rng = RngStream(0)
        assert measure_qubit(st, 1, rng) == 1
        assert measure_qubit(st, 0, rng) == 0
        assert squared_norm(st) == pytest.approx(1.0, abs=1e-12)

    def test_collapse_zeroes_branch(self):
        st = new_state(ModelKind.TWO_STATE, 1, 0)
        st.amps[:] = 0
        st.amps[0] = st.amps[2] = 1 / np.sqrt(2)  # (|0> + |1>)/sqrt2, phonon 0
        outcome = measure_qubit(st, 0, RngStream(3))
        view = st.digit_view(0)
        assert np.abs(view[:, :, 1 - outcome]).max() == 0.0
        assert squared_norm(st) == pytest.approx(1.0, abs=1e-12)

    def test_born_statistics(self):
        # 10^4 seeded trials on an equal superposition: binomial 3-sigma window
        hits = 0
        n = 10_000
        rng = RngStream(77)
        for _ in range(n):
            st = new_state(ModelKind.TWO_STATE, 1, 0)
            st.amps[:] = 0
            st.amps[0] = st.amps[2] = 1 / np.sqrt(2)
            hits += measure_qubit(st, 0, rng)
        sigma = np.sqrt(n * 0.25)
        assert abs(hits - n / 2) < 3 * sigma

    def test_norm_never_grows(self):
        st = new_state(ModelKind.THREE_STATE, 1, 0)
        st.amps[0] = np.sqrt(0.5)
        st.amps[2] = np.sqrt(0.5)
        measure_qubit(st, 0, RngStream(5))
        assert squared_norm(st) <= 1 + 1e-12

    def test_aux_amplitude_rejected(self):
        st = new_state(ModelKind.THREE_STATE, 1, 0)
        st.amps[:] = 0
        st.amps[2 * 2] = 1.0  # digit e1
        with pytest.raises(ContractViolation):
            measure_qubit(st, 0, RngStream(0))


class TestMarginals:
    def test_basis_state(self):
        st = new_state(ModelKind.TWO_STATE, 4, 0b1010, registers={"A": range(0, 4)})
        assert probability_of_value(st, "A", 0b1010) == pytest.approx(1.0)
        assert probability_of_value(st, "A", 0) == 0.0

    def test_uniform_two_qubits(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0)
        st.amps[:] = 0
        st.amps[[0, 2, 4, 6]] = 0.5  # main plane, phonon 0
        for v in range(4):
            assert probability_of_value(st, range(0, 2), v) == pytest.approx(0.25)

    def test_three_state_marginal(self):
        st = new_state(ModelKind.THREE_STATE, 2, 0b11)
        assert probability_of_value(st, range(0, 2), 3) == pytest.approx(1.0)

    def test_value_out_of_range(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0)
        with pytest.raises(ContractViolation):
            probability_of_value(st, range(0, 1), 2)


class TestHelpers:
    def test_clear_excited(self):
        st = new_state(ModelKind.TWO_STATE, 2, 0)
        st.amps[:] = 0
        st.amps[0] = st.amps[2] = 1 / np.sqrt(2)  # qubit 0 superposition
        removed = clear_excited(st, 0)
        assert removed == pytest.approx(0.5)
        assert squared_norm(st) == pytest.approx(0.5)

    def test_support_mask(self):
        st = new_state(ModelKind.TWO_STATE, 2, 1)
        mask = support_mask(st)
        assert mask.sum() == 1 and mask[2]

    def test_state_dump_roundtrip(self, tmp_path):
        st = new_state(ModelKind.THREE_STATE, 2, 0b01)
        st.amps[3] = 0.25 - 0.5j
        path = tmp_path / "state.bin"
        write_state_dump(st, path)
        back = read_state_dump(path)
        assert back.model is st.model and back.num_qubits == 2
        np.testing.assert_array_equal(back.amps, st.amps)
        with open(path, "rb") as fh:
            assert fh.read(8) == b"IONSIM01"
