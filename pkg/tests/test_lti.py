import math

import numpy as np
import pytest

from l2plus import StateSpace, hinf_norm, subtract
from l2plus.errors import DimensionMismatch, NonFiniteEntry, UnstableSystem
from l2plus.lti import (
    freq_response,
    freq_response_many,
    is_externally_positive_sampled,
    is_hurwitz,
    is_internally_positive,
    is_metzler,
    system_from_dict,
    system_to_dict,
)

from conftest import random_positive_system, random_stable_system


class TestValidation:
    def test_example6_dimensions(self, example6):
        assert (example6.n, example6.n_w, example6.n_z) == (6, 3, 3)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            StateSpace(np.zeros((2, 2)), np.zeros((3, 1)), np.zeros((1, 2)), np.zeros((1, 1)))

    def test_nonsquare_a(self):
        with pytest.raises(DimensionMismatch):
            StateSpace(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)), np.zeros((1, 1)))

    def test_static_system(self):
        sys = StateSpace([], [], [], [[1.0, -1.0]])
        assert (sys.n, sys.n_w, sys.n_z) == (0, 2, 1)
        assert sys.A.shape == (0, 0)
        assert sys.B.shape == (0, 2)
        assert sys.C.shape == (1, 0)

    def test_nan_rejected(self):
        with pytest.raises(NonFiniteEntry):
            StateSpace([[np.nan]], [[1.0]], [[1.0]], [[0.0]])

    def test_roundtrip_json_dict(self, example6):
        again = system_from_dict(system_to_dict(example6))
        np.testing.assert_array_equal(again.A, example6.A)
        np.testing.assert_array_equal(again.D, example6.D)

    def test_static_roundtrip(self):
        sys = StateSpace([], [], [], [[1.0, -1.0]])
        again = system_from_dict(system_to_dict(sys))
        assert (again.n, again.n_w, again.n_z) == (0, 2, 1)


class TestStabilityChecks:
    def test_scalar_hurwitz(self):
        assert is_hurwitz(np.array([[-1.0]]))

    def test_oscillator_not_hurwitz(self):
        assert not is_hurwitz(np.array([[0.0, 1.0], [-1.0, 0.0]]))

    def test_positive_fixture_stable(self, pos_g1):
        # diagonally dominant Metzler with negative diagonal
        assert np.linalg.eigvals(pos_g1.A).real.max() < 0
        assert is_hurwitz(pos_g1.A)

    def test_metzler(self, pos_g2):
        assert is_metzler(pos_g2.A)
        assert not is_metzler(np.array([[-1.0, -0.1], [0.0, -1.0]]))
        assert is_metzler(np.diag([-3.0, 1.0]))


class TestPositivity:
    def test_fixture_internally_positive(self, pos_g1, pos_g2, pos_g3):
        for sys in (pos_g1, pos_g2, pos_g3):
            assert is_internally_positive(sys)

    def test_difference_not_internally_positive(self, pos_g1, pos_g2):
        assert not is_internally_positive(subtract(pos_g1, pos_g2))

    def test_static_sign_indefinite(self):
        assert not is_internally_positive(StateSpace([], [], [], [[1.0, -1.0]]))

    def test_external_positive_fixture(self, pos_g2):
        assert is_externally_positive_sampled(pos_g2, horizon=20.0, step=0.02)

    def test_external_first_order(self, first_order):
        assert is_externally_positive_sampled(first_order, horizon=20.0, step=0.01)

    def test_difference_not_externally_positive(self, pos_g1, pos_g3):
        err = subtract(pos_g1, pos_g3)
        assert not is_externally_positive_sampled(err, horizon=50.0, step=0.01)

    def test_unstable_rejected(self):
        sys = StateSpace([[1.0]], [[1.0]], [[1.0]], [[0.0]])
        with pytest.raises(UnstableSystem):
            is_externally_positive_sampled(sys)

    @pytest.mark.parametrize("seed", range(5))
    def test_internal_implies_external_sampled(self, seed):
        rng = np.random.default_rng(seed)
        sys = random_positive_system(rng)
        assert is_internally_positive(sys)
        assert is_externally_positive_sampled(sys, horizon=30.0, step=0.05)


class TestFreqResponse:
    def test_dc_gain(self, first_order):
        np.testing.assert_allclose(freq_response(first_order, 0.0), [[1.0]], atol=1e-14)

    def test_corner_frequency(self, first_order):
        g = freq_response(first_order, 1.0)[0, 0]
        np.testing.assert_allclose(g, 1.0 / (1.0 + 1j), rtol=1e-14)
        assert abs(abs(g) - 1.0 / math.sqrt(2.0)) < 1e-14

    def test_example6_peak_value(self, example6):
        sigma = np.linalg.svd(freq_response(example6, 0.1654), compute_uv=False)[0]
        assert abs(sigma - 7.0667) < 1e-3

    def test_high_frequency_approaches_d(self, example6):
        g = freq_response(example6, 1e9)
        tol = 1e-6 * np.linalg.norm(example6.D) + 1e-6
        assert np.abs(g - example6.D).max() < tol

    @pytest.mark.parametrize("seed", range(5))
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        sys = random_stable_system(rng)
        for omega in (0.1, 1.0, 17.3):
            gp = freq_response(sys, omega)
            gm = freq_response(sys, -omega)
            np.testing.assert_allclose(gm, gp.conj(), rtol=1e-12, atol=1e-14)

    def test_batched_matches_single(self, example6):
        omegas = np.array([0.0, 0.3, 2.0, 50.0])
        batch = freq_response_many(example6, omegas)
        for k, w in enumerate(omegas):
            np.testing.assert_allclose(batch[k], freq_response(example6, w), rtol=1e-12)


class TestSubtract:
    def test_self_difference_is_zero(self, example6):
        err = subtract(example6, example6)
        assert hinf_norm(err).gain <= 1e-8

    def test_reference_difference_norms(self, pos_g1, pos_g2, pos_g3):
        g12 = hinf_norm(subtract(pos_g1, pos_g2)).gain
        g13 = hinf_norm(subtract(pos_g1, pos_g3)).gain
        assert abs(g12 - 12.43) / 12.43 < 0.01
        assert abs(g13 - 15.69) / 15.69 < 0.01

    def test_incompatible_sizes(self, example6, pos_g1):
        with pytest.raises(DimensionMismatch):
            subtract(example6, pos_g1)

    @pytest.mark.parametrize("seed", range(5))
    def test_self_difference_random(self, seed):
        rng = np.random.default_rng(100 + seed)
        sys = random_stable_system(rng)
        assert hinf_norm(subtract(sys, sys)).gain <= 1e-8
