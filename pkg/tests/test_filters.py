import numpy as np
import pytest

from l2plus import StateSpace, augment, build_filter
from l2plus.errors import DimensionMismatch, InvalidAlpha, NegativeDegree
from l2plus.filters import filter_as_system
from l2plus.lti import is_hurwitz, is_internally_positive, is_metzler
from l2plus.simulate import SampledSignal, simulate

from conftest import random_positive_system


def test_degree_two_single_channel():
    filt = build_filter(-1.0, 2, 1)
    np.testing.assert_array_equal(filt.A_p, [[-1.0, 1.0], [0.0, -1.0]])
    np.testing.assert_array_equal(filt.B_p, [[0.0], [1.0]])


def test_full_size_filter_bank():
    filt = build_filter(-0.8, 15, 3)
    assert filt.A_p.shape == (45, 45)
    assert filt.B_p.shape == (45, 3)
    assert is_metzler(filt.A_p)
    assert is_hurwitz(filt.A_p)
    assert np.all(filt.B_p >= 0.0)
    # only the last block row of B_p is populated, with identity
    np.testing.assert_array_equal(filt.B_p[-3:], np.eye(3))
    assert np.all(filt.B_p[:-3] == 0.0)


def test_degree_zero_empty():
    filt = build_filter(-1.0, 0, 2)
    assert filt.n_p == 0
    assert filt.A_p.shape == (0, 0)
    assert filt.B_p.shape == (0, 2)


def test_invalid_parameters():
    with pytest.raises(InvalidAlpha):
        build_filter(0.0, 3, 1)
    with pytest.raises(NegativeDegree):
        build_filter(-1.0, -1, 1)


class TestAugment:
    def test_degree_zero_identity(self, example6):
        aug = augment(example6, build_filter(-1.0, 0, 3))
        np.testing.assert_array_equal(aug.A_a, example6.A)
        np.testing.assert_array_equal(aug.B_a, example6.B)
        np.testing.assert_array_equal(aug.C_a, example6.C)
        np.testing.assert_array_equal(aug.D_a, example6.D)

    def test_example6_block_sizes(self, example6):
        aug = augment(example6, build_filter(-0.8, 15, 3))
        assert aug.A_a.shape == (51, 51)
        assert aug.B_a.shape == (51, 3)
        assert aug.C_a.shape == (3, 51)
        assert (aug.n, aug.n_p, aug.n_w) == (6, 45, 3)

    def test_eigenvalues_are_union(self, example6):
        alpha, degree = -0.9, 4
        aug = augment(example6, build_filter(alpha, degree, 3))
        eigs = np.sort_complex(np.linalg.eigvals(aug.A_a))
        expected = np.sort_complex(
            np.concatenate([np.linalg.eigvals(example6.A), np.full(degree * 3, alpha)])
        )
        np.testing.assert_allclose(eigs, expected, atol=1e-8)

    def test_wrong_channel_count(self, example6):
        with pytest.raises(DimensionMismatch):
            augment(example6, build_filter(-1.0, 2, 2))

    def test_positive_system_stays_positive(self, pos_g2):
        aug = augment(pos_g2, build_filter(-0.5, 3, pos_g2.n_w))
        joined = StateSpace(aug.A_a, aug.B_a, aug.C_a, aug.D_a)
        assert is_internally_positive(joined)


@pytest.mark.parametrize("seed", range(3))
def test_filter_response_nonnegative(seed):
    rng = np.random.default_rng(seed)
    filt = build_filter(-0.7, 3, 2)
    fsys = filter_as_system(filt)
    t = np.arange(0.0, 20.0, 0.01)
    w = np.maximum(rng.standard_normal((t.size, 2)), 0.0)
    z = simulate(fsys, SampledSignal(w, 0.01))
    assert z.values.min() >= -1e-9


def test_positive_random_augmentation_stays_positive():
    rng = np.random.default_rng(7)
    sys = random_positive_system(rng)
    aug = augment(sys, build_filter(-1.1, 2, sys.n_w))
    assert is_internally_positive(StateSpace(aug.A_a, aug.B_a, aug.C_a, aug.D_a))
