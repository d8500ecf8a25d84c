import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matprodlab.linalg import expm, mat_mul, mat_pow, spectral_norm

from conftest import random_matrix


def naive_matmul(a, b):
    """Triple-loop product, the oracle for mat_mul."""
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for q in range(a.shape[1]):
                acc += a[i, q] * b[q, j]
            out[i, j] = acc
    return out


class TestMatMul:
    def test_identity(self, rng):
        a = rng.normal(size=(2, 2))
        assert np.array_equal(mat_mul(np.eye(2), a), a)

    def test_nilpotent_square_vanishes(self):
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(mat_mul(n, n), np.zeros((2, 2)))

    def test_matches_triple_loop_oracle(self, rng):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        assert np.abs(mat_mul(a, b) - naive_matmul(a, b)).max() <= 1e-14

    def test_rectangular_shapes(self, rng):
        a = rng.normal(size=(2, 4))
        b = rng.normal(size=(4, 3))
        assert mat_mul(a, b).shape == (2, 3)

    def test_dimension_mismatch_raises(self, rng):
        with pytest.raises(ValueError, match="mismatch"):
            mat_mul(rng.normal(size=(2, 3)), rng.normal(size=(2, 3)))

    def test_nonfinite_rejected(self):
        bad = np.array([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(ValueError, match="finite"):
            mat_mul(bad, np.eye(2))


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(5)) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_takes_max_abs(self):
        assert spectral_norm(np.diag([3.0, -1.0])) == pytest.approx(3.0, abs=1e-12)

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((3, 3))) == 0.0

    def test_matches_svd_oracle(self, rng):
        for _ in range(25):
            a = rng.normal(size=(6, 6))
            top = np.linalg.svd(a, compute_uv=False)[0]
            assert abs(spectral_norm(a) - top) <= 1e-9

    def test_rectangular(self, rng):
        a = rng.normal(size=(3, 7))
        top = np.linalg.svd(a, compute_uv=False)[0]
        assert abs(spectral_norm(a) - top) <= 1e-9

    def test_transpose_invariance(self, rng):
        for _ in range(10):
            a = rng.normal(size=(5, 5))
            assert abs(spectral_norm(a) - spectral_norm(a.T)) <= 1e-10

    def test_clustered_singular_values(self):
        # power iteration cannot separate these; the eigh fallback must
        q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(4, 4)))
        a = q @ np.diag([2.0, 2.0 * (1 - 1e-13), 1.0, 0.5]) @ q.T
        assert abs(spectral_norm(a) - 2.0) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(
        a=arrays(np.float64, (4, 4), elements=st.floats(-3, 3)),
        b=arrays(np.float64, (4, 4), elements=st.floats(-3, 3)),
    )
    def test_submultiplicative(self, a, b):
        assert spectral_norm(a @ b) <= spectral_norm(a) * spectral_norm(b) + 1e-9


class TestExpm:
    def test_zero_is_identity(self):
        assert np.array_equal(expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal_matches_scalar_exp(self):
        x = np.diag([-2.0, 0.3, 1.7])
        got = expm(x)
        want = np.diag(np.exp([-2.0, 0.3, 1.7]))
        assert np.abs(np.diag(got) - np.diag(want)).max() <= 1e-13 * np.abs(np.diag(want)).max()
        off = got - np.diag(np.diag(got))
        assert np.abs(off).max() <= 1e-14

    def test_nilpotent_series_terminates(self):
        x = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert np.abs(expm(x) - np.array([[1.0, 1.0], [0.0, 1.0]])).max() <= 1e-15

    def test_matches_scipy_up_to_norm_ten(self, rng):
        for target in (0.5, 2.0, 5.0, 10.0):
            x = random_matrix(rng, 5, norm=target)
            got = expm(x)
            want = scipy.linalg.expm(x)
            assert np.abs(got - want).max() <= 1e-12 * max(1.0, np.abs(want).max())

    def test_nonsquare_raises(self, rng):
        with pytest.raises(ValueError, match="square"):
            expm(rng.normal(size=(2, 3)))


class TestMatPow:
    def test_zeroth_power_is_identity(self, rng):
        x = rng.normal(size=(3, 3))
        assert np.array_equal(mat_pow(x, 0), np.eye(3))

    def test_scalar_power(self):
        assert mat_pow(np.array([[2.0]]), 10)[0, 0] == 1024.0

    def test_matches_iterated_multiply_oracle(self, rng):
        x = rng.normal(size=(4, 4))
        want = np.eye(4)
        for _ in range(7):
            want = x @ want
        got = mat_pow(x, 7)
        assert np.abs(got - want).max() <= 1e-12 * max(1.0, np.abs(want).max())

    def test_negative_exponent_raises(self, rng):
        with pytest.raises(ValueError, match="nonnegative"):
            mat_pow(rng.normal(size=(2, 2)), -1)

    def test_nonsquare_raises(self, rng):
        with pytest.raises(ValueError, match="square"):
            mat_pow(rng.normal(size=(2, 3)), 2)
