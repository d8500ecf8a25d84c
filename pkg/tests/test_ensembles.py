import numpy as np
import pytest

from matprodlab import ensembles
from matprodlab.ensembles import (
    SampleStream,
    draw,
    ensemble_bound,
    ensemble_mean,
    enumerate_outcomes,
    rank_one_sphere,
    scalar_uniform,
    sign_perturbation,
    substream,
    two_point,
)
from matprodlab.linalg import mat_pow, spectral_norm
from matprodlab.products import z_product

from conftest import random_matrix


def all_kinds(rng, seed=11):
    a = random_matrix(rng, 3, norm=0.9)
    b = random_matrix(rng, 3, norm=0.6)
    x0 = random_matrix(rng, 3, norm=0.4)
    p = random_matrix(rng, 3, norm=0.2)
    return [
        two_point(a, b, seed=seed),
        sign_perturbation(x0, p, seed=seed),
        rank_one_sphere(4, 1.3, seed=seed),
        scalar_uniform(-0.7, 1.1, seed=seed),
    ]


class TestMeanAndBound:
    def test_two_point_symmetric_pair_has_zero_mean(self, rng):
        a = random_matrix(rng, 2)
        spec = two_point(a, -a)
        assert np.abs(ensemble_mean(spec)).max() == 0.0

    def test_two_point_bound_is_max_norm(self):
        spec = two_point(np.array([[1.0]]), np.array([[-1.0]]))
        assert ensemble_bound(spec) == pytest.approx(1.0, abs=1e-12)

    def test_sign_perturbation_mean_and_bound(self, rng):
        x0 = random_matrix(rng, 2, norm=0.5)
        b = random_matrix(rng, 2, norm=0.25)
        spec = sign_perturbation(x0, b)
        assert np.array_equal(ensemble_mean(spec), x0)
        assert ensemble_bound(spec) == pytest.approx(0.75, abs=1e-10)

    def test_sphere_mean_is_scaled_identity(self):
        spec = rank_one_sphere(2, 1.0)
        assert np.abs(ensemble_mean(spec) - 0.5 * np.eye(2)).max() <= 1e-15

    def test_sphere_mean_monte_carlo(self):
        # E[v v^T] = I/d checked against a large sample, 3-sigma entrywise
        spec = rank_one_sphere(2, 1.0, seed=99)
        n = 10**6
        xs = draw(SampleStream(spec), n)
        emp = xs.mean(axis=0)
        # entries of v v^T lie in [-1, 1]; entry std is below 0.5
        tol = 3 * 0.5 / np.sqrt(n)
        assert np.abs(emp - 0.5 * np.eye(2)).max() <= tol

    def test_sphere_bound(self):
        assert ensemble_bound(rank_one_sphere(3, 2.0)) == pytest.approx(4.0)

    def test_scalar_uniform_mean_and_bound(self):
        spec = scalar_uniform(-1.0, 1.0)
        assert ensemble_mean(spec)[0, 0] == 0.0
        assert ensemble_bound(spec) == 1.0


class TestDraw:
    def test_two_point_support(self, rng):
        a = random_matrix(rng, 2)
        b = random_matrix(rng, 2)
        spec = two_point(a, b, seed=5)
        xs = draw(SampleStream(spec), 200)
        for x in xs:
            assert np.array_equal(x, a) or np.array_equal(x, b)

    def test_same_seed_same_draws(self, rng):
        for spec in all_kinds(rng):
            xs1 = draw(SampleStream(spec), 50)
            xs2 = draw(SampleStream(spec), 50)
            assert np.array_equal(xs1, xs2)

    def test_interleaving_does_not_shift_draws(self, rng):
        for spec in all_kinds(rng):
            whole = draw(SampleStream(spec), 30)
            s = SampleStream(spec)
            pieces = np.concatenate([draw(s, 11), draw(s, 4), draw(s, 15)])
            assert np.array_equal(whole, pieces)

    def test_clone_replays_future(self, rng):
        spec = rank_one_sphere(3, 1.0, seed=1)
        s = SampleStream(spec)
        draw(s, 17)
        c = s.clone()
        assert np.array_equal(draw(s, 9), draw(c, 9))

    def test_norm_bound_holds_on_every_draw(self, rng):
        for spec in all_kinds(rng):
            bound = ensemble_bound(spec)
            xs = draw(SampleStream(spec), 1000)
            norms = [spectral_norm(x) for x in xs]
            assert max(norms) <= bound + 1e-12

    def test_empirical_mean_clt_scale(self, rng):
        n = 10**5
        for spec in all_kinds(rng):
            xs = draw(SampleStream(spec), n)
            emp = xs.mean(axis=0)
            want = ensemble_mean(spec)
            tol = 4 * ensemble_bound(spec) / np.sqrt(n)
            assert np.abs(emp - want).max() <= tol

    def test_substream_changes_with_tags(self, rng):
        spec = rank_one_sphere(2, 1.0, seed=3)
        a = draw(substream(spec, 1, 0), 5)
        b = draw(substream(spec, 1, 1), 5)
        assert not np.array_equal(a, b)


class TestEnumerateOutcomes:
    def test_single_step(self, rng):
        a = random_matrix(rng, 2)
        b = random_matrix(rng, 2)
        outcomes = enumerate_outcomes(two_point(a, b), 1)
        assert len(outcomes) == 2
        assert all(p == 0.5 for p, _ in outcomes)

    def test_probabilities_sum_exactly_to_one(self, rng):
        spec = two_point(random_matrix(rng, 2), random_matrix(rng, 2))
        outcomes = enumerate_outcomes(spec, 6)
        assert len(outcomes) == 64
        assert sum(p for p, _ in outcomes) == 1.0

    def test_exact_expected_product_matches_mean_power(self, rng):
        spec = two_point(
            random_matrix(rng, 2, norm=0.8), random_matrix(rng, 2, norm=0.5)
        )
        n = 6
        avg = np.zeros((2, 2))
        for p, seq in enumerate_outcomes(spec, n):
            avg += p * z_product(seq)
        want = mat_pow(np.eye(2) + ensemble_mean(spec) / n, n)
        assert np.abs(avg - want).max() <= 1e-12

    def test_exhaustive_matches_monte_carlo_5_sigma(self, rng):
        # fixed-degree product statistic: an entry of the full product Z_5
        spec = two_point(
            random_matrix(rng, 2, norm=0.7), random_matrix(rng, 2, norm=0.4), seed=21
        )
        n, trials = 5, 20000
        exact = np.zeros((2, 2))
        for p, seq in enumerate_outcomes(spec, n):
            exact += p * z_product(seq)
        samples = np.empty((trials, 2, 2))
        for t in range(trials):
            samples[t] = z_product(draw(substream(spec, n, t), n))
        gap = np.abs(samples.mean(axis=0) - exact)
        sigma = samples.std(axis=0) / np.sqrt(trials)
        assert (gap <= 5 * sigma + 1e-12).all()

    def test_infinite_support_rejected(self):
        with pytest.raises(ValueError, match="support"):
            enumerate_outcomes(rank_one_sphere(2, 1.0), 3)

    def test_cap_enforced(self, rng):
        spec = two_point(random_matrix(rng, 1), random_matrix(rng, 1))
        with pytest.raises(ValueError, match="cap"):
            enumerate_outcomes(spec, 21)


class TestValidation:
    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(ValueError):
            two_point(random_matrix(rng, 2), random_matrix(rng, 3))

    def test_scalar_uniform_needs_ordered_interval(self):
        with pytest.raises(ValueError):
            scalar_uniform(1.0, -1.0)

    def test_sphere_needs_positive_radius(self):
        with pytest.raises(ValueError):
            rank_one_sphere(2, 0.0)
