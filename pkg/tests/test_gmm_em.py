import math

import numpy as np
import pytest

import mixselect as ms
from mixselect.gmm import (
    FitOptions,
    MixtureParams,
    MULTIVARIATE_MODELS,
    constraint_violation,
    e_step,
    em_fit,
    log_density,
    m_step,
    one_hot,
)
from mixselect.gmm.covariance import EmptyComponentError

from conftest import two_blob_data


def params_1d(weights, means, variances):
    return MixtureParams(
        weights=np.asarray(weights, float),
        means=np.asarray(means, float)[:, None],
        covariances=np.asarray(variances, float)[:, None, None],
    )


class TestLogDensity:
    def test_standard_normal_at_mode(self):
        p = params_1d([1.0], [0.0], [1.0])
        got = log_density(p, np.array([[0.0]]))
        assert got[0] == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-12)

    def test_matches_direct_summation_oracle(self):
        # Two equal-weight components at +-a; direct summation (no
        # log-sum-exp) is exact at moderate separation.
        a = 3.0
        p = params_1d([0.5, 0.5], [-a, a], [1.0, 1.0])
        xs = np.linspace(-4, 4, 21)[:, None]
        direct = np.log(
            0.5 * np.exp(-0.5 * (xs[:, 0] + a) ** 2) / math.sqrt(2 * math.pi)
            + 0.5 * np.exp(-0.5 * (xs[:, 0] - a) ** 2) / math.sqrt(2 * math.pi))
        assert np.allclose(log_density(p, xs), direct, atol=1e-12)

    def test_near_degenerate_weight_matches_single_component(self):
        p = params_1d([1.0 - 1e-14, 1e-14], [0.0, 50.0], [1.0, 1.0])
        single = params_1d([1.0], [0.0], [1.0])
        xs = np.array([[-1.0], [0.5], [2.0]])
        assert np.allclose(log_density(p, xs), log_density(single, xs),
                           atol=1e-10)

    def test_extreme_separation_is_stable(self):
        p = params_1d([0.5, 0.5], [-500.0, 500.0], [1.0, 1.0])
        vals = log_density(p, np.array([[-500.0], [500.0]]))
        assert np.all(np.isfinite(vals))

    def test_full_covariance_matches_diagonal_path(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(50, 2))
        diag = MixtureParams(np.array([0.4, 0.6]),
                             np.array([[0.0, 0.0], [1.0, 2.0]]),
                             np.array([np.diag([1.0, 2.0]), np.diag([0.5, 1.5])]))
        # same covariances plus an explicit zero off-diagonal entry keeps
        # the general Cholesky path numerically identical
        tiny = diag.covariances.copy()
        tiny[0, 0, 1] = tiny[0, 1, 0] = 1e-18
        full = MixtureParams(diag.weights, diag.means, tiny)
        assert np.allclose(log_density(diag, X), log_density(full, X),
                           rtol=1e-10)


class TestEStep:
    def test_equidistant_point_splits_evenly(self):
        p = params_1d([0.5, 0.5], [-2.0, 2.0], [1.0, 1.0])
        z, _ = e_step(p, np.array([[0.0]]))
        assert np.allclose(z, [[0.5, 0.5]], atol=1e-12)

    def test_single_component_all_ones(self):
        p = params_1d([1.0], [1.0], [2.0])
        z, ll = e_step(p, np.arange(5.0)[:, None])
        assert np.allclose(z, 1.0)
        assert ll == pytest.approx(log_density(p, np.arange(5.0)[:, None]).sum())

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(8)
        p = MixtureParams(
            np.array([0.2, 0.5, 0.3]),
            rng.normal(size=(3, 2)),
            np.stack([np.eye(2), 2 * np.eye(2), np.diag([0.5, 3.0])]),
        )
        z, _ = e_step(p, rng.normal(size=(10, 2)))
        assert np.allclose(z.sum(axis=1), 1.0, atol=1e-12)


class TestMStep:
    def test_hard_labels_vvv_recovers_groupwise_mle(self):
        data, labels = two_blob_data(seed=4)
        p = m_step("VVV", data, one_hot(labels))
        X = data.values
        for g in (0, 1):
            sub = X[labels == g]
            assert np.allclose(p.means[g], sub.mean(axis=0))
            assert np.allclose(p.covariances[g], np.cov(sub.T, bias=True))

    def test_eii_pooled_spherical_oracle(self):
        data, labels = two_blob_data(seed=5)
        p = m_step("EII", data, one_hot(labels))
        X = data.values
        pooled = sum(((X[labels == g] - X[labels == g].mean(axis=0)) ** 2).sum()
                     for g in (0, 1))
        sigma2 = pooled / (X.shape[0] * X.shape[1])
        assert np.allclose(p.covariances, sigma2 * np.eye(2), rtol=1e-12)

    def test_eee_pooled_covariance_oracle(self):
        rng = np.random.default_rng(6)
        base = rng.multivariate_normal([0, 0], [[2.0, 0.8], [0.8, 1.0]], 80)
        X = np.vstack([base[:40], base[40:] + [7.0, 7.0]])
        labels = np.repeat([0, 1], 40)
        p = m_step("EEE", ms.Dataset.from_array(X), one_hot(labels))
        pooled = sum(
            (X[labels == g] - X[labels == g].mean(axis=0)).T
            @ (X[labels == g] - X[labels == g].mean(axis=0))
            for g in (0, 1)) / 80
        assert np.allclose(p.covariances[0], pooled, rtol=1e-10)

    def test_empty_component_rejected(self):
        data, labels = two_blob_data()
        z = one_hot(labels)
        z[:, 1] = 0.0
        with pytest.raises(EmptyComponentError):
            m_step("VVV", data, z)


class TestEmFit:
    def test_separated_blobs_recover_labels(self):
        data, labels = two_blob_data(n_per=50, dist=10, seed=0)
        fit = em_fit(data, 2, "EII", labels)
        assert fit.ok and fit.converged
        assert ms.ari(labels, fit.classification) == 1.0

    def test_g1_closed_form(self):
        rng = np.random.default_rng(12)
        data = ms.Dataset.from_array(rng.normal(2.0, 3.0, (120, 1)))
        fit = em_fit(data, 1, "E", np.zeros(120, dtype=int))
        x = data.values[:, 0]
        want = -0.5 * 120 * (math.log(2 * math.pi * x.var()) + 1)
        assert fit.iterations == 1
        assert fit.loglik == pytest.approx(want, rel=1e-12)
        assert fit.bic == pytest.approx(2 * want - 2 * math.log(120), rel=1e-12)

    def test_degenerate_duplicate_points_fail_cleanly(self):
        X = np.vstack([np.tile([[1.0, 2.0]], (5, 1)),
                       np.random.default_rng(0).normal(5, 1, (20, 2))])
        labels = np.array([0] * 5 + [1] * 20)
        fit = em_fit(ms.Dataset.from_array(X), 2, "VVV", labels)
        assert not fit.ok
        assert fit.error is not None
        assert math.isnan(fit.bic)

    def test_bic_identity_and_classification_rule(self):
        data, labels = two_blob_data(n_per=40, dist=4, seed=9)
        fit = em_fit(data, 2, "VVI", labels)
        assert fit.bic == 2 * fit.loglik - fit.df * math.log(data.n)
        assert np.array_equal(fit.classification, np.argmax(fit.z, axis=1))

    def test_partition_class_count_must_match(self):
        data, labels = two_blob_data()
        fit = em_fit(data, 3, "EII", labels)
        assert not fit.ok


class TestEmProperties:
    def test_monotone_loglik_and_constraints(self):
        # Randomized (data, G, model) grid; loglik may never decrease and
        # every fitted covariance stack must satisfy its pattern.
        rng = np.random.default_rng(77)
        models = list(MULTIVARIATE_MODELS)
        for trial in range(40):
            G = int(rng.integers(1, 4))
            d = int(rng.integers(2, 4))
            centers = rng.normal(0, 4, (G, d))
            X = np.vstack([rng.normal(centers[g], 1.0, (30, d))
                           for g in range(G)])
            labels = np.repeat(np.arange(G), 30)
            model = models[trial % len(models)]
            fit = em_fit(ms.Dataset.from_array(X), G, model, labels)
            if not fit.ok:
                continue
            diffs = np.diff(fit.loglik_trace)
            assert np.all(diffs >= -1e-8), (model, G)
            assert constraint_violation(model, fit.params.covariances) < 1e-8

    def test_vvv_dominates_constrained_models(self):
        data, labels = two_blob_data(n_per=60, dist=6, seed=21)
        opts = FitOptions(tol=1e-8)
        base = em_fit(data, 2, "VVV", labels, opts)
        for model in MULTIVARIATE_MODELS:
            fit = em_fit(data, 2, model, labels, opts)
            assert base.loglik >= fit.loglik - 1e-6, model
