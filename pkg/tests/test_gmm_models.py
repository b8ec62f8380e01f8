import math

import numpy as np
import pytest

from mixselect.gmm import (
    ModelError,
    MULTIVARIATE_MODELS,
    SingularCovarianceError,
    UNIVARIATE_MODELS,
    bic,
    constraint_violation,
    estimate_covariances,
    n_params,
)


class TestNParams:
    def test_published_df_values(self):
        assert n_params("EEV", 5, 4) == 68
        assert n_params("EEV", 4, 4) == 47
        assert n_params("VEI", 12, 3) == 52

    def test_univariate(self):
        assert n_params("E", 1, 1) == 2
        assert n_params("E", 1, 3) == 2 + 3 + 1
        assert n_params("V", 1, 3) == 2 + 3 + 3

    def test_dimension_pairing_enforced(self):
        with pytest.raises(ModelError):
            n_params("E", 2, 1)
        with pytest.raises(ModelError):
            n_params("VVV", 1, 2)

    def test_nesting_orders_param_counts(self):
        # More letters free means at least as many parameters.
        for d in (2, 3, 6):
            for G in (1, 2, 5):
                counts = {m: n_params(m, d, G) for m in MULTIVARIATE_MODELS}
                assert counts["EII"] <= counts["VII"] <= counts["VVI"]
                assert counts["EEI"] <= counts["VEI"] <= counts["VVI"]
                assert counts["EEE"] <= counts["EEV"] <= counts["VEV"] \
                    <= counts["VVV"]

    def test_g1_equivalence_classes(self):
        # With one component the volume/shape letters coincide.
        for d in (2, 4):
            assert n_params("VVV", d, 1) == n_params("EEE", d, 1) \
                == n_params("EEV", d, 1) == n_params("VEV", d, 1)
            assert n_params("EII", d, 1) == n_params("VII", d, 1)
            assert n_params("EEI", d, 1) == n_params("VEI", d, 1) \
                == n_params("EVI", d, 1) == n_params("VVI", d, 1)


class TestBic:
    def test_published_values(self):
        assert bic(-1241.006, 68, 200) == pytest.approx(-2842.298, abs=0.01)
        assert bic(-392.9397, 52, 43) == pytest.approx(-981.4619, abs=0.01)

    def test_log_one_is_zero(self):
        assert bic(0.0, 0, 1) == 0.0

    def test_n_validation(self):
        with pytest.raises(ValueError):
            bic(0.0, 1, 0)


def hard_scatter(X, labels, G):
    """Per-group scatter matrices and counts from hard labels."""
    d = X.shape[1]
    W = np.zeros((G, d, d))
    ng = np.zeros(G)
    for g in range(G):
        sub = X[labels == g]
        ng[g] = len(sub)
        c = sub - sub.mean(axis=0)
        W[g] = c.T @ c
    return W, ng


@pytest.fixture(scope="module")
def scatter_setup():
    rng = np.random.default_rng(10)
    X = np.vstack([
        rng.normal(0, 1, (40, 3)) * [1.0, 2.0, 0.5],
        rng.normal(6, 1, (60, 3)) * [2.0, 1.0, 1.0],
    ])
    labels = np.repeat([0, 1], [40, 60])
    W, ng = hard_scatter(X, labels, 2)
    return X, labels, W, ng


class TestEstimators:
    def test_vvv_is_group_mle(self, scatter_setup):
        X, labels, W, ng = scatter_setup
        covs = estimate_covariances("VVV", W, ng)
        for g in range(2):
            sub = X[labels == g]
            want = np.cov(sub.T, bias=True)
            assert np.allclose(covs[g], want, rtol=1e-10)

    def test_eii_pooled_spherical(self, scatter_setup):
        X, labels, W, ng = scatter_setup
        covs = estimate_covariances("EII", W, ng)
        lam = (W[0].trace() + W[1].trace()) / (100 * 3)
        assert np.allclose(covs, lam * np.eye(3))

    def test_eee_pooled_covariance(self, scatter_setup):
        X, labels, W, ng = scatter_setup
        covs = estimate_covariances("EEE", W, ng)
        pooled = (W[0] + W[1]) / 100
        assert np.allclose(covs[0], pooled) and np.allclose(covs[1], pooled)

    def test_all_models_satisfy_their_constraints(self, scatter_setup):
        _, _, W, ng = scatter_setup
        for model in MULTIVARIATE_MODELS:
            covs = estimate_covariances(model, W, ng)
            assert constraint_violation(model, covs) < 1e-8, model

    def test_univariate_models(self):
        rng = np.random.default_rng(2)
        X = np.concatenate([rng.normal(0, 1, 30), rng.normal(5, 3, 70)])[:, None]
        labels = np.repeat([0, 1], [30, 70])
        W, ng = hard_scatter(X, labels, 2)
        v = estimate_covariances("V", W, ng)
        assert v[0, 0, 0] == pytest.approx(X[:30].var(), rel=1e-10)
        e = estimate_covariances("E", W, ng)
        pooled = (W[0, 0, 0] + W[1, 0, 0]) / 100
        assert e[0, 0, 0] == pytest.approx(pooled, rel=1e-10)
        assert e[1, 0, 0] == e[0, 0, 0]

    def test_degenerate_scatter_fails_loudly(self):
        W = np.zeros((2, 2, 2))
        ng = np.array([3.0, 4.0])
        with pytest.raises(SingularCovarianceError):
            estimate_covariances("VVV", W, ng)
        with pytest.raises(SingularCovarianceError):
            estimate_covariances("EII", W, ng)

    def test_vei_vev_volume_shape_split(self, scatter_setup):
        _, _, W, ng = scatter_setup
        for model in ("VEI", "VEV"):
            covs = estimate_covariances(model, W, ng)
            vals = np.linalg.eigvalsh(covs)
            vols = np.exp(np.log(vals).sum(axis=1) / 3)
            shapes = np.sort(vals / vols[:, None], axis=1)
            assert np.allclose(shapes[0], shapes[1], rtol=1e-6), model
