"""Seeded generators for the synthetic benchmark families.

Four families are covered:

* maugis1/4/5/7: ten columns where only the first two carry cluster
  structure (a four-component bivariate Gaussian mixture); the other eight
  are linear in the first two plus noise, with coupling matrix and noise
  covariance chosen per scenario.
* wt: five informative spherical-Gaussian columns over three groups plus
  twenty independent standard-normal noise columns.
* twovar5 / twovar10: a two-component bivariate mixture padded with
  correlated copies and pure-noise columns, in five and ten column layouts.

All generators are deterministic in their seed, using numpy's PCG64
streams; multivariate normals are sampled through the lower-triangular
Cholesky factor of the requested covariance. Labels are 0-based in memory
(and 1-based in any text output written by the front end).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import Dataset, VariableSet, default_names

SCENARIOS = ("maugis1", "maugis4", "maugis5", "maugis7",
             "wt", "twovar5", "twovar10")


@dataclass(frozen=True)
class ScenarioSpec:
    """One synthetic dataset request: family, size parameter, seed.

    For the wt family `size` counts rows per group; elsewhere it is the
    total number of rows.
    """

    id: str
    size: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.id not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.id!r}")
        if self.size < 1:
            raise ValueError("size parameter must be >= 1")


def _mvnorm(rng, mean, cov, size):
    mean = np.asarray(mean, dtype=float)
    L = np.linalg.cholesky(np.asarray(cov, dtype=float))
    z = rng.standard_normal((size, mean.shape[0]))
    return mean + z @ L.T


_MAUGIS_MEANS = np.array([[-2.0, -2.0], [-2.0, 2.0], [2.0, -2.0], [2.0, 2.0]])
_MAUGIS_WEIGHTS = np.array([0.3, 0.2, 0.3, 0.2])


def _maugis_params(variant: int):
    beta = np.zeros((2, 8))
    omega = np.ones(8)
    if variant == 4:
        beta[:, :2] = [[0.5, 0.0], [0.0, 1.0]]
    elif variant == 5:
        beta[:, :4] = [[0.5, 0.0, 2.0, 0.0], [0.0, 1.0, 0.0, 3.0]]
        omega[2:4] = 0.5
    elif variant == 7:
        beta[:] = [[0.5, 0.0, 2.0, 0.0, 2.0, 0.5, 2.0, 0.0],
                   [0.0, 1.0, 0.0, 3.0, 0.5, 1.0, 0.0, 3.0]]
        omega[2:6] = 0.5
    elif variant != 1:
        raise ValueError(f"unsupported maugis scenario {variant}")
    return beta, omega


def gen_maugis(variant: int, n: int, seed: int = 0):
    """Scenario data with two clustering columns among ten.

    Rows are drawn from four bivariate Gaussians at (+-2, +-2) with mixing
    probabilities (.3, .2, .3, .2); columns 3..10 follow the linear model
    X[, 3:10] = X[, 1:2] @ beta + noise for the scenario's beta and
    diagonal noise covariance.

    Returns (Dataset, labels in 0..3, true clustering VariableSet {0, 1}).
    """
    beta, omega = _maugis_params(variant)
    rng = np.random.default_rng(seed)
    labels = rng.choice(4, size=n, p=_MAUGIS_WEIGHTS)
    X = np.empty((n, 10))
    X[:, :2] = _MAUGIS_MEANS[labels] + rng.standard_normal((n, 2))
    noise = rng.standard_normal((n, 8)) * np.sqrt(omega)
    X[:, 2:] = X[:, :2] @ beta + noise
    data = Dataset(X, default_names(10))
    return data, labels, VariableSet((0, 1))


def gen_wt(n_g: int, seed: int = 0):
    """Three spherical groups on five columns plus twenty noise columns.

    Group means on the informative columns are (mu,...,mu), 0 and
    (-mu,...,-mu) with mu = 1.7 and unit standard deviation; each group
    contributes n_g rows. Returns (Dataset, labels, truth {0..4}).
    """
    if n_g < 1:
        raise ValueError("n_g must be >= 1")
    rng = np.random.default_rng(seed)
    mu = 1.7
    centers = np.array([mu, 0.0, -mu])
    n = 3 * n_g
    labels = np.repeat(np.arange(3), n_g)
    X = rng.standard_normal((n, 25))
    X[:, :5] += centers[labels][:, None]
    return Dataset(X, default_names(25)), labels, VariableSet(tuple(range(5)))


_TV_MEANS = (np.array([0.0, 0.0]), np.array([3.0, 3.0]))
_TV_COVS = (np.array([[1.0, 0.5], [0.5, 1.0]]),
            np.array([[1.5, -0.7], [-0.7, 1.5]]))


def gen_twovar(variant: str, n: int, seed: int = 0):
    """Two-component bivariate mixture padded to five or ten columns.

    Columns 1:2 hold the clusters (means (0,0) and (3,3), mixing 0.5,
    correlated covariances). The five-column variant adds X3 = X1 + noise
    and two pure noise columns N(1.5, 2^2) and N(2, 1); the ten-column
    variant additionally shadows X2 and appends two bivariate Gaussian
    pairs drawn at the component parameters without any label link.

    Returns (Dataset, labels in {0, 1}, truth {0, 1}).
    """
    if variant not in ("five", "ten"):
        raise ValueError(f"unknown twovar variant {variant!r}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(size=n)
    labels = (u >= 0.5).astype(int)
    d = 5 if variant == "five" else 10
    X = np.zeros((n, d))
    for g in (0, 1):
        mask = labels == g
        X[mask, :2] = _mvnorm(rng, _TV_MEANS[g], _TV_COVS[g], int(mask.sum()))
    X[:, 2] = X[:, 0] + rng.standard_normal(n)
    if variant == "five":
        X[:, 3] = rng.normal(1.5, 2.0, size=n)
        X[:, 4] = rng.normal(2.0, 1.0, size=n)
    else:
        X[:, 3] = X[:, 1] + rng.standard_normal(n)
        X[:, 4] = rng.normal(1.5, 2.0, size=n)
        X[:, 5] = rng.normal(2.0, 1.0, size=n)
        X[:, 6:8] = _mvnorm(rng, _TV_MEANS[0], _TV_COVS[0], n)
        X[:, 8:10] = _mvnorm(rng, _TV_MEANS[1], _TV_COVS[1], n)
    return Dataset(X, default_names(d)), labels, VariableSet((0, 1))


def generate(spec: ScenarioSpec):
    """Dispatch a :class:`ScenarioSpec` to its generator."""
    if spec.id.startswith("maugis"):
        return gen_maugis(int(spec.id[len("maugis"):]), spec.size, spec.seed)
    if spec.id == "wt":
        return gen_wt(spec.size, spec.seed)
    return gen_twovar("five" if spec.id == "twovar5" else "ten",
                      spec.size, spec.seed)
