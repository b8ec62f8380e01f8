"""Parsimonious covariance structures for Gaussian mixtures.

Each within-group covariance is decomposed as
``Sigma_g = lambda_g * D_g * A_g * D_g'`` with volume lambda_g, diagonal
shape A_g (det 1) and orthogonal orientation D_g. A three-letter code fixes
which of the factors are shared across groups (E), vary by group (V), or
are the identity (I):

====== ======== ======== ===========
code   volume   shape    orientation
====== ======== ======== ===========
EII    equal    I        I
VII    varying  I        I
EEI    equal    equal    I
VEI    varying  equal    I
EVI    equal    varying  I
VVI    varying  varying  I
EEE    equal    equal    equal
EEV    equal    equal    varying
VEV    varying  equal    varying
VVV    varying  varying  varying
====== ======== ======== ===========

One-dimensional data use the codes E (equal variance) and V (varying
variance). Maximum-likelihood estimators given group scatter matrices
follow the closed forms of the classical eigenvalue-decomposition family;
VEI and VEV need a short inner fixed-point iteration.
"""

from __future__ import annotations

import numpy as np

UNIVARIATE_MODELS = ("E", "V")
MULTIVARIATE_MODELS = (
    "EII", "VII", "EEI", "VEI", "EVI", "VVI", "EEE", "EEV", "VEV", "VVV",
)

# Inner iteration controls for the VEI / VEV alternating updates.
_INNER_MAX = 20
_INNER_TOL = 1e-8


class ModelError(ValueError):
    """Invalid covariance-model code or code/dimension pairing."""


class SingularCovarianceError(ValueError):
    """A covariance estimate collapsed to a singular matrix."""


class EmptyComponentError(ValueError):
    """A mixture component lost all of its responsibility mass."""


def is_univariate(model: str) -> bool:
    return model in UNIVARIATE_MODELS


def validate_model(model: str, d: int) -> None:
    """Check that `model` is a known code usable with dimension `d`."""
    if model in UNIVARIATE_MODELS:
        if d != 1:
            raise ModelError(f"univariate model {model} requires d=1, got d={d}")
    elif model in MULTIVARIATE_MODELS:
        if d < 2:
            raise ModelError(f"multivariate model {model} requires d>=2")
    else:
        raise ModelError(f"unknown covariance model {model!r}")


def n_params(model: str, d: int, G: int) -> int:
    """Number of free parameters of a G-component mixture in d dimensions.

    Counts G - 1 mixing weights, G * d means, and the free elements of the
    covariance decomposition under the model's constraints.
    """
    if G < 1:
        raise ModelError(f"G must be >= 1, got {G}")
    validate_model(model, d)
    base = (G - 1) + G * d
    orient = d * (d - 1) // 2
    cov = {
        "E": 1,
        "V": G,
        "EII": 1,
        "VII": G,
        "EEI": d,
        "VEI": G + (d - 1),
        "EVI": 1 + G * (d - 1),
        "VVI": G * d,
        "EEE": d * (d + 1) // 2,
        "EEV": 1 + (d - 1) + G * orient,
        "VEV": G + (d - 1) + G * orient,
        "VVV": G * d * (d + 1) // 2,
    }[model]
    return base + cov


def _check_positive(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise SingularCovarianceError(f"{what} collapsed to a non-positive value")


def _cholesky_check(mats: np.ndarray, what: str) -> None:
    try:
        np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        raise SingularCovarianceError(f"{what} is not positive definite") from None


def _normalized_diag(vec: np.ndarray):
    """Split a positive vector into (det^(1/d), det-1 shape vector)."""
    _check_positive(vec, "diagonal shape")
    logdet = np.log(vec).sum()
    scale = np.exp(logdet / vec.shape[0])
    return scale, vec / scale


def _eigh_desc(mats: np.ndarray):
    """Batched symmetric eigendecomposition, eigenvalues descending."""
    vals, vecs = np.linalg.eigh(mats)
    return vals[..., ::-1], vecs[..., ::-1]


def estimate_covariances(model: str, scatter: np.ndarray,
                         ng: np.ndarray) -> np.ndarray:
    """ML covariance stack (G, d, d) from group scatter matrices.

    Parameters
    ----------
    model : str
        Covariance code; for d = 1 use "E" or "V".
    scatter : np.ndarray, shape (G, d, d)
        Responsibility-weighted within-group scatter matrices W_g.
    ng : np.ndarray, shape (G,)
        Responsibility mass per group (all > 0).

    Raises
    ------
    SingularCovarianceError
        When any required volume, shape entry or determinant is not
        strictly positive. No ridge or repair is applied: degenerate
        fits must fail loudly.
    """
    G, d, _ = scatter.shape
    n = float(ng.sum())
    eye = np.eye(d)

    if model in ("E", "EII"):
        lam = np.trace(scatter, axis1=1, axis2=2).sum() / (n * d)
        _check_positive(np.array([lam]), "common volume")
        return np.broadcast_to(lam * eye, (G, d, d)).copy()

    if model in ("V", "VII"):
        lam = np.trace(scatter, axis1=1, axis2=2) / (ng * d)
        _check_positive(lam, "group volume")
        return lam[:, None, None] * eye

    diag = np.einsum("gii->gi", scatter)

    if model == "EEI":
        b = diag.sum(axis=0) / n
        _check_positive(b, "common diagonal")
        return np.broadcast_to(np.diag(b), (G, d, d)).copy()

    if model == "VVI":
        b = diag / ng[:, None]
        _check_positive(b, "group diagonal")
        return np.apply_along_axis(np.diag, 1, b)

    if model == "EVI":
        _check_positive(diag, "group diagonal")
        logdets = np.log(diag).sum(axis=1)
        vols = np.exp(logdets / d)
        shapes = diag / vols[:, None]
        lam = vols.sum() / n
        return np.apply_along_axis(np.diag, 1, lam * shapes)

    if model == "VEI":
        _check_positive(diag, "group diagonal")
        lam = diag.sum(axis=1) / (ng * d)
        for _ in range(_INNER_MAX):
            _, b = _normalized_diag((diag / lam[:, None]).sum(axis=0))
            lam_new = (diag / b[None, :]).sum(axis=1) / (ng * d)
            _check_positive(lam_new, "group volume")
            if np.max(np.abs(lam_new - lam) / lam_new) < _INNER_TOL:
                lam = lam_new
                break
            lam = lam_new
        return np.apply_along_axis(np.diag, 1, lam[:, None] * b[None, :])

    if model == "EEE":
        pooled = scatter.sum(axis=0) / n
        _cholesky_check(pooled[None], "pooled covariance")
        return np.broadcast_to(pooled, (G, d, d)).copy()

    if model == "VVV":
        covs = scatter / ng[:, None, None]
        _cholesky_check(covs, "group covariance")
        return covs

    if model in ("EEV", "VEV"):
        omega, vecs = _eigh_desc(scatter)
        omega = np.maximum(omega, 0.0)
        if model == "EEV":
            total = omega.sum(axis=0)
            scale, a = _normalized_diag(total)
            lam = scale / n
            covs = np.einsum("gik,k,gjk->gij", vecs, lam * a, vecs)
            return covs
        # VEV: alternate between group volumes and the shared shape.
        _check_positive(omega.sum(axis=1), "group scatter")
        lam = omega.sum(axis=1) / (ng * d)
        for _ in range(_INNER_MAX):
            _, a = _normalized_diag((omega / lam[:, None]).sum(axis=0))
            lam_new = (omega / a[None, :]).sum(axis=1) / (ng * d)
            _check_positive(lam_new, "group volume")
            if np.max(np.abs(lam_new - lam) / lam_new) < _INNER_TOL:
                lam = lam_new
                break
            lam = lam_new
        covs = np.einsum("gik,gk,gjk->gij", vecs,
                         lam[:, None] * a[None, :], vecs)
        return covs

    raise ModelError(f"unknown covariance model {model!r}")


def constraint_violation(model: str, covs: np.ndarray) -> float:
    """Largest relative deviation of a covariance stack from its pattern.

    Zero means the stack satisfies the model's equality constraints
    exactly; fitted stacks should come out below ~1e-8.
    """
    covs = np.asarray(covs, dtype=float)
    G, d, _ = covs.shape
    scale = float(np.abs(covs).max())
    if scale == 0.0:
        return np.inf
    validate_model(model, d)

    diag = np.einsum("gii->gi", covs)
    off = covs - np.apply_along_axis(np.diag, 1, diag)
    off_dev = float(np.abs(off).max()) / scale

    def spread(x):
        x = np.asarray(x, dtype=float)
        return float((x.max(axis=0) - x.min(axis=0)).max()) / scale

    if model in ("E", "EII"):
        return max(off_dev, spread(diag), spread(diag.T))
    if model in ("V", "VII"):
        return max(off_dev, spread(diag.T))
    if model == "EEI":
        return max(off_dev, spread(diag))
    if model == "VVI":
        return off_dev
    if model == "EVI":
        vols = np.exp(np.log(diag).sum(axis=1) / d)
        return max(off_dev, spread(vols[:, None] * np.ones((1, 1))))
    if model == "VEI":
        vols = np.exp(np.log(diag).sum(axis=1) / d)
        return max(off_dev, spread(diag / vols[:, None]))
    if model == "EEE":
        return spread(covs.reshape(G, -1))
    if model == "VVV":
        return 0.0
    vals, _ = _eigh_desc(covs)
    vols = np.exp(np.log(np.maximum(vals, 1e-300)).sum(axis=1) / d)
    shape_dev = spread(vals / vols[:, None])
    if model == "EEV":
        return max(shape_dev, spread(vols[:, None]))
    if model == "VEV":
        return shape_dev
    raise ModelError(f"unknown covariance model {model!r}")
