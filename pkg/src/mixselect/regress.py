"""Gaussian linear regression BIC for candidate variables.

The no-clustering half of the selection criterion scores a candidate column
by the BIC of its regression on the currently selected columns. The variance
estimate is the MLE (residual sum of squares over n, not n - p) so the
resulting log-likelihood is on the same footing as the mixture fits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np


class RegressionError(ValueError):
    """Raised when a regression fit is degenerate or rank deficient."""


class CollinearResponseError(RegressionError):
    """The response is an exact linear function of the regressors.

    The residual variance is zero, so the Gaussian criterion is undefined
    (the likelihood diverges). Subset searches propagate this instead of
    skipping it: a response this redundant has no finite regression BIC.
    """


@dataclass(frozen=True)
class RegressionFit:
    """OLS fit of y on a (possibly empty) set of regressor columns.

    df counts the intercept, one coefficient per regressor, and the
    residual variance, so bic = 2 * loglik - df * log(n).
    """

    regressors: tuple[int, ...]
    coefficients: np.ndarray
    sigma2: float
    loglik: float
    df: int
    bic: float


# Relative floor under which a residual variance counts as exactly
# collinear rather than merely small.
_DEGENERATE_REL = 1e-12


def reg_bic(y, X=None, regressor_indices=None) -> RegressionFit:
    """BIC of the Gaussian regression of y on the columns of X.

    Parameters
    ----------
    y : array, shape (n,)
        Response column.
    X : array, shape (n, p) or None
        Regressor columns; None or zero columns fits intercept only,
        which equals the single-component Gaussian model of y (df = 2).
    regressor_indices : tuple, optional
        Labels recorded in the result; defaults to 0..p-1.

    Raises
    ------
    RegressionError
        On rank-deficient designs or an (essentially) zero residual
        variance, both of which leave the criterion undefined.
    """
    y = np.asarray(y, dtype=float).ravel()
    n = y.shape[0]
    if X is None:
        X = np.empty((n, 0))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    p = X.shape[1]
    if regressor_indices is None:
        regressor_indices = tuple(range(p))
    if n <= p + 2:
        raise RegressionError(f"n={n} too small for {p} regressors")
    design = np.column_stack([np.ones(n), X])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < p + 1:
        raise RegressionError(f"rank-deficient design: rank {rank} < {p + 1}")
    resid = y - design @ coef
    rss = float(resid @ resid)
    scale = float(y @ y) / n + 1.0
    if rss / n <= _DEGENERATE_REL * scale:
        raise CollinearResponseError(
            "zero residual variance: response is collinear")
    sigma2 = rss / n
    loglik = -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0)
    df = p + 2
    bic = 2.0 * loglik - df * math.log(n)
    return RegressionFit(
        regressors=tuple(regressor_indices),
        coefficients=coef,
        sigma2=sigma2,
        loglik=loglik,
        df=df,
        bic=bic,
    )


def _forward_stepwise(y, X, indices) -> RegressionFit:
    p = X.shape[1]
    chosen: list[int] = []
    best = reg_bic(y)  # null model
    improved = True
    while improved and len(chosen) < p:
        improved = False
        step_best = None
        for j in range(p):
            if j in chosen:
                continue
            cols = chosen + [j]
            try:
                fit = reg_bic(y, X[:, cols], tuple(indices[c] for c in cols))
            except CollinearResponseError:
                raise
            except RegressionError:
                continue
            if step_best is None or fit.bic > step_best[0].bic:
                step_best = (fit, j)
        if step_best is not None and step_best[0].bic > best.bic:
            best = step_best[0]
            chosen.append(step_best[1])
            improved = True
    return best


def reg_subset_bic(y, X_clust=None, mode: str = "subset",
                   regressor_indices=None) -> RegressionFit:
    """Best-BIC regression of y on a subset of the clustering columns.

    mode "all" regresses on every column of X_clust. mode "subset" searches
    regressor subsets, always including the null (intercept-only) model:
    exhaustive enumeration up to 10 columns, forward stepwise beyond.
    Returns the BIC maximiser.
    """
    if mode not in ("all", "subset"):
        raise ValueError(f"unknown regression mode {mode!r}")
    y = np.asarray(y, dtype=float).ravel()
    if X_clust is None:
        X_clust = np.empty((y.shape[0], 0))
    X = np.asarray(X_clust, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    p = X.shape[1]
    if regressor_indices is None:
        regressor_indices = tuple(range(p))
    if mode == "all" or p == 0:
        return reg_bic(y, X, regressor_indices)
    if p > 10:
        return _forward_stepwise(y, X, regressor_indices)
    best = None
    first_error = None
    for k in range(p + 1):
        for combo in itertools.combinations(range(p), k):
            try:
                fit = reg_bic(y, X[:, list(combo)],
                              tuple(regressor_indices[c] for c in combo))
            except CollinearResponseError:
                raise
            except RegressionError as exc:
                if first_error is None:
                    first_error = exc
                continue
            if best is None or fit.bic > best.bic:
                best = fit
    if best is None:
        raise first_error if first_error is not None else RegressionError(
            "no regression subset could be fitted")
    return best
