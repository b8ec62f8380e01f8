"""EM fitting of parameterized Gaussian mixtures.

Fits start from a hard partition (normally a cut of the agglomerative
initialization tree): an M-step on the one-hot responsibilities, then
alternating E/M until the relative log-likelihood change falls under the
tolerance. Failures (collapsed components, singular covariances,
non-finite likelihoods) never raise out of :func:`em_fit`; they are
returned as a result whose BIC is unavailable, which downstream model
selection simply skips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataio import Dataset
from .covariance import (
    EmptyComponentError,
    SingularCovarianceError,
    estimate_covariances,
    n_params,
    validate_model,
)

_LOG_2PI = math.log(2.0 * math.pi)

# Responsibility mass below which a component counts as empty.
_MIN_COMPONENT_MASS = 1e-10


def bic(loglik: float, df: int, n: int) -> float:
    """Bayesian Information Criterion, 2*loglik - df*log(n). Larger is better."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2.0 * loglik - df * math.log(n)


@dataclass(frozen=True)
class MixtureParams:
    """Parameters of a G-component Gaussian mixture in d dimensions."""

    weights: np.ndarray      # (G,) positive, sums to 1
    means: np.ndarray        # (G, d)
    covariances: np.ndarray  # (G, d, d) symmetric positive definite

    @property
    def G(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class FitOptions:
    """Tuning knobs for EM fitting and its initialization.

    tol is the relative log-likelihood change under which EM stops;
    hc_model picks the agglomerative criterion used for starting
    partitions, with allow_eee enabling the equal-covariance retry when
    no fit under the default criterion yields a usable BIC. samp turns
    on row sub-sampling for tree construction (sampsize rows, default
    about half the data), after which the partition is extended to all
    rows before EM.
    """

    tol: float = 1e-5
    max_iter: int = 1000
    hc_model: str = "VVV"
    allow_eee: bool = True
    samp: bool = False
    sampsize: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.hc_model not in ("EII", "EEE", "VVV"):
            raise ValueError(f"unsupported hc_model {self.hc_model!r}")


@dataclass(frozen=True)
class FitResult:
    """Outcome of one (G, model) EM fit.

    For successful fits bic == 2*loglik - df*log(n) exactly and
    classification[i] = argmax_g z[i, g] (ties to the lowest g). Failed
    fits carry bic = nan plus an error note and leave params/z/
    classification as None.
    """

    model: str
    G: int
    params: MixtureParams | None
    loglik: float
    df: int
    bic: float
    z: np.ndarray | None
    classification: np.ndarray | None
    converged: bool
    iterations: int
    loglik_trace: tuple[float, ...] = field(default=())
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and math.isfinite(self.bic)

    def summary(self, col_names=None) -> str:
        """Plain-text fit summary: model, G, loglik, n, df, BIC, table."""
        lines = ["Gaussian finite mixture model fitted by EM"]
        if not self.ok:
            lines.append(f"model {self.model} with {self.G} components: "
                         f"fit failed ({self.error})")
            return "\n".join(lines)
        n = self.z.shape[0]
        lines.append(f"model {self.model} with {self.G} components")
        if col_names:
            lines.append("variables: " + ", ".join(col_names))
        lines.append(
            f"log-likelihood = {self.loglik:.4f}   n = {n}   "
            f"df = {self.df}   BIC = {self.bic:.4f}"
        )
        counts = np.bincount(self.classification, minlength=self.G)
        lines.append("clustering table: "
                     + "  ".join(f"{g + 1}:{c}" for g, c in enumerate(counts)))
        return "\n".join(lines)


def _failed(model: str, G: int, df: int, reason: str,
            iterations: int = 0, trace=()) -> FitResult:
    return FitResult(
        model=model, G=G, params=None, loglik=math.nan, df=df,
        bic=math.nan, z=None, classification=None, converged=False,
        iterations=iterations, loglik_trace=tuple(trace), error=reason,
    )


def log_density(params: MixtureParams, data: Dataset | np.ndarray) -> np.ndarray:
    """Per-observation log mixture density, length n.

    Computed with the log-sum-exp trick so widely separated components
    cannot underflow the total.
    """
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    comp = _component_log_matrix(params, X)
    return _logsumexp_rows(comp)[1]


def _component_log_matrix(params: MixtureParams, X: np.ndarray) -> np.ndarray:
    """(n, G) matrix of log pi_g + log N(x_i | mu_g, Sigma_g)."""
    if X.shape[1] != params.d:
        raise ValueError(f"data dimension {X.shape[1]} != params dimension {params.d}")
    d = params.d
    means = params.means
    covs = params.covariances
    diag = np.einsum("gii->gi", covs)
    if np.count_nonzero(covs) == np.count_nonzero(diag):
        # Diagonal covariances: broadcasted closed form.
        if np.any(diag <= 0):
            raise SingularCovarianceError("non-positive variance in a component")
        diff = X[:, None, :] - means[None, :, :]
        quad = (diff * diff / diag[None, :, :]).sum(axis=2)
        logdet = np.log(diag).sum(axis=1)
    else:
        try:
            L = np.linalg.cholesky(covs)
        except np.linalg.LinAlgError:
            raise SingularCovarianceError(
                "a component covariance is not positive definite") from None
        diff = np.transpose(X[:, None, :] - means[None, :, :], (1, 2, 0))
        sol = np.linalg.solve(L, diff)  # (G, d, n)
        quad = np.einsum("gdn,gdn->ng", sol, sol)
        logdet = 2.0 * np.log(np.einsum("gii->gi", L)).sum(axis=1)
    return (np.log(params.weights)[None, :]
            - 0.5 * (d * _LOG_2PI + logdet)[None, :]
            - 0.5 * quad)


def _logsumexp_rows(comp: np.ndarray):
    m = comp.max(axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    s = np.exp(comp - safe[:, None]).sum(axis=1)
    lse = safe + np.log(s)
    lse[~np.isfinite(m)] = -np.inf
    return m, lse


def e_step(params: MixtureParams, data: Dataset | np.ndarray):
    """Responsibilities and total log-likelihood under `params`.

    Returns (z, loglik) where z has one probability row per observation.
    """
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    comp = _component_log_matrix(params, X)
    _, lse = _logsumexp_rows(comp)
    if not np.all(np.isfinite(lse)):
        raise SingularCovarianceError("zero mixture density at some observation")
    z = np.exp(comp - lse[:, None])
    return z, float(lse.sum())


def m_step(model: str, data: Dataset | np.ndarray, z: np.ndarray) -> MixtureParams:
    """Maximize the expected complete-data log-likelihood under `model`.

    Raises EmptyComponentError when a responsibility column has
    (essentially) no mass and SingularCovarianceError when the implied
    covariances are not positive definite.
    """
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    n, d = X.shape
    validate_model(model, d)
    z = np.asarray(z, dtype=float)
    ng = z.sum(axis=0)
    G = ng.shape[0]
    if np.any(ng < _MIN_COMPONENT_MASS):
        raise EmptyComponentError(
            f"component {int(np.argmin(ng))} has responsibility mass {ng.min():.3g}")
    weights = ng / n
    means = (z.T @ X) / ng[:, None]
    scatter = np.empty((G, d, d))
    for g in range(G):
        Xc = X - means[g]
        scatter[g] = (Xc * z[:, g, None]).T @ Xc
    covs = estimate_covariances(model, scatter, ng)
    # Fail now rather than blowing up the next E-step.
    try:
        np.linalg.cholesky(covs)
    except np.linalg.LinAlgError:
        raise SingularCovarianceError(
            f"{model} covariance estimate is not positive definite") from None
    return MixtureParams(weights=weights, means=means, covariances=covs)


def one_hot(labels: np.ndarray, G: int | None = None) -> np.ndarray:
    """Hard labels (values 0..G-1) to a one-hot responsibility matrix."""
    labels = np.asarray(labels, dtype=int)
    if G is None:
        G = int(labels.max()) + 1
    z = np.zeros((labels.shape[0], G))
    z[np.arange(labels.shape[0]), labels] = 1.0
    return z


def em_fit(data: Dataset | np.ndarray, G: int, model: str,
           init_partition: np.ndarray,
           opts: FitOptions | None = None) -> FitResult:
    """Fit a G-component mixture by EM from a hard starting partition.

    The log-likelihood is non-decreasing across iterations (up to the
    inner-iteration slack of the VEI/VEV updates). Any numerical failure
    is reported in the result rather than raised, so grid searches over
    (G, model) can always continue.
    """
    opts = opts or FitOptions()
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    n, d = X.shape
    df = n_params(model, d, G)
    labels = np.asarray(init_partition, dtype=int)
    if labels.shape[0] != n:
        return _failed(model, G, df, "initial partition length mismatch")
    if len(np.unique(labels)) != G:
        return _failed(model, G, df,
                       f"initial partition has {len(np.unique(labels))} "
                       f"non-empty classes, expected {G}")
    z = one_hot(labels, G)

    trace: list[float] = []
    loglik = -math.inf
    converged = False
    iterations = 0
    try:
        params = m_step(model, X, z)
        for t in range(1, opts.max_iter + 1):
            iterations = t
            z, new_loglik = e_step(params, X)
            trace.append(new_loglik)
            if not math.isfinite(new_loglik):
                return _failed(model, G, df, "non-finite log-likelihood",
                               iterations, trace)
            if G == 1 or (t > 1 and abs(new_loglik - loglik)
                          < opts.tol * (1.0 + abs(new_loglik))):
                loglik = new_loglik
                converged = True
                break
            loglik = new_loglik
            params = m_step(model, X, z)
    except (EmptyComponentError, SingularCovarianceError) as exc:
        return _failed(model, G, df, str(exc), iterations, trace)

    classification = np.argmax(z, axis=1)
    return FitResult(
        model=model, G=G, params=params, loglik=loglik, df=df,
        bic=bic(loglik, df, n), z=z, classification=classification,
        converged=converged, iterations=iterations,
        loglik_trace=tuple(trace), error=None,
    )
