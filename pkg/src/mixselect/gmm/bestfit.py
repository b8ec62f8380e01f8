"""BIC-based selection over numbers of components and covariance models."""

from __future__ import annotations

import math

from ..dataio import Dataset, subsample_rows
from .covariance import validate_model
from .em import FitOptions, FitResult, em_fit
from .hierarchy import extend_partition, hclust_init


class NoViableModelError(RuntimeError):
    """Every (G, model) fit failed to produce a finite BIC."""


def _grid_fits(data: Dataset, Gs, models, opts: FitOptions,
               criterion: str, rows) -> list[FitResult]:
    tree = hclust_init(data, criterion, rows)
    n_used = tree.n
    results: list[FitResult] = []
    for G in Gs:
        if G > n_used:
            continue
        part = tree.cut(G)
        if rows is not None:
            part = extend_partition(data, rows, part)
        for model in models:
            results.append(em_fit(data, G, model, part, opts))
    return results


def best_fit(data: Dataset, Gs, models, opts: FitOptions | None = None,
             return_all: bool = False):
    """Best mixture fit by BIC over all (G, model) combinations.

    Every combination is fitted by EM from the agglomerative
    initialization tree (built on a row subsample when opts.samp is set,
    then extended to all rows). If the default criterion produces no
    finite BIC anywhere and opts.allow_eee holds, the grid is refitted
    from an equal-covariance (EEE) tree. Failed fits are skipped; ties go
    to the smaller G, then to the earlier model in list order.

    Raises NoViableModelError when nothing fits.
    """
    opts = opts or FitOptions()
    Gs = [int(g) for g in Gs]
    models = list(models)
    if not Gs or not models:
        raise ValueError("Gs and models must be non-empty")
    for m in models:
        validate_model(m, data.d)

    rows = None
    sampsize = opts.sampsize if opts.sampsize is not None else round(data.n / 2)
    if opts.samp and sampsize < data.n:
        rows = subsample_rows(data, sampsize, opts.seed)

    results = _grid_fits(data, Gs, models, opts, opts.hc_model, rows)
    if (opts.allow_eee and opts.hc_model == "VVV"
            and not any(r.ok for r in results)):
        results = _grid_fits(data, Gs, models, opts, "EEE", rows)

    best = None
    order = {m: k for k, m in enumerate(models)}
    for r in results:
        if not r.ok:
            continue
        key = (-r.bic, r.G, order[r.model])
        if best is None or key < best[0]:
            best = (key, r)
    if best is None:
        reasons = {r.error for r in results if r.error} or {"no fits attempted"}
        raise NoViableModelError(
            "no (G, model) combination produced a finite BIC: "
            + "; ".join(sorted(reasons)))
    if return_all:
        return best[1], results
    return best[1]


def best_bic(data: Dataset, Gs, models, opts: FitOptions | None = None) -> float:
    """BIC of the best fit, or -inf when no model is viable."""
    try:
        return best_fit(data, Gs, models, opts).bic
    except NoViableModelError:
        return -math.inf
