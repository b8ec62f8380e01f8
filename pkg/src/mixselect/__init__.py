"""Wrapper variable selection for Gaussian-mixture model-based clustering.

The package fits parsimonious Gaussian mixtures by EM (module ``gmm``),
scores candidate columns with a clustering-vs-regression BIC difference
(modules ``selection`` and ``regress``), and searches the subset space with
greedy stepwise and headlong algorithms, optionally evaluating candidates
on a process pool. ``datagen``, ``metrics`` and ``bench`` provide the
synthetic benchmark families, partition-quality metrics, and the timing /
speedup analysis used in the demos.
"""

from .dataio import (
    DataError,
    Dataset,
    VariableSet,
    read_csv,
    subsample_rows,
    subset_columns,
    variable_set,
    write_csv,
)
from .gmm import (
    FitOptions,
    FitResult,
    MixtureParams,
    NoViableModelError,
    best_fit,
    bic,
    em_fit,
    hclust_init,
    n_params,
)
from .metrics import ari, cer, class_error, contingency_table, vser
from .regress import RegressionError, RegressionFit, reg_bic, reg_subset_bic
from .selection import (
    BicDiffResult,
    SearchOptions,
    SearchResult,
    TraceEntry,
    bic_diff,
    greedy_search,
    headlong_search,
    propose_add,
    propose_remove,
    render_trace,
    run_parallel,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "BicDiffResult",
    "DataError",
    "Dataset",
    "FitOptions",
    "FitResult",
    "MixtureParams",
    "NoViableModelError",
    "RegressionError",
    "RegressionFit",
    "SearchOptions",
    "SearchResult",
    "TraceEntry",
    "VariableSet",
    "ari",
    "best_fit",
    "bic",
    "bic_diff",
    "cer",
    "class_error",
    "contingency_table",
    "em_fit",
    "greedy_search",
    "hclust_init",
    "headlong_search",
    "metrics",
    "n_params",
    "propose_add",
    "propose_remove",
    "read_csv",
    "reg_bic",
    "reg_subset_bic",
    "render_trace",
    "run_parallel",
    "search",
    "subsample_rows",
    "subset_columns",
    "variable_set",
    "vser",
    "write_csv",
]
