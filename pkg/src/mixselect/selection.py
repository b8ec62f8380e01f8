"""Stepwise variable selection for model-based clustering.

A candidate column is scored by the difference between the BIC of the best
clustering mixture (G >= 2) on the selected columns plus the candidate, and
the BIC of the no-clustering alternative: the best clustering mixture on
the selected columns alone plus the Gaussian regression of the candidate on
(a subset of) them. Positive differences favour treating the candidate as a
clustering variable; the remaining columns play no role in the score.

Two search strategies walk the subset space: a greedy stepwise search that
alternates best-candidate inclusion and worst-member exclusion steps, and a
headlong search that accepts the first candidate clearing an upper evidence
threshold and permanently discards candidates falling under a lower one.
Candidate evaluations at a step are independent, so they can fan out over a
process pool; results are reduced deterministically, making parallel runs
reproduce the sequential trace exactly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dataio import Dataset, VariableSet, subset_columns, variable_set
from .gmm import (
    FitOptions,
    FitResult,
    MULTIVARIATE_MODELS,
    NoViableModelError,
    UNIVARIATE_MODELS,
    best_fit,
)
from .regress import RegressionError, reg_bic, reg_subset_bic


@dataclass(frozen=True)
class SearchOptions:
    """Tuning knobs for the subset searches.

    Defaults mirror the front-end defaults: components 1..9, all ten
    multivariate covariance models, forward greedy search with acceptance
    thresholds at zero, headlong discard level at -10, at most 100
    add/remove iterations, and the first two inclusions forced.
    """

    g_range: tuple[int, ...] = tuple(range(1, 10))
    em_models_1: tuple[str, ...] = UNIVARIATE_MODELS
    em_models_2: tuple[str, ...] = MULTIVARIATE_MODELS
    direction: str = "forward"
    search: str = "greedy"
    bic_diff_threshold: float = 0.0
    bic_upper: float = 0.0
    bic_lower: float = -10.0
    itermax: int = 100
    forcetwo: bool = True
    fit_options: FitOptions = field(default_factory=FitOptions)
    regression_mode: str = "subset"
    parallel: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "g_range", tuple(int(g) for g in self.g_range))
        if not self.g_range or max(self.g_range) < 2:
            raise ValueError("g_range must be non-empty with max >= 2")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.search not in ("greedy", "headlong"):
            raise ValueError(f"unknown search {self.search!r}")
        if self.search == "headlong" and self.direction == "backward":
            raise ValueError("headlong search is forward-only")
        if self.bic_lower > self.bic_upper:
            raise ValueError("bic_lower must be <= bic_upper")
        if self.itermax < 1:
            raise ValueError("itermax must be >= 1")
        if self.regression_mode not in ("all", "subset"):
            raise ValueError(f"unknown regression mode {self.regression_mode!r}")
        if self.parallel is not None and self.parallel < 1:
            raise ValueError("parallel worker count must be >= 1")

    @property
    def clustering_g(self) -> tuple[int, ...]:
        """The G >= 2 part of g_range used for clustering BIC terms."""
        return tuple(g for g in self.g_range if g >= 2)


@dataclass(frozen=True)
class BicDiffResult:
    """The three BIC terms scoring one candidate column.

    diff = bic_clust_joint - (bic_clust_S + bic_reg). With an empty
    selected set, bic_clust_S is 0 and bic_reg is the single-component
    Gaussian BIC of the candidate.
    """

    candidate: int
    bic_clust_joint: float
    bic_clust_S: float
    bic_reg: float
    diff: float
    error: str | None = None

    @property
    def bic_not_clust(self) -> float:
        return self.bic_clust_S + self.bic_reg


@dataclass(frozen=True)
class TraceEntry:
    """One audited proposal of the search."""

    step_index: int
    variable: int
    variable_name: str
    bic: float
    bic_difference: float
    step_type: str  # "Add" | "Remove"
    decision: str   # "Accepted" | "Rejected"

    def to_json(self) -> str:
        return json.dumps({
            "step_index": self.step_index,
            "variable": self.variable,
            "variable_name": self.variable_name,
            "bic": self.bic,
            "bic_difference": self.bic_difference,
            "step_type": self.step_type,
            "decision": self.decision,
        })

    @classmethod
    def from_json(cls, line: str) -> "TraceEntry":
        return cls(**json.loads(line))


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a subset search."""

    subset: VariableSet
    trace: tuple[TraceEntry, ...]
    final_fit: FitResult | None
    candidates_discarded: frozenset[int] = frozenset()
    warning: str | None = None

    def subset_names(self, data: Dataset) -> tuple[str, ...]:
        return self.subset.names(data)


def render_trace(trace) -> str:
    """The search trace as a five-column text table."""
    header = (f"{'':>4} {'Variable proposed':>20} {'BIC':>12} "
              f"{'BIC difference':>15} {'Type of step':>13} {'Decision':>9}")
    lines = [header]
    for t in trace:
        lines.append(
            f"{t.step_index:>4} {t.variable_name:>20} {t.bic:>12.3f} "
            f"{t.bic_difference:>15.5f} {t.step_type:>13} {t.decision:>9}")
    return "\n".join(lines)


def trace_to_jsonl(trace) -> str:
    return "\n".join(t.to_json() for t in trace) + "\n"


def trace_from_jsonl(text: str) -> tuple[TraceEntry, ...]:
    return tuple(TraceEntry.from_json(line)
                 for line in text.splitlines() if line.strip())


class _EvalCache:
    """Shared per-search caches.

    Clustering BICs are keyed by the sorted column tuple so all candidate
    evaluations at a step reuse the baseline fit, and so a later step can
    reuse a fit made while the set was a proposal. Regressions are keyed
    by (response, regressor columns, mode).
    """

    def __init__(self) -> None:
        self.clust: dict[tuple[int, ...], float] = {}
        self.reg: dict[tuple, float] = {}

    def merge(self, other: "_EvalCache") -> None:
        self.clust.update(other.clust)
        self.reg.update(other.reg)


def _clustering_bic(data: Dataset, cols: tuple[int, ...],
                    opts: SearchOptions, cache: _EvalCache) -> float:
    key = tuple(sorted(cols))
    if key in cache.clust:
        return cache.clust[key]
    sub = subset_columns(data, key)
    models = opts.em_models_1 if sub.d == 1 else opts.em_models_2
    try:
        value = best_fit(sub, opts.clustering_g, models, opts.fit_options).bic
    except NoViableModelError:
        value = -math.inf
    cache.clust[key] = value
    return value


def _regression_bic(data: Dataset, i: int, cols: tuple[int, ...],
                    opts: SearchOptions, cache: _EvalCache) -> float:
    key = (i, tuple(sorted(cols)), opts.regression_mode)
    if key in cache.reg:
        return cache.reg[key]
    y = data.column(i)
    try:
        if not cols:
            value = reg_bic(y).bic
        else:
            X = data.values[:, list(key[1])]
            value = reg_subset_bic(y, X, opts.regression_mode, key[1]).bic
    except RegressionError:
        value = -math.inf
    cache.reg[key] = value
    return value


def bic_diff(data: Dataset, S, i: int, opts: SearchOptions | None = None,
             cache: _EvalCache | None = None) -> BicDiffResult:
    """Evidence that column i is a clustering variable, given selected S.

    A failed joint clustering fit or a degenerate regression (for example
    a candidate collinear with the selected set) yields diff = -inf: no
    usable evidence for inclusion. A baseline clustering failure on a
    non-empty S yields diff = +inf, since removing the candidate would
    leave nothing fittable.
    """
    opts = opts or SearchOptions()
    cache = cache if cache is not None else _EvalCache()
    S = tuple(S.indices) if isinstance(S, VariableSet) else tuple(S)
    if i in S:
        raise ValueError(f"candidate {i} already selected")
    joint = _clustering_bic(data, S + (i,), opts, cache)
    base = _clustering_bic(data, S, opts, cache) if S else 0.0
    reg = _regression_bic(data, i, S, opts, cache)

    error = None
    if not math.isfinite(joint):
        diff = -math.inf
        error = "joint clustering fit failed"
    elif not math.isfinite(reg):
        diff = -math.inf
        error = "degenerate regression for candidate"
    elif not math.isfinite(base):
        diff = math.inf
        error = "baseline clustering fit failed"
    else:
        diff = joint - (base + reg)
    return BicDiffResult(candidate=i, bic_clust_joint=joint, bic_clust_S=base,
                         bic_reg=reg, diff=diff, error=error)


# ---------------------------------------------------------------------------
# Parallel candidate evaluation


def _eval_candidate(args) -> tuple[BicDiffResult, _EvalCache]:
    data, S, i, opts, cache = args
    try:
        return bic_diff(data, S, i, opts, cache), cache
    except Exception as exc:  # a crashed evaluation must not kill the search
        return (BicDiffResult(candidate=i, bic_clust_joint=-math.inf,
                              bic_clust_S=math.nan, bic_reg=math.nan,
                              diff=-math.inf, error=f"evaluation failed: {exc}"),
                cache)


def run_parallel(data: Dataset, S, candidates, opts: SearchOptions,
                 cache: _EvalCache, workers: int | None = None,
                 executor: ProcessPoolExecutor | None = None,
                 ) -> list[BicDiffResult]:
    """Evaluate bic_diff for every candidate, in candidate order.

    With workers > 1 the evaluations run on a process pool; because each
    evaluation is a pure function of its arguments, the collected results
    are identical to sequential execution. The shared baseline is fitted
    once up front so workers never duplicate it.
    """
    S = tuple(S)
    candidates = [int(c) for c in candidates]
    workers = workers if workers is not None else (opts.parallel or 1)
    if S:
        _clustering_bic(data, S, opts, cache)  # warm the shared baseline
    tasks = [(data, S, i, opts) for i in candidates]
    return _map_evaluations(tasks, workers, executor, cache)


def _map_evaluations(tasks, workers: int, executor, cache: _EvalCache):
    """Run (data, S, i, opts) evaluation tasks, in order, sharing `cache`."""
    if workers <= 1 or len(tasks) <= 1:
        return [_eval_candidate(t + (cache,))[0] for t in tasks]
    seed = _EvalCache()
    seed.merge(cache)
    own_pool = executor is None
    pool = executor or ProcessPoolExecutor(max_workers=workers)
    try:
        results = []
        for res, worker_cache in pool.map(_eval_candidate,
                                          [t + (seed,) for t in tasks]):
            results.append(res)
            cache.merge(worker_cache)
    finally:
        if own_pool:
            pool.shutdown()
    return results


def propose_add(data: Dataset, S, candidates, opts: SearchOptions | None = None,
                cache: _EvalCache | None = None, executor=None):
    """Evaluate all candidates for inclusion; propose the highest evidence.

    Returns (best, all_results); ties go to the lowest column index.
    """
    opts = opts or SearchOptions()
    cache = cache if cache is not None else _EvalCache()
    candidates = sorted(int(c) for c in candidates)
    if not candidates:
        raise ValueError("no candidates to propose")
    results = run_parallel(data, tuple(S), candidates, opts, cache,
                           executor=executor)
    best = max(results, key=lambda r: (r.diff, -r.candidate))
    return best, results


def propose_remove(data: Dataset, S, opts: SearchOptions | None = None,
                   cache: _EvalCache | None = None, executor=None):
    """Evaluate every selected column for exclusion; propose the weakest.

    Each member j is scored by bic_diff against S without j. Returns
    (worst, all_results); ties go to the lowest column index.
    """
    opts = opts or SearchOptions()
    cache = cache if cache is not None else _EvalCache()
    S = tuple(S.indices) if isinstance(S, VariableSet) else tuple(S)
    if not S:
        raise ValueError("nothing to remove from an empty set")
    # Every removal evaluation shares the full-set fit as its joint term;
    # fit it once here so workers never duplicate it.
    _clustering_bic(data, S, opts, cache)
    tasks = [(data, tuple(c for c in S if c != j), j, opts)
             for j in sorted(S)]
    results = _map_evaluations(tasks, opts.parallel or 1, executor, cache)
    worst = min(results, key=lambda r: (r.diff, r.candidate))
    return worst, results


# ---------------------------------------------------------------------------
# Search drivers


class _Trace:
    def __init__(self, data: Dataset):
        self.data = data
        self.entries: list[TraceEntry] = []

    def record(self, res: BicDiffResult, step_type: str, accepted: bool) -> None:
        self.entries.append(TraceEntry(
            step_index=len(self.entries) + 1,
            variable=res.candidate,
            variable_name=self.data.col_names[res.candidate],
            bic=res.bic_clust_joint,
            bic_difference=res.diff,
            step_type=step_type,
            decision="Accepted" if accepted else "Rejected",
        ))


def _final_result(data: Dataset, selected: list[int], trace: _Trace,
                  opts: SearchOptions, discarded=frozenset(),
                  warning: str | None = None) -> SearchResult:
    subset = variable_set(selected, data.d)
    final = None
    if selected:
        sub = subset_columns(data, subset)
        models = opts.em_models_1 if sub.d == 1 else opts.em_models_2
        try:
            final = best_fit(sub, opts.g_range, models, opts.fit_options)
        except NoViableModelError:
            warning = warning or "no viable model on the selected subset"
    else:
        warning = warning or "search ended with an empty subset"
    return SearchResult(subset=subset, trace=tuple(trace.entries),
                        final_fit=final, candidates_discarded=frozenset(discarded),
                        warning=warning)


def _make_executor(opts: SearchOptions):
    if opts.parallel and opts.parallel > 1:
        return ProcessPoolExecutor(max_workers=opts.parallel)
    return None


def greedy_search(data: Dataset, opts: SearchOptions | None = None) -> SearchResult:
    """Greedy stepwise subset search.

    Forward direction starts empty and alternates an inclusion step
    (accept when diff > threshold) with an exclusion step (accept when
    diff < -threshold); with forcetwo the first two inclusion proposals
    are accepted unconditionally and no exclusion is attempted while
    fewer than three columns are selected. Backward starts from all
    columns and alternates exclusion with re-inclusion of dropped
    columns; forcetwo then keeps at least two columns selected. The
    search stops when one full alternation changes nothing, or after
    itermax iterations.
    """
    opts = opts or SearchOptions()
    if data.d < 2:
        raise ValueError("subset search needs at least two columns")
    if opts.search != "greedy":
        raise ValueError("greedy_search called with non-greedy options")
    cache = _EvalCache()
    trace = _Trace(data)
    executor = _make_executor(opts)
    try:
        if opts.direction == "forward":
            return _greedy_forward(data, opts, cache, trace, executor)
        return _greedy_backward(data, opts, cache, trace, executor)
    finally:
        if executor is not None:
            executor.shutdown()


def _greedy_forward(data, opts, cache, trace, executor) -> SearchResult:
    selected: list[int] = []
    threshold = opts.bic_diff_threshold
    accepted_adds = 0
    for _ in range(opts.itermax):
        changed = False
        candidates = [c for c in range(data.d) if c not in selected]
        if candidates:
            best, _ = propose_add(data, selected, candidates, opts, cache,
                                  executor)
            forced = opts.forcetwo and accepted_adds < 2
            accept = forced or best.diff > threshold
            trace.record(best, "Add", accept)
            if accept:
                selected.append(best.candidate)
                accepted_adds += 1
                changed = True
        removable = bool(selected) and (not opts.forcetwo or len(selected) >= 3)
        if removable:
            worst, _ = propose_remove(data, selected, opts, cache, executor)
            accept = worst.diff < -threshold
            trace.record(worst, "Remove", accept)
            if accept:
                selected.remove(worst.candidate)
                changed = True
        if not changed:
            break
    return _final_result(data, selected, trace, opts)


def _greedy_backward(data, opts, cache, trace, executor) -> SearchResult:
    selected = list(range(data.d))
    threshold = opts.bic_diff_threshold
    floor = 2 if opts.forcetwo else 0
    warning = None
    for _ in range(opts.itermax):
        changed = False
        if len(selected) > floor:
            worst, _ = propose_remove(data, selected, opts, cache, executor)
            accept = worst.diff < -threshold
            trace.record(worst, "Remove", accept)
            if accept:
                selected.remove(worst.candidate)
                changed = True
        excluded = [c for c in range(data.d) if c not in selected]
        if excluded and selected:
            best, _ = propose_add(data, selected, excluded, opts, cache,
                                  executor)
            accept = best.diff > threshold
            trace.record(best, "Add", accept)
            if accept:
                selected.append(best.candidate)
                selected.sort()
                changed = True
        if not selected:
            warning = "backward search removed every column"
            break
        if not changed:
            break
    return _final_result(data, selected, trace, opts, warning=warning)


def headlong_search(data: Dataset, opts: SearchOptions | None = None) -> SearchResult:
    """Headlong forward subset search.

    Inclusion steps scan the not-selected columns in ascending order and
    accept the first whose diff exceeds bic_upper; any scanned column
    whose diff falls strictly below bic_lower is discarded from the rest
    of the search. Exclusion steps scan the selected columns in ascending
    order and remove the first whose diff falls below bic_upper,
    discarding it permanently when it is also below bic_lower. forcetwo
    behaves as in the greedy search. The search stops when an inclusion
    and an exclusion pass both change nothing, or at itermax.
    """
    opts = opts or SearchOptions()
    if data.d < 2:
        raise ValueError("subset search needs at least two columns")
    if opts.direction != "forward":
        raise ValueError("headlong search is forward-only")
    cache = _EvalCache()
    trace = _Trace(data)
    executor = _make_executor(opts)
    selected: list[int] = []
    discarded: set[int] = set()
    accepted_adds = 0
    try:
        for _ in range(opts.itermax):
            changed = False
            candidates = [c for c in range(data.d)
                          if c not in selected and c not in discarded]
            if candidates and opts.forcetwo and accepted_adds < 2:
                best, results = propose_add(data, selected, candidates, opts,
                                            cache, executor)
                for res in results:
                    if res.candidate != best.candidate and res.diff < opts.bic_lower:
                        discarded.add(res.candidate)
                trace.record(best, "Add", True)
                selected.append(best.candidate)
                accepted_adds += 1
                changed = True
            else:
                for c in candidates:
                    res = _eval_candidate((data, tuple(selected), c, opts,
                                           cache))[0]
                    if res.diff > opts.bic_upper:
                        trace.record(res, "Add", True)
                        selected.append(c)
                        accepted_adds += 1
                        changed = True
                        break
                    trace.record(res, "Add", False)
                    if res.diff < opts.bic_lower:
                        discarded.add(c)
            removable = bool(selected) and (not opts.forcetwo or len(selected) >= 3)
            if removable:
                for j in sorted(selected):
                    rest = tuple(c for c in selected if c != j)
                    res = _eval_candidate((data, rest, j, opts, cache))[0]
                    if res.diff < opts.bic_upper:
                        trace.record(res, "Remove", True)
                        selected.remove(j)
                        if res.diff < opts.bic_lower:
                            discarded.add(j)
                        changed = True
                        break
                    trace.record(res, "Remove", False)
            if not changed:
                break
    finally:
        if executor is not None:
            executor.shutdown()
    return _final_result(data, selected, trace, opts, discarded=discarded)


def search(data: Dataset, opts: SearchOptions | None = None) -> SearchResult:
    """Run the search named by opts.search (greedy or headlong)."""
    opts = opts or SearchOptions()
    if opts.search == "headlong":
        return headlong_search(data, opts)
    return greedy_search(data, opts)
