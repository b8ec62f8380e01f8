"""Command-line front end.

Subcommands: select (subset search), fit (mixture fit summary), gen
(synthetic data), metrics (partition comparison), bench (speedup studies).
Flag names transliterate the library options in kebab case; every flag
default is taken from the corresponding dataclass field so the CLI, the
library and the documented defaults cannot drift apart.

Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import bench as bench_mod
from . import datagen
from .dataio import DataError, Dataset, read_csv, variable_set, write_csv
from .gmm import FitOptions, NoViableModelError, best_fit
from .metrics import ari, cer, class_error, vser
from .selection import (
    SearchOptions,
    render_trace,
    search,
    trace_to_jsonl,
)

_SEARCH_DEFAULTS = {f.name: f.default for f in dataclasses.fields(SearchOptions)
                    if f.default is not dataclasses.MISSING}
_FIT_DEFAULTS = {f.name: f.default for f in dataclasses.fields(FitOptions)}


def parse_g_range(text: str) -> tuple[int, ...]:
    """Parse "a:b" or a comma list into a tuple of component counts."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(p) for p in text.split(",") if p.strip())


def _g_default() -> str:
    g = _SEARCH_DEFAULTS["g_range"]
    return f"{min(g)}:{max(g)}"


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", default=_g_default(), metavar="A:B",
                   help="component counts, e.g. 1:9 or 2,3,5")
    p.add_argument("--em-models1", default=",".join(_SEARCH_DEFAULTS["em_models_1"]),
                   help="univariate covariance models (comma list)")
    p.add_argument("--em-models2", default=",".join(_SEARCH_DEFAULTS["em_models_2"]),
                   help="multivariate covariance models (comma list)")
    p.add_argument("--samp", action="store_true",
                   default=_FIT_DEFAULTS["samp"],
                   help="sub-sample rows for the initialization tree")
    p.add_argument("--sampsize", type=int, default=None,
                   help="rows used by the initialization tree "
                        "(default about n/2)")
    p.add_argument("--hc-model", default=_FIT_DEFAULTS["hc_model"],
                   choices=("EII", "EEE", "VVV"),
                   help="agglomerative initialization criterion")
    p.add_argument("--no-allow-eee", dest="allow_eee", action="store_false",
                   default=_FIT_DEFAULTS["allow_eee"],
                   help="disable the EEE initialization fallback")
    p.add_argument("--tol", type=float, default=_FIT_DEFAULTS["tol"],
                   help="EM convergence tolerance")
    p.add_argument("--max-iter", type=int, default=_FIT_DEFAULTS["max_iter"],
                   help="EM iteration cap")
    p.add_argument("--seed", type=int, default=_FIT_DEFAULTS["seed"],
                   help="seed for row sub-sampling")
    p.add_argument("--no-header", action="store_true",
                   help="input CSV has no header row")


def _fit_options(args) -> FitOptions:
    return FitOptions(
        tol=args.tol, max_iter=args.max_iter, hc_model=args.hc_model,
        allow_eee=args.allow_eee, samp=args.samp, sampsize=args.sampsize,
        seed=args.seed,
    )


def _search_options(args) -> SearchOptions:
    return SearchOptions(
        g_range=parse_g_range(args.g),
        em_models_1=tuple(args.em_models1.split(",")),
        em_models_2=tuple(args.em_models2.split(",")),
        direction=args.direction,
        search=args.search,
        bic_diff_threshold=args.bic_diff,
        bic_upper=args.bic_upper,
        bic_lower=args.bic_lower,
        itermax=args.itermax,
        forcetwo=args.forcetwo,
        fit_options=_fit_options(args),
        regression_mode=args.regression_mode,
        parallel=args.parallel,
    )


def _read_input(args) -> Dataset:
    return read_csv(args.data, header=False if args.no_header else None)


def cmd_select(args) -> int:
    data = _read_input(args)
    opts = _search_options(args)
    result = search(data, opts)
    print(f"Stepwise ({opts.direction}) {opts.search} search:")
    print(render_trace(result.trace))
    print()
    if result.warning:
        print(f"warning: {result.warning}")
    if result.candidates_discarded:
        names = ", ".join(data.col_names[i]
                          for i in sorted(result.candidates_discarded))
        print(f"Discarded from consideration: {names}")
    print("Selected subset: " + ", ".join(result.subset_names(data)))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(trace_to_jsonl(result.trace))
            fh.write("# subset: " + ",".join(str(i) for i in result.subset) + "\n")
    return 0


def cmd_fit(args) -> int:
    data = _read_input(args)
    if args.subset:
        names = [s.strip() for s in args.subset.split(",")]
        idx = [data.name_to_index(nm) for nm in names]
        from .dataio import subset_columns

        data = subset_columns(data, variable_set(idx, data.d))
    models = (tuple(args.em_models1.split(",")) if data.d == 1
              else tuple(args.em_models2.split(",")))
    fit = best_fit(data, parse_g_range(args.g), models, _fit_options(args))
    print(fit.summary(data.col_names))
    if args.truth:
        truth = _read_labels(args.truth)
        if truth.shape[0] != data.n:
            raise DataError("truth labels length does not match data")
        print(f"ARI = {ari(truth, fit.classification):.6f}")
        print(f"error rate = {class_error(truth, fit.classification):.6f}")
    return 0


def cmd_gen(args) -> int:
    spec = datagen.ScenarioSpec(id=args.scenario, size=args.n, seed=args.seed)
    data, labels, truth = datagen.generate(spec)
    write_csv(data, args.out)
    labels_path = args.labels or (args.out + ".labels.csv")
    with open(labels_path, "w") as fh:
        fh.write("label\n")
        for v in labels:
            fh.write(f"{int(v) + 1}\n")
    truth_path = args.truth_out or (args.out + ".truth.txt")
    with open(truth_path, "w") as fh:
        for i in truth:
            fh.write(data.col_names[i] + "\n")
    print(f"wrote {data.n}x{data.d} dataset to {args.out}")
    return 0


def _read_labels(path) -> np.ndarray:
    raw = np.loadtxt(path, dtype=str, delimiter=",", ndmin=1)
    if raw.ndim > 1:
        raw = raw[:, 0]
    if raw.size and raw[0].strip().lower() in ("label", "labels", "class"):
        raw = raw[1:]
    return raw


def cmd_metrics(args) -> int:
    a = _read_labels(args.a)
    b = _read_labels(args.b)
    print(f"ARI = {ari(a, b):.6f}")
    print(f"CER = {cer(a, b):.6f}")
    print(f"error rate = {class_error(a, b):.6f}")
    if args.selected and args.truth_set and args.d:
        sel = [int(s) for s in args.selected.split(",") if s.strip()]
        tru = [int(s) for s in args.truth_set.split(",") if s.strip()]
        print(f"VSER = {vser(variable_set(sel, args.d), variable_set(tru, args.d), args.d):.6f}")
    return 0


def cmd_bench(args) -> int:
    if args.amdahl:
        series = bench_mod.read_series_csv(args.amdahl)
        f, s_max = bench_mod.amdahl_fit(series)
        smax_text = "inf" if s_max == float("inf") else f"{s_max:.2f}"
        print(f"sequential fraction f = {f:.4f}")
        print(f"maximum speedup s_max = {smax_text}")
        if args.out:
            bench_mod.write_series_csv(series, args.out, (f, s_max))
        if args.plot:
            bench_mod.plot_series(series, args.plot, (f, s_max))
        return 0
    raise DataError("bench requires --amdahl SERIES.csv "
                    "(see demos/ for timing studies)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixselect",
        description="Variable selection for Gaussian-mixture clustering")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("select", help="search for clustering variables")
    ps.add_argument("data", help="input CSV file")
    _add_fit_flags(ps)
    ps.add_argument("--search", default=_SEARCH_DEFAULTS["search"],
                    choices=("greedy", "headlong"))
    ps.add_argument("--direction", default=_SEARCH_DEFAULTS["direction"],
                    choices=("forward", "backward"))
    ps.add_argument("--bic-diff", type=float,
                    default=_SEARCH_DEFAULTS["bic_diff_threshold"],
                    help="greedy acceptance threshold")
    ps.add_argument("--bic-upper", type=float,
                    default=_SEARCH_DEFAULTS["bic_upper"],
                    help="headlong acceptance level")
    ps.add_argument("--bic-lower", type=float,
                    default=_SEARCH_DEFAULTS["bic_lower"],
                    help="headlong discard level")
    ps.add_argument("--itermax", type=int, default=_SEARCH_DEFAULTS["itermax"])
    ps.add_argument("--no-forcetwo", dest="forcetwo", action="store_false",
                    default=_SEARCH_DEFAULTS["forcetwo"],
                    help="do not force the first two inclusions")
    ps.add_argument("--regression-mode", default=_SEARCH_DEFAULTS["regression_mode"],
                    choices=("all", "subset"))
    ps.add_argument("--parallel", type=int, default=None, metavar="N",
                    help="evaluate candidates on N worker processes")
    ps.add_argument("--out", default=None,
                    help="write the trace as JSON lines to this file")
    ps.set_defaults(func=cmd_select)

    pf = sub.add_parser("fit", help="fit and summarise the best mixture")
    pf.add_argument("data", help="input CSV file")
    _add_fit_flags(pf)
    pf.add_argument("--subset", default=None,
                    help="comma list of column names to fit on")
    pf.add_argument("--truth", default=None,
                    help="CSV of true labels for ARI / error rate")
    pf.set_defaults(func=cmd_fit)

    pg = sub.add_parser("gen", help="generate a synthetic dataset")
    pg.add_argument("--scenario", required=True, choices=datagen.SCENARIOS)
    pg.add_argument("--n", type=int, required=True,
                    help="rows (per group for the wt scenario)")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", required=True, help="output CSV path")
    pg.add_argument("--labels", default=None, help="labels CSV path")
    pg.add_argument("--truth-out", default=None, help="truth-set text path")
    pg.set_defaults(func=cmd_gen)

    pm = sub.add_parser("metrics", help="compare two labelings")
    pm.add_argument("--a", required=True, help="first labels CSV")
    pm.add_argument("--b", required=True, help="second labels CSV")
    pm.add_argument("--selected", default=None,
                    help="comma list of selected column indices")
    pm.add_argument("--truth-set", default=None,
                    help="comma list of true clustering column indices")
    pm.add_argument("--d", type=int, default=None,
                    help="total number of columns (for VSER)")
    pm.set_defaults(func=cmd_metrics)

    pb = sub.add_parser("bench", help="speedup analysis")
    pb.add_argument("--amdahl", default=None,
                    help="CSV of (P, t) or (P, s) timings to fit")
    pb.add_argument("--out", default=None, help="write (P, t, s) CSV here")
    pb.add_argument("--plot", default=None, help="write a speedup plot here")
    pb.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NoViableModelError, RuntimeError, OSError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
