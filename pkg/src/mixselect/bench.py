"""Timing harness and parallel-speedup analysis.

measure() times a task at several worker counts (median wall seconds over
repetitions, identical inputs throughout) and reports observed speedups
s_P = t_1 / t_P. amdahl_fit() recovers the sequential fraction f of the
speedup law S_P = 1 / (f + (1 - f) / P) by least squares on the observed
speedups; 1/f is the speedup ceiling an infinite machine could reach.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from statistics import median
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SpeedupSeries:
    """Wall times by worker count, with the single-worker baseline."""

    points: tuple[tuple[int, float], ...]  # (P, seconds), distinct P >= 1

    def __post_init__(self) -> None:
        pts = tuple((int(p), float(t)) for p, t in self.points)
        ps = [p for p, _ in pts]
        if len(set(ps)) != len(ps) or any(p < 1 for p in ps):
            raise ValueError("worker counts must be distinct and >= 1")
        if any(t <= 0 for _, t in pts):
            raise ValueError("times must be positive")
        if 1 not in ps:
            raise ValueError("baseline (P=1) timing is required")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @property
    def baseline(self) -> float:
        return dict(self.points)[1]

    def speedups(self) -> tuple[tuple[int, float], ...]:
        t1 = self.baseline
        return tuple((p, t1 / t) for p, t in self.points)


def measure(task: Callable[[int], object], workers,
            repetitions: int = 3) -> SpeedupSeries:
    """Median wall time of task(P) for each worker count P.

    The task must be deterministic in everything except its worker count
    so that only timing, never output, varies across the grid. Task
    failures propagate with the failing worker count attached.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    points = []
    for P in workers:
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            try:
                task(int(P))
            except Exception as exc:
                raise RuntimeError(f"benchmark task failed at workers={P}: {exc}"
                                   ) from exc
            times.append(time.perf_counter() - start)
        points.append((int(P), median(times)))
    return SpeedupSeries(tuple(points))


def amdahl_speedup(f: float, P) -> np.ndarray | float:
    """Predicted speedup on P workers given sequential fraction f."""
    P = np.asarray(P, dtype=float)
    return 1.0 / (f + (1.0 - f) / P)


def _sse(f: float, ps: np.ndarray, ss: np.ndarray) -> float:
    return float(((ss - amdahl_speedup(f, ps)) ** 2).sum())


def amdahl_fit(series: SpeedupSeries) -> tuple[float, float]:
    """Least-squares sequential fraction and speedup ceiling (f, 1/f).

    f is located on [0, 1] by a coarse grid refined with golden-section
    search to 1e-4; a perfectly scaling series gives f = 0 and an
    infinite ceiling.
    """
    pts = series.speedups()
    if len(pts) < 2:
        raise ValueError("need timings at two or more worker counts")
    ps = np.array([p for p, _ in pts], dtype=float)
    ss = np.array([s for _, s in pts])

    grid = np.linspace(0.0, 1.0, 1001)
    errs = [_sse(f, ps, ss) for f in grid]
    k = int(np.argmin(errs))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = _sse(c, ps, ss), _sse(d, ps, ss)
    while b - a > 1e-6:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _sse(c, ps, ss)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _sse(d, ps, ss)
    f = (a + b) / 2.0
    if _sse(grid[k], ps, ss) < _sse(f, ps, ss):
        f = float(grid[k])
    f = float(min(max(f, 0.0), 1.0))
    s_max = math.inf if f == 0.0 else 1.0 / f
    return f, s_max


def write_series_csv(series: SpeedupSeries, path,
                     fitted: tuple[float, float] | None = None) -> None:
    """CSV of (P, seconds, speedup) rows, plus the fitted (f, s_max)."""
    speed = dict(series.speedups())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["P", "t", "s"])
        for p, t in series.points:
            writer.writerow([p, format(t, ".6f"), format(speed[p], ".6f")])
        if fitted is not None:
            writer.writerow([])
            writer.writerow(["f", format(fitted[0], ".6f")])
            writer.writerow(["s_max", "inf" if math.isinf(fitted[1])
                             else format(fitted[1], ".6f")])


def read_series_csv(path) -> SpeedupSeries:
    """Read a (P, t[, s]) CSV back into a series.

    Accepts either wall times (column t) or pre-computed speedups
    (column s, converted back to times against a unit baseline).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and r[0].strip()]
    header = [c.strip().lower() for c in rows[0]]
    if "p" not in header:
        raise ValueError(f"{path}: expected a header with a P column")
    pcol = header.index("p")
    tcol = header.index("t") if "t" in header else None
    scol = header.index("s") if "s" in header else None
    points = []
    for row in rows[1:]:
        if len(row) <= pcol or not row[pcol].strip().isdigit():
            break
        p = int(row[pcol])
        if tcol is not None and len(row) > tcol and row[tcol].strip():
            points.append((p, float(row[tcol])))
        elif scol is not None:
            points.append((p, 1.0 / float(row[scol])))
        else:
            raise ValueError(f"{path}: need a t or s column")
    return SpeedupSeries(tuple(points))


def plot_series(series: SpeedupSeries, path, fitted=None) -> None:
    """Static plot of observed speedups with the fitted curve (optional)."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plotting requires matplotlib") from exc
    pts = series.speedups()
    ps = [p for p, _ in pts]
    ss = [s for _, s in pts]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ps, ss, "o", label="observed")
    if fitted is not None:
        grid = np.linspace(1, max(ps), 200)
        ax.plot(grid, amdahl_speedup(fitted[0], grid), "-",
                label=f"fit f={fitted[0]:.3f}")
    ax.plot(ps, ps, ":", color="grey", label="ideal")
    ax.set_xlabel("workers")
    ax.set_ylabel("speedup")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
