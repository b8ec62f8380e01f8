"""Timing studies: headlong vs greedy, sub-sampled initialization, and the
parallel-speedup law.

Three short experiments on generated data:

1. greedy vs headlong search wall time on the ten-column scheme;
2. sub-sampling the hierarchical initialization at growing n;
3. candidate evaluation on 1..P worker processes, with the sequential
   fraction recovered from the observed speedups.

Run from the repository root:  python demos/speedups.py
"""

import time

from mixselect.bench import SpeedupSeries, amdahl_fit, measure, write_series_csv
from mixselect.datagen import gen_twovar
from mixselect.gmm import FitOptions
from mixselect.selection import SearchOptions, greedy_search, headlong_search


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def headlong_vs_greedy() -> None:
    print("== greedy vs headlong (ten columns, n=400) ==")
    data, _, _ = gen_twovar("ten", 400, seed=0)
    gs = tuple(range(1, 6))
    g, tg = timed(lambda: greedy_search(data, SearchOptions(g_range=gs)))
    h, th = timed(lambda: headlong_search(
        data, SearchOptions(g_range=gs, search="headlong")))
    print(f"greedy   {tg:6.1f}s  subset {sorted(g.subset.indices)}")
    print(f"headlong {th:6.1f}s  subset {sorted(h.subset.indices)} "
          f"(gain {tg / th:.1f}x)")


def subsampling() -> None:
    print("\n== sub-sampled initialization (five columns) ==")
    for n in (2000, 5000):
        data, _, _ = gen_twovar("five", n, seed=1)
        gs = tuple(range(1, 6))
        full, t_full = timed(lambda: greedy_search(
            data, SearchOptions(g_range=gs)))
        samp, t_samp = timed(lambda: greedy_search(
            data, SearchOptions(g_range=gs, fit_options=FitOptions(
                samp=True, sampsize=200, seed=1))))
        same = sorted(full.subset.indices) == sorted(samp.subset.indices)
        print(f"n={n}: full {t_full:6.1f}s, sampled {t_samp:6.1f}s "
              f"(gain {t_full / t_samp:.1f}x, same subset: {same})")


def parallel_speedup() -> None:
    print("\n== parallel candidate evaluation ==")
    data, _, _ = gen_twovar("ten", 250, seed=2)
    gs = tuple(range(1, 6))

    def task(workers: int):
        return greedy_search(data, SearchOptions(
            g_range=gs, direction="backward", parallel=workers))

    series = measure(task, workers=[1, 2], repetitions=1)
    for p, s in series.speedups():
        print(f"P={p}: speedup {s:.2f}")
    if len(series.points) > 1:
        f, s_max = amdahl_fit(series)
        print(f"fitted sequential fraction f = {f:.3f} "
              f"(speedup ceiling {s_max:.1f}x)")
        write_series_csv(series, "parallel_speedups.csv", (f, s_max))
        print("wrote parallel_speedups.csv")


def main() -> None:
    headlong_vs_greedy()
    subsampling()
    parallel_speedup()


if __name__ == "__main__":
    main()
