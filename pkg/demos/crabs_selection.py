"""Variable selection walkthrough on the crabs morphometry fixture.

Fits the best mixture on all five measurements, runs forward and backward
greedy searches, refits on the selected subset, and compares both
clusterings against the true colour-by-sex classes.

Run from the repository root:  python demos/crabs_selection.py
"""

import pathlib

import numpy as np

import mixselect as ms
from mixselect.gmm import MULTIVARIATE_MODELS, best_fit
from mixselect.metrics import ari, class_error
from mixselect.selection import SearchOptions, greedy_search, render_trace

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    data = ms.read_csv(DATA / "crabs.csv")
    classes = np.array((DATA / "crabs_class.csv").read_text().split()[1:])

    print("== best mixture on all five measurements ==")
    full = best_fit(data, range(1, 6), MULTIVARIATE_MODELS)
    print(full.summary(data.col_names))
    print(f"ARI vs true classes:  {ari(classes, full.classification):.4f}")
    print(f"error rate:           {class_error(classes, full.classification):.4f}")

    print("\n== forward greedy search, G = 1..5 ==")
    opts = SearchOptions(g_range=tuple(range(1, 6)))
    fwd = greedy_search(data, opts)
    print(render_trace(fwd.trace))
    print("Selected subset:", ", ".join(fwd.subset_names(data)))

    print("\n== backward greedy search ==")
    bwd = greedy_search(data, SearchOptions(g_range=tuple(range(1, 6)),
                                            direction="backward"))
    print(render_trace(bwd.trace))
    print("Selected subset:", ", ".join(bwd.subset_names(data)))

    print("\n== refit on the selected subset ==")
    sub = fwd.final_fit
    print(sub.summary(fwd.subset_names(data)))
    print(f"ARI vs true classes:  {ari(classes, sub.classification):.4f}")
    print(f"error rate:           {class_error(classes, sub.classification):.4f}")


if __name__ == "__main__":
    main()
