"""Partition-comparison and variable-selection quality metrics.

All label vectors may use arbitrary hashable label values; internally they
are cross-tabulated into a contingency table. Pair-counting indices (ARI,
Rand, CER) are computed from that table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dataio import VariableSet


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two labelings of the same items."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.ndim != 2 or (arr < 0).any() or arr.sum() < 1:
            raise ValueError("contingency table must be 2-d, non-negative, n >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def contingency_table(a, b) -> ContingencyTable:
    """Build the r x c contingency table of two equal-length label vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"label vectors must match: {a.shape} vs {b.shape}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    counts = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts)


def _as_table(a, b) -> ContingencyTable:
    if b is None:
        if isinstance(a, ContingencyTable):
            return a
        return ContingencyTable(np.asarray(a))
    return contingency_table(a, b)


def _pair_counts(table: ContingencyTable):
    m = table.counts.astype(float)
    n = m.sum()
    same_both = (m * (m - 1) / 2).sum()
    same_a = (m.sum(axis=1) * (m.sum(axis=1) - 1) / 2).sum()
    same_b = (m.sum(axis=0) * (m.sum(axis=0) - 1) / 2).sum()
    total = n * (n - 1) / 2
    return same_both, same_a, same_b, total


def ari(a, b=None) -> float:
    """Hubert-Arabie adjusted Rand index.

    Accepts two label vectors, or a single contingency table (as a
    :class:`ContingencyTable` or plain count matrix). Equals 1 for
    identical partitions; the degenerate single-class/single-class case
    is defined as 1.
    """
    table = _as_table(a, b)
    same_both, same_a, same_b, total = _pair_counts(table)
    if total == 0:
        return 1.0
    expected = same_a * same_b / total
    max_index = (same_a + same_b) / 2
    if max_index == expected:
        return 1.0
    return float((same_both - expected) / (max_index - expected))


def rand_index(a, b=None) -> float:
    """Unadjusted Rand index: fraction of concordant item pairs."""
    table = _as_table(a, b)
    same_both, same_a, same_b, total = _pair_counts(table)
    if total == 0:
        return 1.0
    agreements = total + 2 * same_both - same_a - same_b
    return float(agreements / total)


def cer(a, b=None) -> float:
    """Classification error rate between partitions: 1 - Rand index."""
    return 1.0 - rand_index(a, b)


def class_error(truth, cluster=None) -> float:
    """Minimum misclassification rate over cluster-to-class assignments.

    Cluster labels are mapped onto truth labels so as to minimise the error
    rate. When there are more cluster labels than truth labels the mapping
    may be many-to-one, and the per-cluster best match is exactly optimal.
    Otherwise the mapping is one-to-one, searched exhaustively for up to 8
    cluster labels and greedily (largest clusters claim their best unused
    class first) beyond that.
    """
    table = _as_table(truth, cluster)
    counts = table.counts
    n = table.n
    r, c = counts.shape  # rows: truth classes, cols: cluster labels
    if c > r:
        correct = counts.max(axis=0).sum()
        return float((n - correct) / n)
    if c <= 8:
        best = 0
        for assign in itertools.permutations(range(r), c):
            correct = sum(counts[assign[j], j] for j in range(c))
            best = max(best, correct)
        return float((n - best) / n)
    # Greedy fallback: biggest clusters first, injective assignment.
    order = np.argsort(-counts.sum(axis=0))
    used: set[int] = set()
    correct = 0
    for j in order:
        col = counts[:, j].copy()
        col[list(used)] = -1
        i = int(np.argmax(col))
        used.add(i)
        correct += counts[i, j]
    return float((n - correct) / n)


def vser(selected: VariableSet, truth: VariableSet, d: int) -> float:
    """Variable selection error rate: |symmetric difference| / d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    sel = set(selected.indices if isinstance(selected, VariableSet) else selected)
    tru = set(truth.indices if isinstance(truth, VariableSet) else truth)
    for i in sel | tru:
        if not 0 <= i < d:
            raise ValueError(f"index {i} out of range for d={d}")
    return len(sel ^ tru) / d
