"""Model-based agglomerative clustering used to initialize EM.

Starting from singletons, each step merges the pair of clusters that
maximizes the classification likelihood of the chosen covariance
criterion, i.e. minimizes the merge cost:

* EII: the increase in the pooled trace, n_i*n_k/(n_i+n_k) * ||mu_i-mu_k||^2
  (Ward's method).
* VVV: the increase in sum_g n_g * log det((W_g + ridge*I) / n_g), where a
  tiny diagonal ridge keeps the determinant defined (and sensitive to
  cluster thinness) while group scatters are still singular.
* EEE: log det of the pooled within-cluster scatter after the merge; while
  the pooled scatter is still singular the trace criterion (Ward) is used.

EII and VVV costs are pair-local (they depend only on the two clusters
involved and never change once both exist), so the builder keeps a lazily
revalidated nearest-neighbour table: merged clusters get fresh ids, cached
entries pointing at dead ids act as lower bounds, and a row is recomputed
only when it surfaces as the candidate minimum. Each merge therefore costs
one vectorized row evaluation plus occasional revalidations, which keeps
tens of thousands of rows tractable. The EEE cost depends on the global
pooled scatter and is re-scanned every step; it is meant for modest n.

Ties in merge costs break towards the lowest cluster-id pair, making trees
deterministic for a fixed row order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataio import Dataset

HC_CRITERIA = ("EII", "EEE", "VVV")

# Relative diagonal ridge inside the VVV merge criterion: group scatter
# matrices are singular until a cluster spans the full dimension, so the
# log determinant is taken of W_g + ridge*I. The ridge keeps the term
# defined (and sensitive to genuine cluster thinness) for small clusters
# while capping the reward a handful of coincidentally collinear points
# can earn, which would otherwise survive as spurious top-level branches.
_RIDGE_REL = 1e-4


@dataclass(frozen=True)
class MergeTree:
    """Agglomerative merge history over n_used rows.

    Clusters are numbered 0..n-1 for the singletons; the merge at step t
    joins cluster ids merges[t] = (p, q), p < q, into a new cluster with
    id n + t. cut(G) replays the first n - G merges and returns hard
    labels in 0..G-1 (renumbered in sorted-root order).
    """

    n: int
    merges: tuple[tuple[int, int], ...]

    def cut(self, G: int) -> np.ndarray:
        if not 1 <= G <= self.n:
            raise ValueError(f"cannot cut a tree over {self.n} rows at G={G}")
        k = self.n - G
        parent = np.arange(self.n + k)
        for t, (p, q) in enumerate(self.merges[:k]):
            parent[p] = self.n + t
            parent[q] = self.n + t
        roots = np.empty(self.n, dtype=int)
        for i in range(self.n):
            r = i
            while parent[r] != r:
                r = parent[r]
            j = i
            while parent[j] != r:
                parent[j], j = r, parent[j]
            roots[i] = r
        _, labels = np.unique(roots, return_inverse=True)
        return labels


def _pairwise_sq_dists(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    sq = (X ** 2).sum(axis=1)[:, None] + (Y ** 2).sum(axis=1)[None, :]
    sq -= 2.0 * X @ Y.T
    np.maximum(sq, 0.0, out=sq)
    return sq


def _initial_neighbors(X: np.ndarray, block: int = 1024) -> np.ndarray:
    """Nearest other row per row, by squared distance, lowest index on ties.

    Valid as the first nearest-neighbour pass for both EII and VVV because
    their singleton merge costs are strictly increasing in ||x_i - x_k||^2.
    """
    n = X.shape[0]
    nn = np.empty(n, dtype=int)
    for start in range(0, n, block):
        stop = min(start + block, n)
        sq = _pairwise_sq_dists(X[start:stop], X)
        sq[np.arange(stop - start), np.arange(start, stop)] = np.inf
        nn[start:stop] = np.argmin(sq, axis=1)
    return nn


class _WardState:
    """EII criterion: merge cost c * ||mu_i - mu_k||^2, no scatter needed."""

    def __init__(self, X: np.ndarray):
        n, d = X.shape
        cap = 2 * n - 1
        self.ns = np.zeros(cap)
        self.ns[:n] = 1.0
        self.means = np.zeros((cap, d))
        self.means[:n] = X
        self.singleton_cost = lambda sq: 0.5 * sq

    def cost_block(self, ids: np.ndarray, ks: np.ndarray) -> np.ndarray:
        dmu = self.means[ks][None, :, :] - self.means[ids][:, None, :]
        c = (self.ns[ids][:, None] * self.ns[ks][None, :]
             / (self.ns[ids][:, None] + self.ns[ks][None, :]))
        return c * (dmu ** 2).sum(axis=2)

    def merge_into(self, new: int, p: int, q: int) -> None:
        np_, nq = self.ns[p], self.ns[q]
        self.means[new] = (np_ * self.means[p] + nq * self.means[q]) / (np_ + nq)
        self.ns[new] = np_ + nq


def _channel_det(ch: np.ndarray, d: int) -> np.ndarray:
    """Determinant from upper-triangle channels, small-d closed forms."""
    if d == 1:
        return ch[..., 0]
    if d == 2:
        w00, w01, w11 = ch[..., 0], ch[..., 1], ch[..., 2]
        return w00 * w11 - w01 * w01
    w00, w01, w02 = ch[..., 0], ch[..., 1], ch[..., 2]
    w11, w12, w22 = ch[..., 3], ch[..., 4], ch[..., 5]
    return (w00 * (w11 * w22 - w12 * w12)
            - w01 * (w01 * w22 - w12 * w02)
            + w02 * (w01 * w12 - w11 * w02))


class _VvvState:
    """VVV criterion over scatter stored as upper-triangle channels (d<=3)."""

    def __init__(self, X: np.ndarray):
        n, d = X.shape
        cap = 2 * n - 1
        self.d = d
        self.rows, self.cols = np.triu_indices(d)
        self.diag_ch = np.flatnonzero(self.rows == self.cols)
        self.ns = np.zeros(cap)
        self.ns[:n] = 1.0
        self.means = np.zeros((cap, d))
        self.means[:n] = X
        self.ch = np.zeros((cap, self.rows.size))
        self.ridge = _RIDGE_REL * float(X.var(axis=0).mean()) + 1e-300
        self.terms = np.zeros(cap)
        self.terms[:n] = self._terms(self.ch[:n], self.ns[:n])

    def _terms(self, ch: np.ndarray, ns: np.ndarray) -> np.ndarray:
        ch = ch.copy()
        ch[..., self.diag_ch] += self.ridge
        det = _channel_det(ch, self.d)
        return ns * (np.log(det) - self.d * np.log(ns))

    def cost_block(self, ids: np.ndarray, ks: np.ndarray) -> np.ndarray:
        dmu = self.means[ks][None, :, :] - self.means[ids][:, None, :]
        nk = self.ns[ks][None, :]
        ni = self.ns[ids][:, None]
        c = ni * nk / (ni + nk)
        merged = (self.ch[ids][:, None, :] + self.ch[ks][None, :, :]
                  + c[..., None] * dmu[..., self.rows] * dmu[..., self.cols])
        term_m = self._terms(merged, ni + nk)
        return term_m - self.terms[ids][:, None] - self.terms[ks][None, :]

    def merge_into(self, new: int, p: int, q: int) -> None:
        np_, nq = self.ns[p], self.ns[q]
        c = np_ * nq / (np_ + nq)
        dmu = self.means[q] - self.means[p]
        self.ch[new] = self.ch[p] + self.ch[q] + c * dmu[self.rows] * dmu[self.cols]
        self.means[new] = (np_ * self.means[p] + nq * self.means[q]) / (np_ + nq)
        self.ns[new] = np_ + nq
        self.terms[new] = self._terms(self.ch[new][None], self.ns[new: new + 1])[0]


class _VvvWideState:
    """VVV criterion with full scatter matrices, for d >= 4."""

    def __init__(self, X: np.ndarray):
        n, d = X.shape
        cap = 2 * n - 1
        self.d = d
        self.ns = np.zeros(cap)
        self.ns[:n] = 1.0
        self.means = np.zeros((cap, d))
        self.means[:n] = X
        self.scatter = np.zeros((cap, d, d))
        self.ridge = _RIDGE_REL * float(X.var(axis=0).mean()) + 1e-300
        self.terms = np.zeros(cap)
        self.terms[:n] = self._terms(self.scatter[:n], self.ns[:n])

    def _terms(self, scatter: np.ndarray, ns: np.ndarray) -> np.ndarray:
        d = self.d
        ridged = scatter + self.ridge * np.eye(d)
        _, logdet = np.linalg.slogdet(ridged)
        return ns * (logdet - d * np.log(ns))

    def cost_block(self, ids: np.ndarray, ks: np.ndarray) -> np.ndarray:
        out = np.empty((ids.size, ks.size))
        for r, i in enumerate(ids):
            dmu = self.means[ks] - self.means[i]
            c = self.ns[i] * self.ns[ks] / (self.ns[i] + self.ns[ks])
            merged = (self.scatter[ks] + self.scatter[i]
                      + c[:, None, None] * np.einsum("ki,kj->kij", dmu, dmu))
            nm = self.ns[ks] + self.ns[i]
            out[r] = self._terms(merged, nm) - self.terms[ks] - self.terms[i]
        return out

    def merge_into(self, new: int, p: int, q: int) -> None:
        np_, nq = self.ns[p], self.ns[q]
        c = np_ * nq / (np_ + nq)
        dmu = self.means[q] - self.means[p]
        self.scatter[new] = self.scatter[p] + self.scatter[q] + c * np.outer(dmu, dmu)
        self.means[new] = (np_ * self.means[p] + nq * self.means[q]) / (np_ + nq)
        self.ns[new] = np_ + nq
        self.terms[new] = self._terms(self.scatter[new][None],
                                      self.ns[new: new + 1])[0]


def _initial_costs(state, nn: np.ndarray) -> np.ndarray:
    """Vectorized singleton-pair costs for the initial neighbour table."""
    n = nn.shape[0]
    dmu = state.means[nn] - state.means[:n]
    if isinstance(state, _WardState):
        return 0.5 * (dmu ** 2).sum(axis=1)
    if isinstance(state, _VvvState):
        merged = 0.5 * dmu[:, state.rows] * dmu[:, state.cols]
        term_m = state._terms(merged, np.full(n, 2.0))
        return term_m - state.terms[nn] - state.terms[:n]
    merged = 0.5 * np.einsum("ki,kj->kij", dmu, dmu)
    term_m = state._terms(merged, np.full(n, 2.0))
    return term_m - state.terms[nn] - state.terms[:n]


def _agglomerate(state) -> tuple[tuple[int, int], ...]:
    """Lazy nearest-neighbour agglomeration for pair-local merge costs.

    Each cluster id carries a cached (neighbour, cost) entry. Entries whose
    neighbour has merged away are exact costs to a dead cluster and hence
    lower bounds on the row minimum (pair costs never change, and cheaper
    new clusters would have overwritten the cache on creation). Popping the
    global cached minimum is therefore safe: if its neighbour is alive the
    pair is the true global minimum; otherwise one row recomputation makes
    the entry exact and the pop repeats.
    """
    n = (state.ns > 0).sum()
    if n < 2:
        return ()
    cap = 2 * n - 1
    alive = np.zeros(cap, dtype=bool)
    alive[:n] = True
    ids = np.arange(cap)
    nn = np.full(cap, -1, dtype=int)
    nncost = np.full(cap, np.inf)
    nn[:n] = _initial_neighbors(state.means[:n])
    nncost[:n] = _initial_costs(state, nn[:n])
    merges: list[tuple[int, int]] = []
    batch = 64
    for t in range(n - 1):
        while True:
            m = int(np.argmin(np.where(alive, nncost, np.inf)))
            if alive[nn[m]]:
                break
            # Revalidate the popped row together with the next-cheapest rows
            # whose cached neighbour is also dead; extra revalidations are
            # always safe and amortize the vectorized call.
            dead = alive & ~alive[np.maximum(nn, 0)]
            cand = ids[dead]
            if cand.size > batch:
                cand = cand[np.argpartition(nncost[cand], batch)[:batch]]
            act = ids[alive]
            block = state.cost_block(cand, act)
            block[np.arange(cand.size), np.searchsorted(act, cand)] = np.inf
            pos = np.argmin(block, axis=1)
            nn[cand] = act[pos]
            nncost[cand] = block[np.arange(cand.size), pos]
        p, q = (m, int(nn[m])) if m < nn[m] else (int(nn[m]), m)
        new = n + t
        merges.append((p, q))
        state.merge_into(new, p, q)
        alive[p] = alive[q] = False
        nncost[p] = nncost[q] = np.inf
        alive[new] = True
        others = ids[alive]
        others = others[others != new]
        if others.size == 0:
            break
        row = state.cost_block(np.array([new]), others)[0]
        best = int(np.argmin(row))
        nn[new], nncost[new] = others[best], row[best]
        better = row < nncost[others]
        nn[others[better]] = new
        nncost[others[better]] = row[better]
    return tuple(merges)


def _build_eee(X: np.ndarray) -> tuple[tuple[int, int], ...]:
    n, d = X.shape
    cap = 2 * n - 1
    ns = np.zeros(cap)
    ns[:n] = 1.0
    means = np.zeros((cap, d))
    means[:n] = X
    pooled = np.zeros((d, d))
    alive = np.zeros(cap, dtype=bool)
    alive[:n] = True
    ids = np.arange(cap)
    merges: list[tuple[int, int]] = []
    for t in range(n - 1):
        act = ids[alive]
        try:
            L = np.linalg.cholesky(pooled)
            v = np.linalg.solve(L, means[act].T).T
        except np.linalg.LinAlgError:
            v = means[act]  # trace regime: plain Ward ordering
        sq = _pairwise_sq_dists(v, v)
        c = (ns[act][:, None] * ns[act][None, :]
             / (ns[act][:, None] + ns[act][None, :]))
        cost = c * sq
        cost[np.arange(act.size), np.arange(act.size)] = np.inf
        flat = int(np.argmin(cost))
        ai, bi = divmod(flat, act.size)
        p, q = int(act[min(ai, bi)]), int(act[max(ai, bi)])
        merges.append((p, q))
        new = n + t
        cc = ns[p] * ns[q] / (ns[p] + ns[q])
        dmu = means[q] - means[p]
        pooled += cc * np.outer(dmu, dmu)
        means[new] = (ns[p] * means[p] + ns[q] * means[q]) / (ns[p] + ns[q])
        ns[new] = ns[p] + ns[q]
        alive[p] = alive[q] = False
        alive[new] = True
    return tuple(merges)


def hclust_init(data: Dataset | np.ndarray, criterion: str = "VVV",
                rows: np.ndarray | None = None) -> MergeTree:
    """Agglomerative merge tree over the (optionally sub-sampled) rows.

    Parameters
    ----------
    data : Dataset or array
        Observations to cluster.
    criterion : {"EII", "EEE", "VVV"}
        Covariance criterion whose classification likelihood drives the
        merges. For one-dimensional data EII/EEE reduce to Ward and VVV
        to the varying-variance analogue.
    rows : array of row indices, optional
        Build the tree on this subset only (see extend_partition).
    """
    if criterion not in HC_CRITERIA:
        raise ValueError(f"unsupported hierarchical criterion {criterion!r}")
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    if rows is not None:
        X = X[np.asarray(rows, dtype=int)]
    n, d = X.shape
    if n < 1:
        raise ValueError("no rows to cluster")
    if n == 1:
        return MergeTree(n=1, merges=())
    if criterion == "EEE" and d > 1:
        return MergeTree(n=n, merges=_build_eee(X))
    if criterion in ("EII", "EEE"):
        state = _WardState(X)
    elif d <= 3:
        state = _VvvState(X)
    else:
        state = _VvvWideState(X)
    return MergeTree(n=n, merges=_agglomerate(state))


def extend_partition(data: Dataset | np.ndarray, rows: np.ndarray | None,
                     partition: np.ndarray) -> np.ndarray:
    """Extend a partition of sampled rows to every row of the data.

    Each unsampled row joins the class whose sampled-row centroid is
    nearest (the highest-density class under a pooled spherical Gaussian
    fit of the sampled rows). Sampled rows keep their labels.
    """
    X = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    n = X.shape[0]
    partition = np.asarray(partition, dtype=int)
    if rows is None:
        return partition.copy()
    rows = np.asarray(rows, dtype=int)
    if rows.shape[0] != partition.shape[0]:
        raise ValueError("partition length does not match sampled rows")
    full = np.full(n, -1, dtype=int)
    full[rows] = partition
    missing = np.flatnonzero(full < 0)
    if missing.size == 0:
        return full
    classes = np.unique(partition)
    centroids = np.stack([X[rows[partition == g]].mean(axis=0) for g in classes])
    sq = _pairwise_sq_dists(X[missing], centroids)
    full[missing] = classes[np.argmin(sq, axis=1)]
    return full
