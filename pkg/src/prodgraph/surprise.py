"""Surprise complementary scores over the purchase graph.

Pipeline per seed item ``i``:

1. category relevance ``theta[c_i, c_j] = N(c_i -> c_j) / N(c_j)`` and the
   related set ``Gamma(c_i)`` cut at the largest relative drop;
2. item relevance ``s1`` with a ``1 / (1 + dt)`` time decay, counting only
   users who bought ``j`` at or after ``i``;
3. the same relevance between the clusters of ``i`` and ``j`` (``s2``);
4. the blend ``omega * s1 + (1 - omega) * s2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import (Action, BehaviorEvent, BipartiteGraph, Catalog, Neighborhood,
                    NeighborList)


@dataclass(frozen=True)
class SurpriseParams:
    """Surprise configuration.

    ``gamma`` gates item-level relevance only: ``s1`` is zeroed unless more
    than ``gamma`` users bought ``j`` at or after ``i``. ``normalization``
    is ``"product"`` for ``|U_i| * |U_j|`` or ``"sqrt"`` for its square root.
    """

    omega: float = 0.8
    gamma: int = 1
    time_unit: float = 86400.0
    top_k: int | None = 100
    normalization: str = "product"

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not self.time_unit > 0:
            raise ValueError("time_unit must be positive")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.normalization not in ("product", "sqrt"):
            raise ValueError("normalization must be 'product' or 'sqrt'")


# -- category level ------------------------------------------------------

def category_theta(purchases: Iterable[BehaviorEvent], catalog: Catalog) -> dict[tuple[int, int], float]:
    """Ordered category relevance.

    ``N(c_i -> c_j)`` counts users with two distinct purchase events, one in
    ``c_i`` and one in ``c_j`` no earlier than it; each user counts at most
    once per category pair. ``N(c_j)`` is the number of purchase events in
    ``c_j``. Only non-zero entries are returned.
    """
    total: dict[int, int] = {}
    per_user: dict[int, dict[int, list[int]]] = {}  # user -> cat -> [min_t, max_t, count]
    for ev in purchases:
        if ev.action is not Action.PURCHASE:
            continue
        c = catalog.category(ev.item)
        total[c] = total.get(c, 0) + 1
        stats = per_user.setdefault(ev.user, {}).get(c)
        if stats is None:
            per_user[ev.user][c] = [ev.timestamp, ev.timestamp, 1]
        else:
            stats[0] = min(stats[0], ev.timestamp)
            stats[1] = max(stats[1], ev.timestamp)
            stats[2] += 1

    pairs: dict[tuple[int, int], int] = {}
    for cats in per_user.values():
        for ci, (lo_i, _, n_i) in cats.items():
            for cj, (_, hi_j, _) in cats.items():
                hit = n_i >= 2 if ci == cj else hi_j >= lo_i
                if hit:
                    pairs[(ci, cj)] = pairs.get((ci, cj), 0) + 1
    return {(ci, cj): n / total[cj] for (ci, cj), n in pairs.items()}


def max_drop_cutoff(thetas: Sequence[float]) -> int:
    """Number of leading entries kept by the maximum relative drop rule.

    For a descending row the relative drops ``(theta[k+1] - theta[k]) / theta[k]``
    are non-positive; the cut falls after the position with the largest
    magnitude (first one on ties). Rows with no drop at all are kept whole.
    """
    vals = np.asarray(thetas, dtype=np.float64)
    if vals.size <= 1:
        return int(vals.size)
    if np.any(vals[:-1] < vals[1:]):
        raise ValueError("theta row must be sorted descending")
    if np.any(vals <= 0):
        raise ValueError("theta row must be positive")
    drops = np.abs((vals[1:] - vals[:-1]) / vals[:-1])
    k = int(np.argmax(drops))
    if drops[k] == 0.0:
        return int(vals.size)
    return k + 1


def select_top_categories(row: Sequence[tuple[int, float]]) -> list[int]:
    """Apply :func:`max_drop_cutoff` to a descending ``[(category, theta)]`` row."""
    n = max_drop_cutoff([t for _, t in row])
    return [c for c, _ in row[:n]]


@dataclass
class CategoryRelevance:
    theta: dict[tuple[int, int], float] = field(default_factory=dict)
    related: dict[int, list[int]] = field(default_factory=dict)
    selected: dict[int, frozenset[int]] = field(default_factory=dict)

    @classmethod
    def build(cls, purchases: Iterable[BehaviorEvent], catalog: Catalog) -> "CategoryRelevance":
        theta = category_theta(purchases, catalog)
        rows: dict[int, list[tuple[int, float]]] = {}
        for (ci, cj), t in theta.items():
            rows.setdefault(ci, []).append((cj, t))
        related, selected = {}, {}
        for ci, row in rows.items():
            row.sort(key=lambda e: (-e[1], e[0]))
            related[ci] = [c for c, _ in row]
            selected[ci] = frozenset(select_top_categories(row))
        return cls(theta, related, selected)

    def gamma(self, category: int) -> frozenset[int]:
        return self.selected.get(category, frozenset())

    def report(self) -> list[tuple[int, int, float, bool]]:
        """``(c_i, c_j, theta, selected)`` rows ordered by c_i then rank."""
        out = []
        for ci in sorted(self.related):
            for cj in self.related[ci]:
                out.append((ci, cj, self.theta[(ci, cj)], cj in self.selected[ci]))
        return out


# -- item / cluster level -------------------------------------------------

def forward_relevance(nb: Neighborhood, time_unit: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decayed forward co-purchase sums for one seed.

    Returns ``(candidates, decay_sum, co_count)``: for every item ``j`` bought
    by some ``u`` in ``U_seed`` at ``t_uj >= t_u,seed``, the sum of
    ``1 / (1 + |t_uj - t_u,seed| / time_unit)`` and the number of such users.
    """
    t0 = np.repeat(nb.seed_times(), nb.row_lengths)
    mask = (nb.times >= t0) & (nb.indices != nb.seed)
    if not mask.any():
        return np.empty(0, dtype=np.int64), np.empty(0), np.empty(0, dtype=np.int64)
    decay = 1.0 / (1.0 + (nb.times[mask] - t0[mask]) / time_unit)
    cands, inv, co = np.unique(nb.indices[mask], return_inverse=True, return_counts=True)
    sums = np.bincount(inv, weights=decay, minlength=cands.size)
    return cands, sums, co


def cluster_graph(purchases: BipartiteGraph, labels: Mapping[int, int]) -> BipartiteGraph:
    """Rewrite every purchase edge to its cluster label, keeping each user's earliest time."""
    us, its, ts = [], [], []
    for u, i, t in purchases.edges():
        us.append(u)
        its.append(labels.get(i, i))
        ts.append(t)
    n_items = max(purchases.n_items, max(its) + 1 if its else 0)
    return BipartiteGraph(us, its, ts, Action.PURCHASE, n_users=purchases.n_users, n_items=n_items)


def surprise_score(s1: float, s2: float, omega: float) -> float:
    """Linear blend; ``omega = 1`` is the cluster-free variant."""
    if omega == 1.0:
        return s1
    if omega == 0.0:
        return s2
    return omega * s1 + (1.0 - omega) * s2


class SurpriseModel:
    """Precomputed broadcast state for scoring seeds.

    Parameters
    ----------
    purchases : BipartiteGraph
        Purchase graph with earliest per-pair timestamps.
    catalog : Catalog
        Must cover every purchased item.
    labels : mapping, optional
        Item -> cluster label. Items absent from it form singleton clusters.
        Without labels, ``s2`` is 0 and the blend weight is forced to 1.
    relevance : CategoryRelevance, optional
        Defaults to the one computed from the purchase graph's edges.
    """

    with_times = True

    def __init__(self, purchases: BipartiteGraph, catalog: Catalog,
                 labels: Mapping[int, int] | None = None,
                 params: SurpriseParams | None = None,
                 relevance: CategoryRelevance | None = None):
        params = params or SurpriseParams()
        if labels is None and params.omega != 1.0:
            params = SurpriseParams(1.0, params.gamma, params.time_unit, params.top_k,
                                    params.normalization)
        self.params = params
        self.graph = purchases
        self.catalog = catalog
        for i in purchases.items().tolist():
            catalog.category(i)
        self.relevance = relevance or CategoryRelevance.build(purchases.to_events(), catalog)
        self.labels = dict(labels) if labels is not None else None
        self.clusters = cluster_graph(purchases, self.labels) if labels is not None else None
        self._item_degree = np.asarray(purchases.item_degree, dtype=np.float64)
        self._cluster_cache: dict[int, dict[int, float]] = {}

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cluster_cache"] = {}
        return state

    def _norm(self, deg_i: float, deg_j):
        prod = deg_i * deg_j
        return prod if self.params.normalization == "product" else np.sqrt(prod)

    def label(self, item: int) -> int:
        return item if self.labels is None else self.labels.get(item, item)

    def _admissible(self, i: int, j: int) -> bool:
        return self.catalog.category(j) in self.relevance.gamma(self.catalog.category(i))

    # single pair ------------------------------------------------------
    def item_relevance(self, i: int, j: int) -> float:
        self.graph.users_of(j)
        nb = Neighborhood.of(self.graph, i, with_times=True)
        return self._item_scores(nb).get(j, 0.0)

    def cluster_relevance(self, i: int, j: int) -> float:
        if self.clusters is None or not self._admissible(i, j):
            return 0.0
        li, lj = self.label(i), self.label(j)
        if li == lj:
            return 0.0
        return self._cluster_row(li).get(lj, 0.0)

    def score(self, i: int, j: int) -> float:
        return surprise_score(self.item_relevance(i, j), self.cluster_relevance(i, j),
                              self.params.omega)

    # per seed ---------------------------------------------------------
    def _item_scores(self, nb: Neighborhood) -> dict[int, float]:
        cands, sums, co = forward_relevance(nb, self.params.time_unit)
        out = {}
        deg_i = float(len(nb.users))
        for j, s, c in zip(cands.tolist(), sums.tolist(), co.tolist()):
            if c > self.params.gamma and self._admissible(nb.seed, j):
                out[j] = s / self._norm(deg_i, self._item_degree[j])
        return out

    def _cluster_row(self, li: int) -> dict[int, float]:
        row = self._cluster_cache.get(li)
        if row is None:
            nb = Neighborhood.of(self.clusters, li, with_times=True)
            cands, sums, _ = forward_relevance(nb, self.params.time_unit)
            deg = self.clusters.item_degree
            den = self._norm(float(len(nb.users)), deg[cands].astype(np.float64))
            row = dict(zip(cands.tolist(), (sums / den).tolist()))
            self._cluster_cache[li] = row
        return row

    def __call__(self, nb: Neighborhood) -> NeighborList:
        seed = nb.seed
        cands, sums, co = forward_relevance(nb, self.params.time_unit)
        if cands.size == 0:
            return NeighborList(seed)
        gam = self.relevance.gamma(self.catalog.category(seed))
        keep = np.array([self.catalog.category(j) in gam for j in cands.tolist()], dtype=bool)
        cands, sums, co = cands[keep], sums[keep], co[keep]
        deg_i = float(len(nb.users))
        s1 = np.where(co > self.params.gamma,
                      sums / self._norm(deg_i, self._item_degree[cands]), 0.0)
        s2 = np.zeros_like(s1)
        if self.clusters is not None:
            li = self.label(seed)
            row = self._cluster_row(li)
            for n, j in enumerate(cands.tolist()):
                lj = self.label(j)
                if lj != li:
                    s2[n] = row.get(lj, 0.0)
        score = np.array([surprise_score(a, b, self.params.omega)
                          for a, b in zip(s1.tolist(), s2.tolist())])
        details = list(zip(s1.tolist(), s2.tolist()))
        return NeighborList.from_scores(seed, cands, score, k=self.params.top_k, details=details)

    def neighbors(self, seed: int) -> NeighborList:
        return self(Neighborhood.of(self.graph, seed, with_times=True))


def surprise_all(purchases: BipartiteGraph, catalog: Catalog,
                 labels: Mapping[int, int] | None = None,
                 params: SurpriseParams | None = None) -> dict[int, NeighborList]:
    """Sequential complementary index for every purchased item."""
    model = SurpriseModel(purchases, catalog, labels, params)
    return {int(i): model.neighbors(int(i)) for i in purchases.items()}
