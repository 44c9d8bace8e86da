"""Item-item neighborhood baselines: cosine, Jaccard, Pearson, user-weighted CF."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import BipartiteGraph, Neighborhood, NeighborList, UnknownItemError

MEASURES = ("cosine", "jaccard", "pearson", "weighted-cf")


def _common(graph: BipartiteGraph, i: int, j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ui, uj = graph.users_of(i), graph.users_of(j)
    return ui, uj, np.intersect1d(ui, uj, assume_unique=True)


def cosine_sim(i: int, j: int, graph: BipartiteGraph) -> float:
    """Binary cosine ``|U_i & U_j| / sqrt(|U_i| |U_j|)``."""
    ui, uj, both = _common(graph, i, j)
    return both.size / math.sqrt(ui.size * uj.size)


def jaccard_sim(i: int, j: int, graph: BipartiteGraph) -> float:
    ui, uj, both = _common(graph, i, j)
    return both.size / (ui.size + uj.size - both.size)


def user_weights(graph: BipartiteGraph) -> np.ndarray:
    """``w_u^2 = 1/|I_u|`` per user id (0 for absent users)."""
    deg = graph.user_degree.astype(np.float64)
    out = np.zeros_like(deg)
    np.divide(1.0, deg, out=out, where=deg > 0)
    return out


def weighted_cf_sim(i: int, j: int, graph: BipartiteGraph) -> float:
    """Cosine with each user down-weighted by ``1/sqrt(|I_u|)``."""
    ui, uj, both = _common(graph, i, j)
    w2 = user_weights(graph)
    num = w2[both].sum()
    return float(num / (math.sqrt(w2[ui].sum()) * math.sqrt(w2[uj].sum())))


class Ratings:
    """Explicit ratings ``r[u, i]`` with per-item means over all raters."""

    def __init__(self, ratings: Mapping[tuple[int, int], float]):
        self._by_item: dict[int, dict[int, float]] = {}
        for (u, i), r in ratings.items():
            self._by_item.setdefault(i, {})[u] = float(r)
        self.item_mean = {i: sum(d.values()) / len(d) for i, d in self._by_item.items()}

    @classmethod
    def from_counts(cls, events) -> "Ratings":
        """Implicit ratings: number of events per (user, item)."""
        counts: dict[tuple[int, int], float] = {}
        for ev in events:
            counts[(ev.user, ev.item)] = counts.get((ev.user, ev.item), 0.0) + 1.0
        return cls(counts)

    def raters(self, i: int) -> dict[int, float]:
        try:
            return self._by_item[i]
        except KeyError:
            raise UnknownItemError(i) from None

    def items(self) -> list[int]:
        return sorted(self._by_item)


def pearson_sim(i: int, j: int, ratings: Ratings, with_flag: bool = False):
    """Pearson correlation over co-raters, centred on each item's mean rating.

    Fewer than two co-raters, or zero deviation on either side, is
    degenerate and scores 0. With ``with_flag`` returns ``(score, degenerate)``.
    """
    ri, rj = ratings.raters(i), ratings.raters(j)
    both = sorted(ri.keys() & rj.keys())
    mi, mj = ratings.item_mean[i], ratings.item_mean[j]
    di = np.array([ri[u] - mi for u in both])
    dj = np.array([rj[u] - mj for u in both])
    den = math.sqrt(float(di @ di)) * math.sqrt(float(dj @ dj))
    if len(both) < 2 or den == 0.0:
        return (0.0, True) if with_flag else 0.0
    val = float(np.clip(float(di @ dj) / den, -1.0, 1.0))
    return (val, False) if with_flag else val


@dataclass(frozen=True)
class BaselineScorer:
    """Scores one neighborhood under a baseline measure.

    The global per-item statistics a measure needs beyond the neighborhood
    (``|U_j|``, or the weighted norm for weighted CF) are carried along as
    a broadcast side input.
    """

    measure: str
    item_degree: np.ndarray
    item_norm: np.ndarray | None = None
    user_w2: np.ndarray | None = None
    ratings: Ratings | None = None
    top_k: int | None = None
    with_times = False

    @classmethod
    def for_graph(cls, graph: BipartiteGraph, measure: str, top_k: int | None = None,
                  ratings: Ratings | None = None) -> "BaselineScorer":
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r}; choose from {', '.join(MEASURES)}")
        if measure == "pearson" and ratings is None:
            raise ValueError("pearson needs explicit ratings")
        if top_k is not None and top_k < 1:
            raise ValueError("k must be >= 1")
        norm = w2 = None
        if measure == "weighted-cf":
            w2 = user_weights(graph)
            norm = np.sqrt(np.asarray(graph.matrix.T @ w2))
        return cls(measure, np.asarray(graph.item_degree), norm, w2, ratings, top_k)

    def __call__(self, nb: Neighborhood) -> NeighborList:
        seed = nb.seed
        if len(nb) == 0:
            return NeighborList(seed)
        flat = nb.indices
        if self.measure == "weighted-cf":
            per_user = np.repeat(self.user_w2[nb.users], nb.row_lengths)
            cands, inv = np.unique(flat, return_inverse=True)
            num = np.bincount(inv, weights=per_user, minlength=cands.size)
            scores = num / (self.item_norm[seed] * self.item_norm[cands])
        else:
            cands, co = np.unique(flat, return_counts=True)
            if self.measure == "cosine":
                scores = co / np.sqrt(self.item_degree[seed] * self.item_degree[cands])
            elif self.measure == "jaccard":
                scores = co / (self.item_degree[seed] + self.item_degree[cands] - co)
            else:
                scores = np.array([pearson_sim(seed, int(j), self.ratings) for j in cands.tolist()])
        return NeighborList.from_scores(seed, cands, scores, k=self.top_k)


def top_k_baseline(graph: BipartiteGraph, measure: str, k: int,
                   ratings: Ratings | None = None) -> dict[int, NeighborList]:
    """Per-item top-k lists; candidates are items co-clicked with the seed."""
    scorer = BaselineScorer.for_graph(graph, measure, k, ratings)
    return {int(i): scorer(Neighborhood.of(graph, int(i))) for i in graph.items()}
