"""Label propagation clustering over the directed swing similarity graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .model import NeighborList


@dataclass(frozen=True)
class LpParams:
    """Propagation settings.

    Each visit draws ``u ~ U[0, 1)`` from ``numpy.random.default_rng(rng_seed)``
    (PCG64) and updates the node only when ``u > beta``. One draw is consumed
    per node per sweep whether or not the node has in-neighbors.
    """

    beta: float = 0.25
    iterations: int = 10
    rng_seed: int = 0
    early_stop: bool = False

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class SimilarityDigraph:
    """In-edge lists: ``edges[i]`` holds ``(j, weight)`` for every edge j -> i."""

    edges: dict[int, list[tuple[int, float]]] = field(default_factory=dict)

    def nodes(self) -> list[int]:
        seen = set(self.edges)
        for ins in self.edges.values():
            seen.update(j for j, _ in ins)
        return sorted(seen)

    def in_neighbors(self, node: int) -> list[tuple[int, float]]:
        return self.edges.get(node, [])

    def in_degree(self, node: int) -> int:
        return len(self.edges.get(node, ()))

    def __len__(self) -> int:
        return sum(len(v) for v in self.edges.values())


def build_digraph(index: Mapping[int, NeighborList] | Iterable[NeighborList],
                  top_n: int | None = None) -> SimilarityDigraph:
    """Each neighbor j of seed i becomes an edge j -> i weighted by s(i, j)."""
    lists = index.values() if isinstance(index, Mapping) else index
    edges: dict[int, list[tuple[int, float]]] = {}
    for nl in lists:
        entries = nl.entries if top_n is None else nl.entries[:top_n]
        for j, w in entries:
            if j == nl.seed or w <= 0:
                continue
            edges.setdefault(nl.seed, []).append((j, w))
    for ins in edges.values():
        ins.sort()
    return SimilarityDigraph(edges)


def propagate(graph: SimilarityDigraph, params: LpParams | None = None) -> dict[int, int]:
    """Asynchronous weighted label propagation.

    Nodes are visited in ascending id order each sweep and read labels that
    were already updated earlier in the same sweep. The winning label is the
    one with the largest summed in-edge weight; ties go to the smallest label.
    Only in-neighbors vote; a node without in-neighbors keeps its label.
    """
    params = params or LpParams()
    nodes = graph.nodes()
    label = {x: x for x in nodes}
    rng = np.random.default_rng(params.rng_seed)
    for _ in range(params.iterations):
        draws = rng.random(len(nodes))
        changed = False
        for x, draw in zip(nodes, draws):
            ins = graph.in_neighbors(x)
            if not ins or not draw > params.beta:
                continue
            votes: dict[int, float] = {}
            for y, w in ins:
                lab = label[y]
                votes[lab] = votes.get(lab, 0.0) + w
            best = min(votes, key=lambda lab: (-votes[lab], lab))
            if best != label[x]:
                label[x] = best
                changed = True
        if params.early_stop and not changed:
            break
    return label


def clusters_of(labels: Mapping[int, int]) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for item, lab in sorted(labels.items()):
        groups.setdefault(lab, []).append(item)
    return groups
