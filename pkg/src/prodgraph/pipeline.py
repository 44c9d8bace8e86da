"""In-process sharded map/shuffle/reduce engine for per-seed scorers.

Map: every user row ``(u, I_u)`` is broadcast to each item it contains.
Shuffle: records are grouped by key and keys are assigned to shards.
Reduce: each key's records rebuild the seed's :class:`Neighborhood` and the
scorer turns it into a :class:`NeighborList`. Shards run on a process pool
with no shared mutable state; outputs are merged by seed id, so the result
does not depend on shard count, worker count or scheduling.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from heapq import merge
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .model import BipartiteGraph, Neighborhood, NeighborList

logger = logging.getLogger(__name__)

Scorer = Callable[[Neighborhood], NeighborList]


class PipelineConsistencyError(RuntimeError):
    pass


class PipelineWorkerError(RuntimeError):
    def __init__(self, shard: int, cause: BaseException):
        super().__init__(f"shard {shard} failed: {cause!r}")
        self.shard = shard


def stable_hash(key: int) -> int:
    """splitmix64 finalizer; identical on every platform and run."""
    z = (key + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ShardPlan:
    shard_count: int = 1
    worker_count: int = 1
    partitioner: str = "hash"
    key_space: int | None = None  # required by the range partitioner

    def __post_init__(self):
        if self.shard_count < 1 or self.worker_count < 1:
            raise ValueError("shard_count and worker_count must be >= 1")
        if self.partitioner not in ("hash", "range"):
            raise ValueError("partitioner must be 'hash' or 'range'")
        if self.partitioner == "range" and not self.key_space:
            raise ValueError("range partitioner needs key_space")

    @classmethod
    def max_workers(cls, shard_count: int = 1, **kw) -> "ShardPlan":
        return cls(shard_count, os.cpu_count() or 1, **kw)

    def shard_of(self, key: int) -> int:
        if self.partitioner == "hash":
            return stable_hash(key) % self.shard_count
        width = -(-self.key_space // self.shard_count)
        return min(key // width, self.shard_count - 1)


@dataclass(frozen=True)
class EmitRecord:
    key: int
    user: int
    items: np.ndarray
    times: np.ndarray | None = None


def map_stage(user_rows: Iterable[tuple], with_times: bool = False) -> Iterator[EmitRecord]:
    """Broadcast each ``(user, items[, times])`` row to every item it holds."""
    for row in user_rows:
        user, items = row[0], np.asarray(row[1])
        times = np.asarray(row[2]) if with_times else None
        for key in items.tolist():
            yield EmitRecord(key, user, items, times)


def shuffle(records: Iterable[EmitRecord], plan: ShardPlan) -> list[dict[int, list[EmitRecord]]]:
    shards: list[dict[int, list[EmitRecord]]] = [{} for _ in range(plan.shard_count)]
    for rec in records:
        shards[plan.shard_of(rec.key)].setdefault(rec.key, []).append(rec)
    return shards


def reduce_stage(key: int, records: Sequence[EmitRecord], scorer: Scorer,
                 expected: int | None = None) -> NeighborList:
    """Rebuild ``U_key`` and each ``I_u`` from co-located records, then score."""
    if expected is not None and len(records) != expected:
        raise PipelineConsistencyError(
            f"key {key}: got {len(records)} records, expected {expected}")
    recs = sorted(records, key=lambda r: r.user)
    users = tuple(r.user for r in recs)
    if len(set(users)) != len(users):
        raise PipelineConsistencyError(f"key {key}: duplicate user records")
    for r in recs:
        pos = np.searchsorted(r.items, key)
        if pos == r.items.size or r.items[pos] != key:
            raise PipelineConsistencyError(f"key {key}: record of user {r.user} lacks the key")
    times = None
    if getattr(scorer, "with_times", False):
        if any(r.times is None for r in recs):
            raise PipelineConsistencyError(f"key {key}: scorer needs timestamps")
        times = tuple(r.times for r in recs)
    nb = Neighborhood.from_rows(key, users, [r.items for r in recs], times)
    return scorer(nb)


@dataclass
class ShardReport:
    shard: int
    keys: int
    records: int
    footprint: int  # sum of |I_u| over all records, the shard's working-set size
    seconds: float


@dataclass
class PipelineResult:
    lists: list[NeighborList]
    shards: list[ShardReport] = field(default_factory=list)
    seconds: float = 0.0

    def as_dict(self) -> dict[int, NeighborList]:
        return {nl.seed: nl for nl in self.lists}


def _run_shard(shard: int, groups: dict[int, list[EmitRecord]], scorer: Scorer,
               expected: dict[int, int] | None) -> tuple[list[NeighborList], ShardReport]:
    t0 = time.perf_counter()
    out = []
    for key in sorted(groups):
        exp = None if expected is None else expected.get(key)
        out.append(reduce_stage(key, groups[key], scorer, exp))
    n_rec = sum(len(v) for v in groups.values())
    footprint = sum(r.items.size for v in groups.values() for r in v)
    return out, ShardReport(shard, len(groups), n_rec, footprint, time.perf_counter() - t0)


def run_pipeline(graph: BipartiteGraph, scorer: Scorer, plan: ShardPlan | None = None,
                 keys: Iterable[int] | None = None) -> PipelineResult:
    """Score every item of ``graph`` (or just ``keys``) through map/shuffle/reduce.

    The result is sorted by seed id and is a pure function of the graph and
    scorer. A failing shard aborts with :class:`PipelineWorkerError`.
    """
    plan = plan or ShardPlan()
    t0 = time.perf_counter()
    with_times = getattr(scorer, "with_times", False)
    rows = graph.user_rows() if with_times else ((u, it) for u, it, _ in graph.user_rows())
    shards = shuffle(map_stage(rows, with_times), plan)
    if keys is not None:
        wanted = set(int(k) for k in keys)
        shards = [{k: v for k, v in s.items() if k in wanted} for s in shards]
    deg = graph.item_degree
    expected = [{k: int(deg[k]) for k in s} for s in shards]

    results: list[tuple[list[NeighborList], ShardReport] | None] = [None] * plan.shard_count
    if plan.worker_count == 1 or plan.shard_count == 1:
        for n, groups in enumerate(shards):
            try:
                results[n] = _run_shard(n, groups, scorer, expected[n])
            except PipelineConsistencyError:
                raise
            except Exception as exc:
                raise PipelineWorkerError(n, exc) from exc
    else:
        with ProcessPoolExecutor(max_workers=plan.worker_count) as pool:
            futures = [pool.submit(_run_shard, n, groups, scorer, expected[n])
                       for n, groups in enumerate(shards)]
            for n, fut in enumerate(futures):
                try:
                    results[n] = fut.result()
                except PipelineConsistencyError:
                    raise
                except Exception as exc:
                    raise PipelineWorkerError(n, exc) from exc

    merged = list(merge(*(r[0] for r in results), key=lambda nl: nl.seed))
    reports = [r[1] for r in results]
    for rep in reports:
        logger.debug("shard %d: %d keys, %d records, %.3fs", rep.shard, rep.keys,
                     rep.records, rep.seconds)
    return PipelineResult(merged, reports, time.perf_counter() - t0)
