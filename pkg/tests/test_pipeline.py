import numpy as np
import pytest

from prodgraph.baselines import BaselineScorer
from prodgraph.model import Action, BipartiteGraph, NeighborList, build_graph
from prodgraph.pipeline import (EmitRecord, PipelineConsistencyError, PipelineWorkerError, ShardPlan,
                                map_stage, reduce_stage, run_pipeline, shuffle, stable_hash)
from prodgraph.surprise import SurpriseModel, SurpriseParams, surprise_all
from prodgraph.swing import SwingParams, SwingScorer, swing_all
from prodgraph.synthetic import random_click_log, random_purchase_log

PLAIN = SwingParams(user_weighting=False, top_k=None)


class FailOn:
    """Scorer that raises on one key; module level so worker processes can unpickle it."""

    with_times = False

    def __init__(self, key):
        self.key = key

    def __call__(self, nb):
        if nb.seed == self.key:
            raise RuntimeError("boom")
        return NeighborList(nb.seed)


@pytest.fixture
def corpus(rng):
    log = random_click_log(rng, 200, 80, 2000)
    return build_graph(log.events, Action.CLICK)


def test_map_broadcasts_full_rows():
    recs = list(map_stage([(0, np.array([3, 5])), (1, np.array([], dtype=np.int64))]))
    assert [r.key for r in recs] == [3, 5]
    assert all(r.user == 0 and r.items.tolist() == [3, 5] for r in recs)


def test_emission_count_equals_edge_count(corpus):
    rows = ((u, it) for u, it, _ in corpus.user_rows())
    recs = list(map_stage(rows))
    assert len(recs) == corpus.n_edges
    keys = {r.key for r in recs}
    assert keys == set(corpus.items().tolist())


def test_stable_hash_is_fixed():
    assert stable_hash(0) == 0xE220A8397B1DCDAF
    plan = ShardPlan(8)
    assert [plan.shard_of(k) for k in range(5)] == [stable_hash(k) % 8 for k in range(5)]


def test_range_partitioner():
    plan = ShardPlan(3, partitioner="range", key_space=10)
    assert [plan.shard_of(k) for k in range(10)] == [0, 0, 0, 0, 1, 1, 1, 1, 2, 2]
    with pytest.raises(ValueError):
        ShardPlan(3, partitioner="range")
    with pytest.raises(ValueError):
        ShardPlan(0)


def test_shuffle_assigns_each_key_once(corpus):
    plan = ShardPlan(5)
    rows = ((u, it) for u, it, _ in corpus.user_rows())
    shards = shuffle(map_stage(rows), plan)
    seen = [k for s in shards for k in s]
    assert sorted(seen) == sorted(set(seen))
    for n, s in enumerate(shards):
        assert all(plan.shard_of(k) == n for k in s)


def test_single_key_reproduces_worked_example(wedge):
    log, g = wedge
    h = log.items.id("h")
    res = run_pipeline(g, SwingScorer(PLAIN), ShardPlan(3), keys=[h])
    got = {log.items.name(j): s for j, s in res.lists[0].entries}
    assert got == {"q": 1.5, "p": 1.25, "t": 0.25, "r": 0.25}


@pytest.mark.parametrize("shards,workers", [(1, 1), (2, 1), (8, 1), (8, 2), (3, 4)])
def test_swing_equals_sequential_build(corpus, shards, workers):
    params = SwingParams(top_k=20)
    res = run_pipeline(corpus, SwingScorer(params), ShardPlan(shards, workers))
    assert res.as_dict() == swing_all(corpus, params)
    assert [nl.seed for nl in res.lists] == sorted(corpus.items().tolist())
    assert len(res.shards) == shards
    assert sum(r.keys for r in res.shards) == len(corpus.items())


def test_shard_and_worker_invariance(corpus):
    scorer = BaselineScorer.for_graph(corpus, "cosine", 10)
    base = run_pipeline(corpus, scorer, ShardPlan(1)).lists
    for plan in (ShardPlan(8), ShardPlan(8, 3), ShardPlan.max_workers(8),
                 ShardPlan(4, partitioner="range", key_space=corpus.n_items)):
        assert run_pipeline(corpus, scorer, plan).lists == base


def test_surprise_through_pipeline(rng):
    log = random_purchase_log(rng, 60, 30, 4, 500)
    g = build_graph(log.events, Action.PURCHASE)
    labels = {i: i % 7 for i in range(len(log.items))}
    params = SurpriseParams(gamma=0, top_k=None)
    model = SurpriseModel(g, log.catalog, labels, params)
    res = run_pipeline(g, model, ShardPlan(4, 2))
    assert res.as_dict() == surprise_all(g, log.catalog, labels, params)


def test_footprint_report(corpus):
    res = run_pipeline(corpus, SwingScorer(PLAIN), ShardPlan(4))
    deg = corpus.user_degree
    total = sum(int(deg[u]) for i in corpus.items().tolist() for u in corpus.users_of(i).tolist())
    assert sum(r.footprint for r in res.shards) == total
    assert sum(r.records for r in res.shards) == corpus.n_edges


def test_missing_records_are_fatal(wedge):
    log, g = wedge
    h = log.items.id("h")
    rows = [(u, it) for u, it, _ in g.user_rows()]
    recs = [r for r in map_stage(rows) if r.key == h]
    with pytest.raises(PipelineConsistencyError):
        reduce_stage(h, recs[:-1], SwingScorer(PLAIN), expected=len(recs))
    with pytest.raises(PipelineConsistencyError):
        reduce_stage(h, recs + recs[:1], SwingScorer(PLAIN))
    stray = EmitRecord(h, 99, np.array([0, 1]))
    if h not in (0, 1):
        with pytest.raises(PipelineConsistencyError):
            reduce_stage(h, recs + [stray], SwingScorer(PLAIN))


def test_timed_scorer_needs_times(rng):
    log = random_purchase_log(rng, 10, 5, 2, 40)
    g = build_graph(log.events, Action.PURCHASE)
    model = SurpriseModel(g, log.catalog)
    recs = list(map_stage(((u, it) for u, it, _ in g.user_rows())))
    key = recs[0].key
    with pytest.raises(PipelineConsistencyError):
        reduce_stage(key, [r for r in recs if r.key == key], model)


@pytest.mark.parametrize("workers", [1, 2])
def test_worker_failure_names_shard(corpus, workers):
    key = int(corpus.items()[3])
    plan = ShardPlan(4, workers)
    with pytest.raises(PipelineWorkerError) as info:
        run_pipeline(corpus, FailOn(key), plan)
    assert info.value.shard == plan.shard_of(key)
    assert f"shard {plan.shard_of(key)}" in str(info.value)


def test_empty_graph():
    g = BipartiteGraph([], [], [], Action.CLICK)
    assert run_pipeline(g, SwingScorer(PLAIN), ShardPlan(3)).lists == []
