"""
Sharded builds
==============

The batch builder broadcasts each user's item list to every item it holds,
groups the copies by item into shards and scores each item independently.
The merged output never depends on how the work was split.
"""

# %%
import time

import numpy as np

from prodgraph.model import Action, build_graph
from prodgraph.pipeline import ShardPlan, run_pipeline
from prodgraph.swing import SwingParams, SwingScorer
from prodgraph.synthetic import random_click_log

log = random_click_log(np.random.default_rng(0), 3000, 1000, 40_000)
graph = build_graph(log.events, Action.CLICK)
scorer = SwingScorer(SwingParams(top_k=20))

# %%
results = {}
for plan in (ShardPlan(1), ShardPlan(4), ShardPlan(8, 2)):
    t0 = time.perf_counter()
    res = run_pipeline(graph, scorer, plan)
    results[plan] = res.lists
    print(f"{plan.shard_count} shards / {plan.worker_count} workers: {time.perf_counter() - t0:.2f}s")
    for rep in res.shards[:2]:
        print(f"  shard {rep.shard}: {rep.keys} keys, footprint {rep.footprint}")

# %%
first, *rest = results.values()
print("identical:", all(r == first for r in rest))
