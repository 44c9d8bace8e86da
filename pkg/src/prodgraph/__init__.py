"""Substitute and complementary product graphs from user behavior logs."""

__version__ = "0.1.0"

from .baselines import cosine_sim, jaccard_sim, pearson_sim, top_k_baseline, weighted_cf_sim
from .evaluation import build_cases, online_ratios, score
from .ingest import BehaviorLog, parse_catalog, parse_log
from .labelprop import LpParams, build_digraph, propagate
from .model import (Action, BehaviorEvent, BipartiteGraph, Catalog, IdMap, Neighborhood,
                    NeighborList, build_graph)
from .pipeline import ShardPlan, run_pipeline
from .surprise import SurpriseModel, SurpriseParams, surprise_all
from .swing import SwingParams, swing_all, swing_scores

__all__ = [
    "Action", "BehaviorEvent", "BehaviorLog", "BipartiteGraph", "Catalog", "IdMap",
    "LpParams", "Neighborhood", "NeighborList", "ShardPlan", "SurpriseModel",
    "SurpriseParams", "SwingParams", "build_cases", "build_digraph", "build_graph",
    "cosine_sim", "jaccard_sim", "online_ratios", "parse_catalog", "parse_log",
    "pearson_sim", "propagate", "run_pipeline", "score", "surprise_all", "swing_all",
    "swing_scores", "top_k_baseline", "weighted_cf_sim",
]
