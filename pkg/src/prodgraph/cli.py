"""Command line entry point: ``prodgraph <command> ...``.

Exit codes: 0 success, 1 validation or I/O error, 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from . import io as pio
from .baselines import MEASURES, BaselineScorer, Ratings
from .evaluation import build_cases, daily_scores, score
from .ingest import BehaviorLog, ParseError, parse_catalog, parse_log
from .labelprop import LpParams, build_digraph, propagate
from .model import Action, GraphError, NeighborList, UnknownItemError, build_graph
from .pipeline import PipelineConsistencyError, PipelineWorkerError, ShardPlan, run_pipeline
from .surprise import SurpriseModel, SurpriseParams
from .swing import SwingParams, SwingScorer

logger = logging.getLogger("prodgraph")


class UsageError(Exception):
    pass


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _positive(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return val


def _workers(text: str) -> int:
    if text == "max":
        return os.cpu_count() or 1
    return _positive(text)


def _require_file(path: str) -> None:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")


def _load_log(path: str, strict: bool, log: BehaviorLog | None = None) -> BehaviorLog:
    _require_file(path)
    log, report = parse_log(path, log=log, strict=strict)
    for reason in report.reasons:
        logger.warning("%s", reason)
    logger.info("%s: %d accepted, %d rejected", path, report.accepted, report.rejected)
    return log


def _provenance(args, params: dict, inputs: dict) -> dict:
    return {"command": args.command, "version": __version__, "inputs": inputs,
            "params": params, "argv": args.argv}


def _write_index(out: Path, lists: list[NeighborList], log: BehaviorLog, result,
                 record: dict, with_details: bool = False) -> None:
    out.mkdir(parents=True, exist_ok=True)
    pio.write_neighbors(out / pio.NEIGHBORS, lists, log.items, with_details)
    pio.write_items(out / pio.ITEMS, log.items)
    pio.write_timing(out / pio.TIMING, result)
    pio.write_provenance(out, record)


def cmd_build_swing(args) -> None:
    log = _load_log(args.clicks, args.strict)
    graph = build_graph(log.events, Action.CLICK, n_items=len(log.items))
    params = SwingParams(alpha=args.alpha, user_weighting=args.user_weighting, top_k=args.top_k,
                         max_user_degree=args.max_user_degree, ordered_pairs=args.ordered_pairs)
    plan = ShardPlan(args.shards, args.workers)
    result = run_pipeline(graph, SwingScorer(params), plan)
    record = _provenance(args, {"swing": asdict(params), "plan": asdict(plan), "action": "click"},
                         {"clicks": args.clicks})
    _write_index(Path(args.out), result.lists, log, result, record)


def cmd_build_baseline(args) -> None:
    log = _load_log(args.clicks, args.strict)
    graph = build_graph(log.events, Action.CLICK, n_items=len(log.items))
    ratings = None
    if args.measure == "pearson":
        ratings = Ratings.from_counts(e for e in log.events if e.action is Action.CLICK)
    scorer = BaselineScorer.for_graph(graph, args.measure, args.top_k, ratings)
    plan = ShardPlan(args.shards, args.workers)
    result = run_pipeline(graph, scorer, plan)
    record = _provenance(args, {"measure": args.measure, "top_k": args.top_k,
                                "plan": asdict(plan), "action": "click"},
                         {"clicks": args.clicks})
    _write_index(Path(args.out), result.lists, log, result, record)


def cmd_cluster(args) -> None:
    src = Path(args.swing_index)
    _require_file(str(src / pio.NEIGHBORS))
    items = pio.read_items(src / pio.ITEMS)
    lists = []
    for seed, entries in pio.read_neighbors(src / pio.NEIGHBORS).items():
        ids = [items.id(j) for j, _ in entries]
        lists.append(NeighborList(items.id(seed), tuple(ids), tuple(s for _, s in entries)))
    digraph = build_digraph(lists, top_n=args.top_n)
    params = LpParams(beta=args.beta, iterations=args.iterations, rng_seed=args.rng_seed,
                      early_stop=args.early_stop)
    labels = propagate(digraph, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pio.write_clusters(out / pio.CLUSTERS, labels, items)
    record = _provenance(args, {"label_propagation": asdict(params), "top_n": args.top_n},
                         {"swing_index": args.swing_index})
    pio.write_provenance(out, record)
    logger.info("%d items in %d clusters", len(labels), len(set(labels.values())))


def cmd_build_surprise(args) -> None:
    log = _load_log(args.purchases, args.strict)
    _require_file(args.catalog)
    parse_catalog(args.catalog, log)
    graph = build_graph(log.events, Action.PURCHASE, n_items=len(log.items))
    labels = None
    if args.clusters:
        path = Path(args.clusters) / pio.CLUSTERS
        _require_file(str(path))
        labels = pio.names_to_ids(pio.read_clusters(path), log.items)
    omega = args.omega if labels is not None else 1.0
    params = SurpriseParams(omega=omega, gamma=args.gamma, time_unit=args.time_unit,
                            top_k=args.top_k, normalization=args.normalization)
    model = SurpriseModel(graph, log.catalog, labels, params)
    plan = ShardPlan(args.shards, args.workers)
    result = run_pipeline(graph, model, plan)
    record = _provenance(args, {"surprise": asdict(model.params), "plan": asdict(plan),
                                "action": "purchase", "clusters_used": labels is not None},
                         {"purchases": args.purchases, "catalog": args.catalog,
                          "clusters": args.clusters})
    out = Path(args.out)
    _write_index(out, result.lists, log, result, record, with_details=True)
    pio.write_category_report(out / pio.CATEGORIES, model.relevance.report(), log.categories)


def cmd_evaluate(args) -> None:
    src = Path(args.index)
    _require_file(str(src / pio.NEIGHBORS))
    index = {seed: [j for j, _ in entries]
             for seed, entries in pio.read_neighbors(src / pio.NEIGHBORS).items()}
    action = args.action
    if action is None and (src / pio.PROVENANCE).is_file():
        action = pio.read_provenance(src).get("params", {}).get("action")
    log = _load_log(args.events, args.strict)
    want = Action.parse(action) if action else None
    events = [(log.users.name(e.user), log.items.name(e.item), e.timestamp)
              for e in log.events if want is None or e.action is want]
    cases = build_cases(events, index, args.split, args.k, args.seed_mode, args.rng_seed)
    if not cases:
        raise UsageError("no evaluation cases (need users with >= 2 events after the split)")
    report = score(cases)
    lines = [f"{name}\t{val!r}" for name, val in report.rows()[:-1]]
    lines.append(f"cases\t{report.case_count}")
    print("\n".join(lines))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if args.emit_plot_data:
        with open(args.emit_plot_data, "w", encoding="utf-8") as fh:
            fh.write("day\tprecision\trecall\tmap_literal\tap_standard\tcases\n")
            for day, rep in daily_scores(cases):
                fh.write(f"{day}\t{rep.precision!r}\t{rep.recall!r}\t{rep.map_literal!r}\t"
                         f"{rep.ap_standard!r}\t{rep.case_count}\n")


def cmd_query(args) -> None:
    path = Path(args.index) / pio.NEIGHBORS
    _require_file(str(path))
    found = False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            cols = line.rstrip("\n").split("\t")
            if cols[0] == args.item and int(cols[-1]) <= args.k:
                found = True
                print("\t".join(cols))
    items = Path(args.index) / pio.ITEMS
    known = found or (items.is_file() and args.item in pio.read_items(items))
    if not known:
        raise UsageError(f"unknown item: {args.item}")


def _add_plan(p) -> None:
    p.add_argument("--shards", type=_positive, default=1)
    p.add_argument("--workers", type=_workers, default=1, help="worker processes, or 'max'")
    _add_strict(p)


def _add_strict(p) -> None:
    p.add_argument("--strict", action="store_true", help="fail on the first malformed line")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prodgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-swing", help="substitute index from a click log")
    p.add_argument("--clicks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--top-k", type=_positive, default=100)
    p.add_argument("--user-weighting", type=_bool, default=True)
    p.add_argument("--max-user-degree", type=_positive, default=None)
    p.add_argument("--ordered-pairs", action="store_true")
    _add_plan(p)
    p.set_defaults(func=cmd_build_swing)

    p = sub.add_parser("build-baseline", help="baseline similarity index from a click log")
    p.add_argument("--clicks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--top-k", type=_positive, default=100)
    _add_plan(p)
    p.set_defaults(func=cmd_build_baseline)

    p = sub.add_parser("cluster", help="label propagation over a swing index")
    p.add_argument("--swing-index", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--iterations", type=_positive, default=10)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--top-n", type=_positive, default=None,
                   help="neighbors per seed used as edges (default: whole list)")
    p.add_argument("--early-stop", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("build-surprise", help="complementary index from a purchase log")
    p.add_argument("--purchases", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--clusters", default=None, help="cluster directory; omit for omega=1")
    p.add_argument("--out", required=True)
    p.add_argument("--omega", type=float, default=0.8)
    p.add_argument("--gamma", type=int, default=1)
    p.add_argument("--time-unit", type=float, default=86400.0)
    p.add_argument("--normalization", choices=("product", "sqrt"), default="product")
    p.add_argument("--top-k", type=_positive, default=100)
    _add_plan(p)
    p.set_defaults(func=cmd_build_surprise)

    p = sub.add_parser("evaluate", help="offline hit-based evaluation of an index")
    p.add_argument("--index", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--split", type=int, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--seed-mode", choices=("first", "random"), default="first")
    p.add_argument("--action", choices=("click", "purchase"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--emit-plot-data", default=None)
    _add_strict(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("query", help="print the top-k neighbors of one item")
    p.add_argument("--index", required=True)
    p.add_argument("--item", required=True)
    p.add_argument("--k", type=_positive, default=10)
    p.set_defaults(func=cmd_query)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (PipelineConsistencyError, PipelineWorkerError) as exc:
        print(f"prodgraph: internal error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, OSError, ParseError, GraphError, UnknownItemError, ValueError) as exc:
        print(f"prodgraph: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
