"""Index directory layout and TSV writers/readers.

An index directory holds::

    neighbors.tsv    seed, neighbor, score, rank  (surprise adds s1, s2 before rank)
    items.tsv        internal id, external item name
    provenance.json  command, inputs and every parameter of the run
    timing.tsv       per-shard key/record counts, footprint and seconds

Scores are written with ``repr(float)``, which round-trips exactly, so two
runs that compute the same floats produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Hashable, Iterable, Mapping

from .model import IdMap, NeighborList
from .pipeline import PipelineResult

NEIGHBORS = "neighbors.tsv"
ITEMS = "items.tsv"
PROVENANCE = "provenance.json"
TIMING = "timing.tsv"
CLUSTERS = "clusters.tsv"
CATEGORIES = "categories.tsv"


def write_neighbors(path: str | os.PathLike, lists: Iterable[NeighborList], items: IdMap,
                    with_details: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for nl in lists:
            seed = items.name(nl.seed)
            for rank, (j, s) in enumerate(nl.entries, 1):
                cols = [str(seed), str(items.name(j)), repr(s)]
                if with_details:
                    cols += [repr(v) for v in nl.details[rank - 1]]
                cols.append(str(rank))
                fh.write("\t".join(cols) + "\n")


def read_neighbors(path: str | os.PathLike) -> dict[str, list[tuple[str, float]]]:
    """seed -> [(neighbor, score)] in rank order."""
    out: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            cols = line.rstrip("\n").split("\t")
            if len(cols) not in (4, 6):
                raise ValueError(f"{path}:{lineno}: expected 4 or 6 columns")
            out.setdefault(cols[0], []).append((cols[1], float(cols[2])))
    return out


def write_items(path: str | os.PathLike, items: IdMap) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for n, name in enumerate(items):
            fh.write(f"{n}\t{name}\n")


def read_items(path: str | os.PathLike) -> IdMap:
    names = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh):
            idx, name = line.rstrip("\n").split("\t")
            if int(idx) != n:
                raise ValueError(f"{path}: ids must be dense and ordered")
            names.append(name)
    return IdMap(names)


def write_provenance(directory: str | os.PathLike, record: Mapping) -> None:
    with open(Path(directory) / PROVENANCE, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_provenance(directory: str | os.PathLike) -> dict:
    with open(Path(directory) / PROVENANCE, encoding="utf-8") as fh:
        return json.load(fh)


def write_timing(path: str | os.PathLike, result: PipelineResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("shard\tkeys\trecords\tfootprint\tseconds\n")
        for r in result.shards:
            fh.write(f"{r.shard}\t{r.keys}\t{r.records}\t{r.footprint}\t{r.seconds:.6f}\n")
        fh.write(f"total\t{sum(r.keys for r in result.shards)}\t"
                 f"{sum(r.records for r in result.shards)}\t"
                 f"{max((r.footprint for r in result.shards), default=0)}\t{result.seconds:.6f}\n")


def write_clusters(path: str | os.PathLike, labels: Mapping[int, int], items: IdMap) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in sorted(labels):
            fh.write(f"{items.name(item)}\t{items.name(labels[item])}\n")


def read_clusters(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            out[cols[0]] = cols[1]
    return out


def write_category_report(path: str | os.PathLike, rows: Iterable[tuple[int, int, float, bool]],
                          categories: IdMap) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ci, cj, theta, sel in rows:
            fh.write(f"{categories.name(ci)}\t{categories.name(cj)}\t{theta!r}\t{int(sel)}\n")


def names_to_ids(mapping: Mapping[Hashable, Hashable], items: IdMap) -> dict[int, int]:
    """Intern both sides of a name -> name map."""
    return {items.intern(k): items.intern(v) for k, v in mapping.items()}
