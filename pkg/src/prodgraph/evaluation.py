"""Hit-based offline evaluation and online ratio calculators.

Items here are arbitrary hashables, so an index loaded from disk with
external names can be evaluated without re-mapping ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class EvalCase:
    user: Hashable
    seed: Hashable
    truth: tuple
    predict: tuple
    timestamp: int = 0  # when the seed was interacted with

    @property
    def hits(self) -> set:
        return set(self.predict) & set(self.truth)


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    map_literal: float
    ap_standard: float
    case_count: int

    def rows(self) -> list[tuple[str, float]]:
        return [("precision", self.precision), ("recall", self.recall),
                ("map_literal", self.map_literal), ("ap_standard", self.ap_standard),
                ("cases", float(self.case_count))]


def _dedupe(seq: Iterable) -> tuple:
    seen, out = set(), []
    for x in seq:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def make_case(user, sequence: Sequence, seed_pos: int, predict: Sequence, k: int,
              timestamp: int = 0) -> EvalCase:
    seed = sequence[seed_pos]
    truth = _dedupe(x for x in sequence[seed_pos + 1:] if x != seed)
    return EvalCase(user, seed, truth, tuple(predict)[:k], timestamp)


def build_cases(events: Iterable[tuple[Hashable, Hashable, int]],
                index: Mapping[Hashable, Sequence], split: int, k: int,
                seed_mode: str = "first", rng_seed: int = 0) -> list[EvalCase]:
    """One case per user from that user's behavior after ``split``.

    Parameters
    ----------
    events : iterable of (user, item, timestamp)
        Behavior used for ground truth; only events with ``timestamp > split``
        are considered. Ties in time keep input order.
    index : mapping
        seed item -> ranked neighbor items. Missing seeds predict nothing.
    seed_mode : {"first", "random"}
        ``"random"`` picks a non-final position uniformly with
        ``numpy.random.default_rng(rng_seed)``, users visited in sorted order.

    Users with fewer than two test events, or with nothing new after the
    seed, are skipped.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if seed_mode not in ("first", "random"):
        raise ValueError("seed_mode must be 'first' or 'random'")
    seqs: dict[Hashable, list[tuple[int, int, Hashable]]] = {}
    for n, (user, item, ts) in enumerate(events):
        if ts > split:
            seqs.setdefault(user, []).append((ts, n, item))
    rng = np.random.default_rng(rng_seed)
    cases = []
    for user in sorted(seqs, key=repr):
        seq = sorted(seqs[user])
        if len(seq) < 2:
            continue
        items = [it for _, _, it in seq]
        pos = 0 if seed_mode == "first" else int(rng.integers(0, len(items) - 1))
        case = make_case(user, items, pos, index.get(items[pos], ()), k, seq[pos][0])
        if case.truth:
            cases.append(case)
    return cases


def precision_at(predict: Sequence, truth: set, k: int) -> float:
    return sum(1 for x in predict[:k] if x in truth) / k


def score(cases: Sequence[EvalCase]) -> MetricReport:
    """Mean precision, recall, the literal sum-of-precision@k MAP, and standard AP.

    An empty prediction list contributes 0 to every metric.
    """
    n = len(cases)
    if n == 0:
        raise ValueError("no cases to score")
    prec = rec = map_lit = ap = 0.0
    for c in cases:
        truth = set(c.truth)
        if not truth:
            raise ValueError(f"case for user {c.user!r} has empty truth")
        m = len(c.predict)
        if m == 0:
            continue
        hits = len(set(c.predict) & truth)
        prec += hits / m
        rec += hits / len(truth)
        at_k = [precision_at(c.predict, truth, j) for j in range(1, m + 1)]
        map_lit += sum(at_k)
        rel = sum(p for p, x in zip(at_k, c.predict) if x in truth)
        ap += rel / min(m, len(truth))
    return MetricReport(prec / n, rec / n, map_lit / n, ap / n, n)


def daily_scores(cases: Sequence[EvalCase], day_seconds: int = 86400) -> list[tuple[int, MetricReport]]:
    """Metrics grouped by the day of each case's seed event."""
    days: dict[int, list[EvalCase]] = {}
    for c in cases:
        days.setdefault(c.timestamp // day_seconds, []).append(c)
    return [(d, score(cs)) for d, cs in sorted(days.items())]


@dataclass(frozen=True)
class OnlineRatios:
    """CTR, CVR and PPM; ``None`` marks a ratio with a zero denominator."""

    ctr: float | None
    cvr: float | None
    ppm: float | None


def online_ratios(show_pv: int, item_click: int, item_trade: int, payment: float) -> OnlineRatios:
    ctr = item_click / show_pv if show_pv else None
    cvr = item_trade / item_click if item_click else None
    ppm = payment * 1000 / show_pv if show_pv else None
    return OnlineRatios(ctr, cvr, ppm)
