"""Shared domain types and the immutable user/item behavior graph."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    pass


class NoEventsError(GraphError):
    pass


class UnknownItemError(KeyError):
    pass


class Action(enum.Enum):
    CLICK = "click"
    PURCHASE = "purchase"

    @classmethod
    def parse(cls, text: str) -> "Action":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown action {text!r}") from None


class BehaviorEvent(NamedTuple):
    user: int
    item: int
    action: Action
    timestamp: int


class IdMap:
    """Bijective external-name <-> dense integer id dictionary.

    Ids are handed out in first-seen order starting at 0.
    """

    def __init__(self, names: Iterable[Hashable] = ()):
        self._ids: dict[Hashable, int] = {}
        self._names: list[Hashable] = []
        for name in names:
            self.intern(name)

    def intern(self, name: Hashable) -> int:
        idx = self._ids.get(name)
        if idx is None:
            idx = len(self._names)
            self._ids[name] = idx
            self._names.append(name)
        return idx

    def id(self, name: Hashable) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise UnknownItemError(name) from None

    def get(self, name: Hashable, default=None):
        return self._ids.get(name, default)

    def name(self, idx: int) -> Hashable:
        return self._names[idx]

    def names(self) -> list[Hashable]:
        return list(self._names)

    def __contains__(self, name) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._names)

    def __eq__(self, other) -> bool:
        return isinstance(other, IdMap) and self._names == other._names

    def __repr__(self) -> str:
        return f"IdMap(n={len(self)})"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class BipartiteGraph:
    """Immutable user <-> item adjacency in two CSR layouts.

    Ids are dense non-negative integers. A user or item is *stored* when it
    has at least one edge; ids below ``n_users`` / ``n_items`` with no edges
    are simply absent. Both adjacency layouts are strictly ascending, and
    each user-item pair appears once with its earliest timestamp.

    Build instances with :func:`build_graph` or :meth:`from_adjacency`.
    """

    def __init__(self, users, items, timestamps, action: Action,
                 n_users: int | None = None, n_items: int | None = None):
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        timestamps = np.asarray(timestamps, dtype=np.int64)
        if not (users.shape == items.shape == timestamps.shape):
            raise GraphError("edge arrays must have equal length")
        if users.size and (users.min() < 0 or items.min() < 0):
            raise GraphError("ids must be non-negative")
        n_users = int(users.max()) + 1 if n_users is None and users.size else (n_users or 0)
        n_items = int(items.max()) + 1 if n_items is None and items.size else (n_items or 0)
        if users.size and (users.max() >= n_users or items.max() >= n_items):
            raise GraphError("id outside declared id space")

        # dedupe (user, item) keeping the earliest timestamp
        order = np.lexsort((timestamps, items, users))
        users, items, timestamps = users[order], items[order], timestamps[order]
        if users.size:
            first = np.ones(users.size, dtype=bool)
            first[1:] = (users[1:] != users[:-1]) | (items[1:] != items[:-1])
            users, items, timestamps = users[first], items[first], timestamps[first]

        self.action = action
        self.n_users = n_users
        self.n_items = n_items
        self.user_indptr = _frozen(np.concatenate(
            ([0], np.cumsum(np.bincount(users, minlength=n_users)))).astype(np.int64))
        self.user_indices = _frozen(items)
        self.user_times = _frozen(timestamps)

        by_item = np.lexsort((users, items))
        self.item_indptr = _frozen(np.concatenate(
            ([0], np.cumsum(np.bincount(items, minlength=n_items)))).astype(np.int64))
        self.item_indices = _frozen(users[by_item])
        self.item_times = _frozen(timestamps[by_item])
        self._edge_users = _frozen(users)

    @classmethod
    def from_adjacency(cls, adjacency: Mapping[int, Iterable[int]],
                       action: Action = Action.CLICK, timestamps: Mapping | None = None,
                       n_users: int | None = None, n_items: int | None = None):
        """Build from ``{user: items}``; ``timestamps`` maps (user, item) to time."""
        us, its, ts = [], [], []
        for u, items in adjacency.items():
            for i in items:
                us.append(u)
                its.append(i)
                ts.append(0 if timestamps is None else timestamps[(u, i)])
        if not us:
            raise NoEventsError("no events")
        return cls(us, its, ts, action, n_users=n_users, n_items=n_items)

    # -- degrees ---------------------------------------------------------
    @cached_property
    def user_degree(self) -> np.ndarray:
        return _frozen(np.diff(self.user_indptr))

    @cached_property
    def item_degree(self) -> np.ndarray:
        return _frozen(np.diff(self.item_indptr))

    @property
    def n_edges(self) -> int:
        return int(self.user_indices.size)

    def users(self) -> np.ndarray:
        """Stored user ids, ascending."""
        return np.flatnonzero(self.user_degree)

    def items(self) -> np.ndarray:
        """Stored item ids, ascending."""
        return np.flatnonzero(self.item_degree)

    def has_item(self, item: int) -> bool:
        return 0 <= item < self.n_items and self.item_degree[item] > 0

    def has_user(self, user: int) -> bool:
        return 0 <= user < self.n_users and self.user_degree[user] > 0

    def _check_item(self, item: int) -> None:
        if not self.has_item(item):
            raise UnknownItemError(item)

    # -- adjacency -------------------------------------------------------
    def items_of(self, user: int) -> np.ndarray:
        return self.user_indices[self.user_indptr[user]:self.user_indptr[user + 1]]

    def item_times_of(self, user: int) -> np.ndarray:
        """Timestamps aligned with :meth:`items_of`."""
        return self.user_times[self.user_indptr[user]:self.user_indptr[user + 1]]

    def users_of(self, item: int) -> np.ndarray:
        self._check_item(item)
        return self.item_indices[self.item_indptr[item]:self.item_indptr[item + 1]]

    def user_times_of(self, item: int) -> np.ndarray:
        """Timestamps aligned with :meth:`users_of`."""
        self._check_item(item)
        return self.item_times[self.item_indptr[item]:self.item_indptr[item + 1]]

    def timestamp(self, user: int, item: int) -> int:
        items = self.items_of(user)
        pos = np.searchsorted(items, item)
        if pos == items.size or items[pos] != item:
            raise KeyError((user, item))
        return int(self.item_times_of(user)[pos])

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """(user, item, timestamp) in user-major order."""
        for u, i, t in zip(self._edge_users.tolist(), self.user_indices.tolist(),
                           self.user_times.tolist()):
            yield u, i, t

    def user_rows(self) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        """(user, items, timestamps) for every stored user."""
        for u in self.users().tolist():
            yield u, self.items_of(u), self.item_times_of(u)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Binary user x item CSR matrix."""
        data = np.ones(self.n_edges, dtype=np.float64)
        return sp.csr_matrix((data, self.user_indices, self.user_indptr),
                             shape=(self.n_users, self.n_items))

    def to_events(self) -> list[BehaviorEvent]:
        return [BehaviorEvent(u, i, self.action, t) for u, i, t in self.edges()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.action == other.action and self.n_users == other.n_users
                and self.n_items == other.n_items
                and np.array_equal(self.user_indptr, other.user_indptr)
                and np.array_equal(self.user_indices, other.user_indices)
                and np.array_equal(self.user_times, other.user_times))

    def __repr__(self) -> str:
        return (f"BipartiteGraph({self.action.value}, users={len(self.users())}, "
                f"items={len(self.items())}, edges={self.n_edges})")


def build_graph(events: Iterable[BehaviorEvent], action: Action,
                n_users: int | None = None, n_items: int | None = None) -> BipartiteGraph:
    """Materialize the graph of one action kind from an event stream.

    Raises
    ------
    NoEventsError
        If no event of ``action`` is present.
    """
    us, its, ts = [], [], []
    for ev in events:
        if ev.action is action:
            if ev.timestamp < 0:
                raise GraphError(f"negative timestamp in {ev}")
            us.append(ev.user)
            its.append(ev.item)
            ts.append(ev.timestamp)
    if not us:
        raise NoEventsError(f"no {action.value} events")
    return BipartiteGraph(us, its, ts, action, n_users=n_users, n_items=n_items)


@dataclass(frozen=True)
class NeighborList:
    """Ranked neighbors of one seed item.

    ``details`` optionally carries one tuple of auxiliary scores per entry
    (the surprise builder stores ``(s1, s2)`` there).
    """

    seed: int
    neighbors: tuple[int, ...] = ()
    scores: tuple[float, ...] = ()
    details: tuple[tuple[float, ...], ...] | None = None

    @classmethod
    def from_scores(cls, seed: int, candidates: Sequence[int], scores: Sequence[float],
                    k: int | None = None, details: Sequence[tuple] | None = None) -> "NeighborList":
        """Rank candidates by score desc, id asc; drop the seed and scores <= 0."""
        cand = np.asarray(candidates, dtype=np.int64)
        sc = np.asarray(scores, dtype=np.float64)
        if not np.all(np.isfinite(sc)):
            raise ValueError(f"non-finite score for seed {seed}")
        keep = (sc > 0) & (cand != seed)
        idx = np.flatnonzero(keep)
        order = idx[np.lexsort((cand[idx], -sc[idx]))]
        if k is not None:
            order = order[:k]
        det = None if details is None else tuple(tuple(details[o]) for o in order.tolist())
        return cls(seed, tuple(cand[order].tolist()), tuple(sc[order].tolist()), det)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.neighbors, self.scores))

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.neighbors, self.scores))

    def truncated(self, k: int) -> "NeighborList":
        det = None if self.details is None else self.details[:k]
        return NeighborList(self.seed, self.neighbors[:k], self.scores[:k], det)

    def __len__(self) -> int:
        return len(self.neighbors)


@dataclass
class Catalog:
    """Item -> category map plus per-category purchase counters N(c)."""

    item_category: dict[int, int] = field(default_factory=dict)
    category_purchase_count: dict[int, int] = field(default_factory=dict)

    def category(self, item: int) -> int:
        try:
            return self.item_category[item]
        except KeyError:
            raise UnknownItemError(f"item {item} has no category") from None

    def assign(self, item: int, category: int) -> None:
        prev = self.item_category.get(item)
        if prev is not None and prev != category:
            raise GraphError(f"item {item} already in category {prev}, not {category}")
        self.item_category[item] = category

    def count_purchases(self, events: Iterable[BehaviorEvent]) -> None:
        """Recompute N(c) from purchase events."""
        counts: dict[int, int] = {}
        for ev in events:
            if ev.action is Action.PURCHASE:
                c = self.category(ev.item)
                counts[c] = counts.get(c, 0) + 1
        self.category_purchase_count = counts


def _gather_rows(indptr: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positions of the concatenated CSR rows ``rows`` and the new indptr."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    new_ptr = np.concatenate(([0], np.cumsum(lens))).astype(np.int64)
    pos = np.repeat(starts - new_ptr[:-1], lens) + np.arange(new_ptr[-1])
    return pos, new_ptr


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """Everything local to one seed: U_seed and I_u for each u in U_seed.

    Stored as a small CSR block: ``users`` ascending, and row ``k``
    (``indices[indptr[k]:indptr[k+1]]``, with aligned ``times`` when present)
    holds the ascending items of ``users[k]``. This is exactly the data a
    reducer receives for one key, so scorers that consume only a
    neighborhood give the same answer sequentially and sharded.
    """

    seed: int
    users: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    times: np.ndarray | None = None

    @classmethod
    def of(cls, graph: BipartiteGraph, seed: int, with_times: bool = False) -> "Neighborhood":
        users = graph.users_of(seed)
        pos, indptr = _gather_rows(graph.user_indptr, users)
        times = graph.user_times[pos] if with_times else None
        return cls(seed, users, indptr, graph.user_indices[pos], times)

    @classmethod
    def from_rows(cls, seed: int, users, items, times=None) -> "Neighborhood":
        """Build from per-user item arrays (and time arrays)."""
        lens = [len(it) for it in items]
        indptr = np.concatenate(([0], np.cumsum(lens))).astype(np.int64)
        cat = lambda parts: (np.concatenate(parts).astype(np.int64) if parts
                             else np.empty(0, dtype=np.int64))
        return cls(seed, np.asarray(users, dtype=np.int64), indptr, cat(items),
                   None if times is None else cat(times))

    def __len__(self) -> int:
        return int(self.users.size)

    @property
    def row_lengths(self) -> np.ndarray:
        return np.diff(self.indptr)

    def items_of(self, k: int) -> np.ndarray:
        return self.indices[self.indptr[k]:self.indptr[k + 1]]

    def row_ids(self) -> np.ndarray:
        """Row number of every entry of ``indices``."""
        return np.repeat(np.arange(self.users.size), self.row_lengths)

    def seed_times(self) -> np.ndarray:
        """Per-row timestamp of the interaction with the seed."""
        return self.times[self.indices == self.seed]

    def subset(self, rows: np.ndarray) -> "Neighborhood":
        pos, indptr = _gather_rows(self.indptr, rows)
        times = None if self.times is None else self.times[pos]
        return Neighborhood(self.seed, self.users[rows], indptr, self.indices[pos], times)
