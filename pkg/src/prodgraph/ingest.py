"""TSV readers and writers for behavior logs and catalogs.

Behavior log lines are ``user \\t item \\t action \\t epoch_seconds`` with an
optional fifth ``category`` column on purchase rows. Catalog lines are
``item \\t category``. Internal ids are assigned in first-seen order.
"""

from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass, field
from typing import Iterable

from .model import Action, BehaviorEvent, Catalog, IdMap

logger = logging.getLogger(__name__)

_INT_RE = re.compile(r"[0-9]+")
MAX_REASONS = 10


class ParseError(ValueError):
    pass


class CatalogConflictError(ParseError):
    pass


@dataclass
class ParseReport:
    path: str
    total: int = 0
    accepted: int = 0
    rejected: int = 0
    reasons: list[str] = field(default_factory=list)

    def reject(self, lineno: int, reason: str) -> None:
        self.rejected += 1
        if len(self.reasons) < MAX_REASONS:
            self.reasons.append(f"line {lineno}: {reason}")


@dataclass
class BehaviorLog:
    """Parsed events together with the id dictionaries that produced them."""

    events: list[BehaviorEvent] = field(default_factory=list)
    users: IdMap = field(default_factory=IdMap)
    items: IdMap = field(default_factory=IdMap)
    categories: IdMap = field(default_factory=IdMap)
    catalog: Catalog = field(default_factory=Catalog)

    @classmethod
    def from_records(cls, records: Iterable[tuple], **kw) -> "BehaviorLog":
        """Build from ``(user, item, action, timestamp[, category])`` tuples."""
        log = cls(**kw)
        for rec in records:
            log.add(*rec)
        return log

    def add(self, user, item, action, timestamp: int, category=None) -> BehaviorEvent:
        if not isinstance(action, Action):
            action = Action.parse(action)
        if timestamp < 0:
            raise ParseError("negative timestamp")
        if category is not None and item in self.items:
            prev = self.catalog.item_category.get(self.items.id(item))
            if prev is not None and self.categories.name(prev) != category:
                raise ParseError(f"category conflict for item {item!r}")
        ev = BehaviorEvent(self.users.intern(user), self.items.intern(item), action, int(timestamp))
        if category is not None:
            self.catalog.assign(ev.item, self.categories.intern(category))
        self.events.append(ev)
        return ev


def _split_line(line: str) -> tuple[tuple, str | None]:
    cols = line.rstrip("\r\n").split("\t")
    if len(cols) not in (4, 5):
        return (), f"expected 4 or 5 columns, got {len(cols)}"
    user, item, action, ts = cols[:4]
    if not user or not item:
        return (), "empty id"
    try:
        act = Action.parse(action)
    except ValueError:
        return (), "unknown action"
    if not _INT_RE.fullmatch(ts):
        return (), f"bad timestamp {ts!r}"
    cat = cols[4] if len(cols) == 5 else None
    if cat == "":
        return (), "empty category"
    return (user, item, act, int(ts), cat), None


def parse_log(path: str | os.PathLike, log: BehaviorLog | None = None,
              strict: bool = False) -> tuple[BehaviorLog, ParseReport]:
    """Parse a behavior log, appending to ``log`` when given.

    Malformed lines are skipped and counted; with ``strict`` the first one
    raises :class:`ParseError`. An unreadable file raises ``OSError``.
    """
    log = BehaviorLog() if log is None else log
    report = ParseReport(str(path))
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            report.total += 1
            rec, reason = _split_line(line)
            if reason is None:
                try:
                    log.add(*rec)
                except ValueError as exc:  # category conflict
                    reason = str(exc)
            if reason is not None:
                if strict:
                    raise ParseError(f"{path}:{lineno}: {reason}")
                report.reject(lineno, reason)
            else:
                report.accepted += 1
    if report.rejected:
        logger.warning("%s: rejected %d of %d lines", path, report.rejected, report.total)
    return log, report


def write_log(path: str | os.PathLike, log: BehaviorLog, with_category: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in log.events:
            cols = [str(log.users.name(ev.user)), str(log.items.name(ev.item)),
                    ev.action.value, str(ev.timestamp)]
            if with_category and ev.item in log.catalog.item_category:
                cols.append(str(log.categories.name(log.catalog.item_category[ev.item])))
            fh.write("\t".join(cols) + "\n")


def parse_catalog(path: str | os.PathLike, log: BehaviorLog | None = None) -> BehaviorLog:
    """Read ``item \\t category`` rows into ``log.catalog``.

    Repeated items must agree on their category, otherwise
    :class:`CatalogConflictError` names both line numbers.
    """
    log = BehaviorLog() if log is None else log
    seen: dict[str, tuple[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise ParseError(f"{path}:{lineno}: expected 2 columns")
            item, cat = cols
            if item in seen:
                prev_cat, prev_line = seen[item]
                if prev_cat != cat:
                    raise CatalogConflictError(
                        f"{path}: item {item!r} is {prev_cat!r} on line {prev_line} "
                        f"but {cat!r} on line {lineno}")
                continue
            seen[item] = (cat, lineno)
            iid = log.items.intern(item)
            cid = log.categories.intern(cat)
            prev = log.catalog.item_category.get(iid)
            if prev is not None and prev != cid:
                raise CatalogConflictError(
                    f"{path}:{lineno}: item {item!r} conflicts with category from the log")
            log.catalog.item_category[iid] = cid
    return log
