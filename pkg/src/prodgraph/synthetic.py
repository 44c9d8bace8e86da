"""Fixtures and seeded synthetic corpora."""

from __future__ import annotations

import numpy as np

from .ingest import BehaviorLog

# Five users who all clicked the seed ``h``; z, y, o and x hang off single users.
WEDGE_CLICKS = {
    "A": "htrpz",
    "B": "htrp",
    "C": "hpqy",
    "D": "hq",
    "E": "hqox",
}

# Item degrees for the cosine counter-example: t, z, p, q clicked by this many users.
PADDED_DEGREES = {"h": 5, "t": 15, "p": 40, "q": 60, "z": 4}


def clicks_log(clicks: dict[str, str | list[str]], timestamp: int = 0) -> BehaviorLog:
    """Click log from ``{user: items}``; string values are split into characters."""
    return BehaviorLog.from_records(
        (u, i, "click", timestamp) for u, items in clicks.items() for i in items)


def wedge_log() -> BehaviorLog:
    return clicks_log(WEDGE_CLICKS)


def padded_cosine_log() -> BehaviorLog:
    """The wedge users plus single-item padding users that lift the item degrees."""
    clicks: dict[str, list[str]] = {u: list(s) for u, s in WEDGE_CLICKS.items()}
    base = {i: sum(i in s for s in WEDGE_CLICKS.values()) for i in PADDED_DEGREES}
    for item, target in PADDED_DEGREES.items():
        for n in range(target - base[item]):
            clicks[f"pad_{item}_{n}"] = [item]
    return clicks_log(clicks)


def random_click_log(rng: np.random.Generator, n_users: int, n_items: int,
                     n_events: int, t_max: int = 1000) -> BehaviorLog:
    users = rng.integers(0, n_users, n_events)
    items = rng.integers(0, n_items, n_events)
    times = rng.integers(0, t_max, n_events)
    return BehaviorLog.from_records(
        (f"u{u}", f"i{i}", "click", int(t)) for u, i, t in zip(users, items, times))


def random_purchase_log(rng: np.random.Generator, n_users: int, n_items: int,
                        n_categories: int, n_events: int, days: int = 30) -> BehaviorLog:
    """Purchases with a fixed item -> category map and category-correlated baskets.

    Each user favours a couple of categories so that the category relevance
    matrix has structure; timestamps are uniform over ``days`` days.
    """
    item_cat = rng.integers(0, n_categories, n_items)
    by_cat = [np.flatnonzero(item_cat == c) for c in range(n_categories)]
    by_cat = [a if a.size else np.arange(n_items) for a in by_cat]
    log = BehaviorLog()
    for i in range(n_items):
        log.catalog.item_category[log.items.intern(f"i{i}")] = log.categories.intern(f"c{item_cat[i]}")
    per_user = max(1, n_events // n_users)
    n = 0
    while n < n_events:
        for u in range(n_users):
            if n >= n_events:
                break
            fav = rng.choice(n_categories, size=min(2, n_categories), replace=False)
            for _ in range(min(per_user, n_events - n)):
                c = fav[rng.integers(0, fav.size)] if rng.random() < 0.7 else rng.integers(0, n_categories)
                item = by_cat[c][rng.integers(0, by_cat[c].size)]
                t = int(rng.integers(0, days * 86400))
                log.add(f"u{u}", f"i{item}", "purchase", t)
                n += 1
    return log


def phone_accessory_log() -> tuple[BehaviorLog, dict[str, str]]:
    """Users buy a phone and, days later, accessories.

    Returns the log and the item -> category names.
    """
    cats = {"phone1": "phone", "phone2": "phone", "shell": "shell",
            "membrane": "membrane", "power": "power"}
    log = BehaviorLog()
    for item, cat in cats.items():
        log.catalog.item_category[log.items.intern(item)] = log.categories.intern(cat)
    day = 86400
    rows = [
        ("u1", "phone1", 0), ("u1", "shell", 1 * day), ("u1", "membrane", 2 * day),
        ("u2", "phone1", 0), ("u2", "shell", 3 * day), ("u2", "power", 3 * day),
        ("u3", "phone1", 5 * day), ("u3", "membrane", 6 * day), ("u3", "power", 9 * day),
        ("u4", "phone2", 0), ("u4", "shell", 1 * day), ("u4", "power", 2 * day),
        ("u5", "phone2", 0), ("u5", "membrane", 4 * day),
    ]
    for u, i, t in rows:
        log.add(u, i, "purchase", t)
    return log, cats


def planted_click_log(rng: np.random.Generator, n_clusters: int = 30, cluster_size: int = 8,
                      n_users: int = 1500, clicks_per_user: tuple[int, int] = (4, 10),
                      noise: float = 0.3, n_noise_users: int = 60,
                      noise_user_clicks: int = 40, horizon: int = 20 * 86400) -> BehaviorLog:
    """Clicks with planted substitute groups.

    Items ``g{c}_{k}`` form group ``c``. A regular user browses one group, and
    each click is replaced by a uniformly random item with probability
    ``noise``. A few hyperactive users click ``noise_user_clicks`` random
    items. Timestamps are uniform over ``horizon`` seconds.
    """
    n_items = n_clusters * cluster_size
    names = [f"g{c}_{k}" for c in range(n_clusters) for k in range(cluster_size)]
    records = []
    for u in range(n_users):
        group = rng.integers(0, n_clusters)
        n = int(rng.integers(clicks_per_user[0], clicks_per_user[1] + 1))
        times = np.sort(rng.integers(0, horizon, n))
        for t in times:
            if rng.random() < noise:
                item = int(rng.integers(0, n_items))
            else:
                item = int(group * cluster_size + rng.integers(0, cluster_size))
            records.append((f"u{u}", names[item], "click", int(t)))
    for u in range(n_noise_users):
        items = rng.choice(n_items, size=min(noise_user_clicks, n_items), replace=False)
        for item in items:
            records.append((f"n{u}", names[item], "click", int(rng.integers(0, horizon))))
    return BehaviorLog.from_records(records)
