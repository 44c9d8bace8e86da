"""Brute-force reference implementations used only by the tests.

Everything here works on plain dicts and sets built straight from event
tuples and never touches the package's graph or scoring code.
"""

import math
from itertools import combinations


def earliest(events):
    """(user, item, t) tuples -> {(user, item): earliest t}."""
    out = {}
    for u, i, t in events:
        if (u, i) not in out or t < out[(u, i)]:
            out[(u, i)] = t
    return out


def adjacency(pairs):
    user_items, item_users = {}, {}
    for u, i in pairs:
        user_items.setdefault(u, set()).add(i)
        item_users.setdefault(i, set()).add(u)
    return user_items, item_users


def swing_oracle(user_items, alpha=1.0, weighted=True, ordered=False):
    """{seed: {j: score}} by triple loop over (u, v, j)."""
    item_users = {}
    for u, items in user_items.items():
        for i in items:
            item_users.setdefault(i, set()).add(u)
    out = {}
    for i, ui in item_users.items():
        scores = {}
        users = sorted(ui)
        pairs = [(u, v) for u in users for v in users if u != v] if ordered \
            else list(combinations(users, 2))
        for u, v in pairs:
            common = (user_items[u] & user_items[v]) - {i}
            w = 1.0
            if weighted:
                w = 1.0 / math.sqrt(len(user_items[u])) / math.sqrt(len(user_items[v]))
            for j in common:
                scores[j] = scores.get(j, 0.0) + w / (alpha + len(common))
        out[i] = scores
    return out


def cosine_oracle(item_users, i, j):
    a, b = item_users[i], item_users[j]
    return len(a & b) / math.sqrt(len(a) * len(b))


def pearson_textbook(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def theta_oracle(events, item_cat):
    """events: (user, item, t) purchases. Pair counting over all event pairs."""
    total = {}
    for _, i, _ in events:
        total[item_cat[i]] = total.get(item_cat[i], 0) + 1
    by_user = {}
    for n, (u, i, t) in enumerate(events):
        by_user.setdefault(u, []).append((n, item_cat[i], t))
    counts = {}
    for evs in by_user.values():
        seen = set()
        for n1, c1, t1 in evs:
            for n2, c2, t2 in evs:
                if n1 != n2 and t2 >= t1:
                    seen.add((c1, c2))
        for key in seen:
            counts[key] = counts.get(key, 0) + 1
    return {k: v / total[k[1]] for k, v in counts.items()}


def gamma_oracle(theta):
    rows = {}
    for (ci, cj), t in theta.items():
        rows.setdefault(ci, []).append((cj, t))
    out = {}
    for ci, row in rows.items():
        row.sort(key=lambda e: (-e[1], e[0]))
        best, cut = 0.0, len(row)
        for k in range(len(row) - 1):
            drop = abs((row[k + 1][1] - row[k][1]) / row[k][1])
            if drop > best:
                best, cut = drop, k + 1
        out[ci] = {c for c, _ in row[:cut]}
    return out


def forward_scores(times, unit, gamma=None, sqrt_norm=False):
    """times: {(u, x): t} with earliest times. Returns {x: {y: (s, co)}}."""
    user_items, item_users = adjacency(times)
    out = {}
    for x, ux in item_users.items():
        row = {}
        for u in ux:
            tx = times[(u, x)]
            for y in user_items[u]:
                if y == x or times[(u, y)] < tx:
                    continue
                s, c = row.get(y, (0.0, 0))
                row[y] = (s + 1.0 / (1.0 + (times[(u, y)] - tx) / unit), c + 1)
        for y, (s, c) in row.items():
            den = len(ux) * len(item_users[y])
            row[y] = (s / (math.sqrt(den) if sqrt_norm else den), c)
        out[x] = row
    return out


def surprise_oracle(events, item_cat, labels=None, omega=0.8, gamma=1, unit=86400.0):
    """{seed: {j: (score, s1, s2)}} by scanning every user's purchases."""
    times = earliest(events)
    deduped = [(u, i, t) for (u, i), t in times.items()]
    gam = gamma_oracle(theta_oracle(deduped, item_cat))
    item_level = forward_scores(times, unit)
    cluster_level = {}
    if labels is not None:
        ctimes = earliest((u, labels.get(i, i), t) for (u, i), t in times.items())
        cluster_level = forward_scores(ctimes, unit)
    else:
        omega = 1.0
    out = {}
    for i, row in item_level.items():
        res = {}
        for j, (s, co) in row.items():
            if item_cat[j] not in gam.get(item_cat[i], set()):
                continue
            s1 = s if co > gamma else 0.0
            s2 = 0.0
            if labels is not None:
                li, lj = labels.get(i, i), labels.get(j, j)
                if li != lj:
                    s2 = cluster_level.get(li, {}).get(lj, (0.0, 0))[0]
            res[j] = (omega * s1 + (1 - omega) * s2, s1, s2)
        out[i] = res
    return out


def weak_components(edges):
    """edges: iterable of (a, b). Returns {node: component representative}."""
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return {x: find(x) for x in list(parent)}
