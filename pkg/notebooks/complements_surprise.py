"""
Complements from purchases
==========================

Complementary items are bought *after* a seed, in a related category.
The score combines three signals:

* which categories tend to follow the seed's category,
* a time-decayed count of users buying the candidate after the seed,
* the same count between the clusters of the two items.
"""

# %%
from prodgraph.model import Action, build_graph
from prodgraph.surprise import CategoryRelevance, SurpriseModel, SurpriseParams
from prodgraph.synthetic import phone_accessory_log

log, cats = phone_accessory_log()
purchases = build_graph(log.events, Action.PURCHASE)
for ev in log.events:
    print(log.users.name(ev.user), log.items.name(ev.item), ev.timestamp // 86400, "d")

# %%
# Category relevance. Each row is cut at its largest relative drop.
rel = CategoryRelevance.build(purchases.to_events(), log.catalog)
for ci, cj, theta, kept in rel.report():
    print(f"{log.categories.name(ci):>9} -> {log.categories.name(cj):<9} {theta:.3f} {'*' if kept else ''}")

# %%
# Item-level scores only (no clusters). Phones lead to accessories, never the
# other way round, because nobody bought a phone after an accessory.
model = SurpriseModel(purchases, log.catalog, params=SurpriseParams(gamma=1))
for seed in ("phone1", "phone2", "shell"):
    nl = model.neighbors(log.items.id(seed))
    print(seed, [(log.items.name(j), round(s, 4)) for j, s in nl.entries])

# %%
# Clusters let sparse items borrow evidence. Put both phones in one cluster
# and the three accessories in another.
labels = {log.items.id(n): log.items.id("phone1") for n in ("phone1", "phone2")}
labels.update({log.items.id(n): log.items.id("shell") for n in ("shell", "membrane", "power")})
blended = SurpriseModel(purchases, log.catalog, labels, SurpriseParams(omega=0.8, gamma=1))
nl = blended.neighbors(log.items.id("phone2"))
for (j, s), (s1, s2) in zip(nl.entries, nl.details):
    print(f"phone2 -> {log.items.name(j):<9} s={s:.4f} s1={s1:.4f} s2={s2:.4f}")
