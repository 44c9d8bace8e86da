"""
Substitutes from clicks: swing versus cosine
============================================

Five users click around a seed item ``h``. Cosine only counts shared users,
while swing looks at *pairs* of users who share the seed and asks how much
else they have in common. Pairs with little overlap are stronger evidence.
"""

# %%
# A tiny click log. Every user clicked ``h``.
from prodgraph.model import Action, build_graph
from prodgraph.swing import SwingParams, swing_scores
from prodgraph.synthetic import WEDGE_CLICKS, wedge_log

for user, items in WEDGE_CLICKS.items():
    print(user, " ".join(items))

log = wedge_log()
graph = build_graph(log.events, Action.CLICK)
h = log.items.id("h")

# %%
# Plain swing (no user weighting, alpha=1). ``q`` wins although ``p`` is
# clicked by just as many of h's users: the users sharing ``q`` agree on
# nothing else, so each of their pairs counts more.
plain = swing_scores(h, graph, SwingParams(alpha=1.0, user_weighting=False, top_k=None))
for j, s in plain.entries:
    print(f"h -> {log.items.name(j)}  {s:.4f}")

# %%
# With the default 1/sqrt(|I_u|) user weighting, heavy clickers count less.
weighted = swing_scores(h, graph, SwingParams())
for j, s in weighted.entries:
    print(f"h -> {log.items.name(j)}  {s:.4f}")

# %%
# Cosine favours items with small audiences. Padding the popular items with
# extra single-click users flips the order toward the niche ``z``.
from prodgraph.baselines import cosine_sim
from prodgraph.synthetic import padded_cosine_log

padded = padded_cosine_log()
pg = build_graph(padded.events, Action.CLICK)
ph = padded.items.id("h")
for name in "tzpq":
    j = padded.items.id(name)
    print(f"cos(h, {name}) = {cosine_sim(ph, j, pg):.4f}  |U_{name}| = {len(pg.users_of(j))}")
