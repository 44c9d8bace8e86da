import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cosine_oracle, pearson_textbook
from prodgraph.baselines import (BaselineScorer, Ratings, cosine_sim, jaccard_sim, pearson_sim,
                                 top_k_baseline, weighted_cf_sim)
from prodgraph.model import Action, BipartiteGraph, UnknownItemError, build_graph
from prodgraph.synthetic import padded_cosine_log, random_click_log


def graph_of(adj):
    return BipartiteGraph.from_adjacency(adj)


def test_cosine_identical_and_disjoint():
    g = graph_of({0: [0, 1], 1: [0, 1], 2: [2], 3: [3]})
    assert cosine_sim(0, 1, g) == 1.0
    assert cosine_sim(0, 2, g) == 0.0


def test_cosine_ranking_on_padded_fixture():
    log = padded_cosine_log()
    g = build_graph(log.events, Action.CLICK)
    ids = {n: log.items.id(n) for n in "htzpq"}
    assert [len(g.users_of(ids[n])) for n in "htpqz"] == [5, 15, 40, 60, 4]
    s = {n: cosine_sim(ids["h"], ids[n], g) for n in "tzpq"}
    assert s["t"] > s["z"] > s["p"] > s["q"]
    # same order from a set-based brute force
    item_users = {}
    for e in log.events:
        item_users.setdefault(e.item, set()).add(e.user)
    brute = {n: cosine_oracle(item_users, ids["h"], ids[n]) for n in "tzpq"}
    assert sorted(brute, key=brute.get, reverse=True) == ["t", "z", "p", "q"]
    for n in "tzpq":
        assert s[n] == pytest.approx(brute[n], abs=1e-15)


def test_jaccard_examples():
    g = graph_of({0: [0, 1], 1: [0, 1, 2], 2: [1, 2], 3: [3]})
    # U_0 = {0,1}, U_1 = {0,1,2}, U_2 = {1,2}
    assert jaccard_sim(0, 0, g) == 1.0
    assert jaccard_sim(0, 2, g) == pytest.approx(1 / 3)
    assert jaccard_sim(0, 3, g) == 0.0


def test_unknown_item():
    g = graph_of({0: [0]})
    for f in (cosine_sim, jaccard_sim, weighted_cf_sim):
        with pytest.raises(UnknownItemError):
            f(0, 5, g)


def test_pearson_perfect_relations():
    r = Ratings({(0, 0): 1, (1, 0): 2, (2, 0): 3, (0, 1): 2, (1, 1): 4, (2, 1): 6,
                 (0, 2): 3, (1, 2): 2, (2, 2): 1})
    assert pearson_sim(0, 1, r) == pytest.approx(1.0, abs=1e-15)
    assert pearson_sim(0, 2, r) == pytest.approx(-1.0, abs=1e-15)


def test_pearson_matches_textbook(rng):
    for _ in range(20):
        a = rng.integers(1, 6, 5).astype(float)
        b = rng.integers(1, 6, 5).astype(float)
        if a.std() == 0 or b.std() == 0:
            continue
        r = Ratings({**{(u, 0): a[u] for u in range(5)}, **{(u, 1): b[u] for u in range(5)}})
        assert pearson_sim(0, 1, r) == pytest.approx(pearson_textbook(a, b), abs=1e-12)


def test_pearson_degenerate():
    r = Ratings({(0, 0): 2, (1, 0): 2, (0, 1): 1, (1, 1): 5})
    assert pearson_sim(0, 1, r, with_flag=True) == (0.0, True)
    r = Ratings({(0, 0): 1, (0, 1): 5})
    assert pearson_sim(0, 1, r, with_flag=True) == (0.0, True)


def test_weighted_cf_unit_weights():
    g = graph_of({0: [0]})
    assert weighted_cf_sim(0, 0, g) == 1.0
    g = graph_of({0: [0, 1]})
    assert weighted_cf_sim(0, 1, g) == pytest.approx(1.0, abs=1e-15)


def test_weighted_cf_hand_value():
    # U_i={A,B}, U_j={A,C}; |I_A|=4, |I_B|=|I_C|=1
    A, B, C = 0, 1, 2
    i, j = 0, 1
    g = graph_of({A: [i, j, 2, 3], B: [i], C: [j]})
    assert weighted_cf_sim(i, j, g) == pytest.approx(0.2, abs=1e-15)


def equal_degree_graph(rng, n_users, n_items, deg):
    return BipartiteGraph.from_adjacency(
        {u: rng.choice(n_items, deg, replace=False).tolist() for u in range(n_users)})


def test_weighted_cf_reduces_to_cosine_on_equal_degrees(rng):
    for _ in range(10):
        g = equal_degree_graph(rng, 25, 12, int(rng.integers(1, 6)))
        items = g.items().tolist()
        for i in items:
            for j in items:
                assert weighted_cf_sim(i, j, g) == pytest.approx(cosine_sim(i, j, g), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(0, 12), st.sets(st.integers(0, 9), min_size=1, max_size=6),
                       min_size=1, max_size=12))
def test_symmetry_and_range(adj):
    g = graph_of(adj)
    items = g.items().tolist()
    for i in items:
        for j in items:
            for f in (cosine_sim, jaccard_sim, weighted_cf_sim):
                v = f(i, j, g)
                assert v == f(j, i, g)
                assert -1e-15 <= v <= 1.0 + 1e-12


@pytest.mark.parametrize("measure,pairwise", [
    ("cosine", cosine_sim), ("jaccard", jaccard_sim), ("weighted-cf", weighted_cf_sim)])
def test_top_k_batch_matches_per_pair_brute_force(rng, measure, pairwise):
    log = random_click_log(rng, 40, 25, 300)
    g = build_graph(log.events, Action.CLICK)
    k = 5
    index = top_k_baseline(g, measure, k)
    for i in g.items().tolist():
        brute = [(j, pairwise(i, j, g)) for j in g.items().tolist() if j != i]
        brute = [(j, s) for j, s in brute if s > 0]
        brute.sort(key=lambda e: (-round(e[1], 12), e[0]))
        got = index[i]
        assert len(got) == min(k, len(brute))
        for (j, s), (bj, bs) in zip(got.entries, brute):
            assert s == pytest.approx(bs, abs=1e-12)
        assert set(got.neighbors) <= {j for j, _ in brute}
        assert i not in got.neighbors


def test_scorer_rejects_bad_measure_and_k():
    g = graph_of({0: [0, 1]})
    with pytest.raises(ValueError):
        BaselineScorer.for_graph(g, "adamic")
    with pytest.raises(ValueError):
        BaselineScorer.for_graph(g, "cosine", top_k=0)
    with pytest.raises(ValueError):
        BaselineScorer.for_graph(g, "pearson")
