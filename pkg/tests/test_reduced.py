from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs
from unituran.conditions import SplitCertificate, find_split_certificate, pairs, paper_split_certificate
from unituran.hypergraph import BudgetExceeded, Hypergraph, family_F, shadow, tight_path
from unituran.reduced import (
    AnchorFamily,
    PreconditionError,
    ReducedGraph,
    ReducedMap,
    algorithm1_color,
    anchor_certified_graph,
    anchor_edges,
    build_reduced_map_from_anchors,
    find_reduced_map,
    is_d_dense,
    lemma5_bound_check,
    normalized_degree,
    s_rho,
    verify_anchors,
    verify_reduced_map,
)

EDGE = Hypergraph(3, 3, ((0, 1, 2),))


def oracle_is_map(F, A, phi, psi):
    for e in F.edges:
        idx = [phi[v] for v in e]
        if len(set(idx)) != F.k:
            return False
        Y = tuple(sorted(idx))
        image = set()
        for v in e:
            S = tuple(u for u in e if u != v)
            X = tuple(sorted(phi[u] for u in S))
            if psi[S] not in A.classes[X]:
                return False
            image.add(psi[S])
        # as a vertex set: each vertex knows its class, so the set fixes the tuple
        if not any(set(c) == image for c in A.constituents[Y]):
            return False
    return True


def brute_exists(F, A):
    sh = sorted(shadow(F))
    for phi_vals in product(range(A.m), repeat=F.n):
        phi = dict(enumerate(phi_vals))
        if any(len({phi[v] for v in e}) < F.k for e in F.edges):
            continue
        domains = [A.classes[tuple(sorted(phi[u] for u in S))] for S in sh]
        for choice in product(*domains):
            if oracle_is_map(F, A, phi, dict(zip(sh, choice))):
                return True
    return False


def small_instance(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 5))
    A = ReducedGraph.random(3, m, 2, float(rng.uniform(0.2, 0.9)), int(rng.integers(10**6)))
    n = int(rng.integers(3, 5))
    pool = list(combinations(range(n), 3))
    pick = rng.random(len(pool)) < 0.6
    edges = [e for e, b in zip(pool, pick) if b] or [pool[0]]
    return Hypergraph(3, n, tuple(edges)), A


def test_reduced_graph_validation():
    base = ReducedGraph.with_sizes(3, 3, 1)
    with pytest.raises(ValueError):
        ReducedGraph(3, 3, {**base.classes, (0, 1): (0, 1)})
    with pytest.raises(ValueError):
        ReducedGraph(3, 3, base.classes, {(0, 1, 2): {(0, 0, 1)}})
    cls = base.classes
    A = ReducedGraph(3, 3, cls, {(0, 1, 2): {(cls[(0, 1)][0], cls[(1, 2)][0], cls[(0, 2)][0])}})
    # stored positionally: slot l holds the class missing the l-th index
    assert A.constituents[(0, 1, 2)] == {(cls[(1, 2)][0], cls[(0, 2)][0], cls[(0, 1)][0])}


def test_dense_examples():
    assert is_d_dense(ReducedGraph.complete(3, 4, 2), 1)
    assert not is_d_dense(ReducedGraph.with_sizes(3, 4, 2), Fraction(1, 10))
    full = ReducedGraph.complete(3, 4, 2)
    Y = (0, 1, 2)
    some = dict(full.constituents)
    some[Y] = frozenset(sorted(full.constituents[Y])[:3])
    A = ReducedGraph(3, 4, full.classes, some)
    assert is_d_dense(A, Fraction(3, 8))
    assert not is_d_dense(A, Fraction(1, 2))


def test_single_edge_map():
    A = ReducedGraph.complete(3, 3, 1)
    rm = find_reduced_map(EDGE, A)
    assert rm is not None and verify_reduced_map(EDGE, A, rm)
    wrong = dict(rm.psi)
    S = next(iter(wrong))
    other = next(X for X in A.classes if A.classes[X][0] != wrong[S])
    wrong[S] = A.classes[other][0]
    assert not verify_reduced_map(EDGE, A, ReducedMap(rm.phi, wrong))


def test_missing_keys_raise():
    A = ReducedGraph.complete(3, 3, 1)
    with pytest.raises(ValueError):
        verify_reduced_map(EDGE, A, ReducedMap({0: 0, 1: 1}, {}))


def test_empty_constituents_block_maps():
    assert find_reduced_map(tight_path(3, 4), ReducedGraph.with_sizes(3, 4, 1)) is None


def test_family_in_complete_graph():
    A = ReducedGraph.complete(3, 9, 1)
    F = family_F(3, 1)
    rm = find_reduced_map(F, A)
    assert rm is not None and verify_reduced_map(F, A, rm)


def test_map_budget():
    A = ReducedGraph.random(3, 4, 2, 0.3, 1)
    with pytest.raises(BudgetExceeded):
        find_reduced_map(Hypergraph(3, 4, tuple(combinations(range(4), 3))), A, budget=2)


@given(st.integers(0, 10**6))
def test_map_search_matches_brute_force(seed):
    F, A = small_instance(seed)
    rm = find_reduced_map(F, A)
    assert (rm is not None) == brute_exists(F, A)
    if rm is not None:
        assert oracle_is_map(F, A, rm.phi, rm.psi)


def test_normalized_degree_examples():
    full = ReducedGraph.complete(3, 3, 2)
    Y = (0, 1, 2)
    v = full.part(Y, 1)[0]
    assert normalized_degree(full, Y, 1, v) == 1
    assert normalized_degree(ReducedGraph.with_sizes(3, 3, 2), Y, 1, v) == 0
    half = ReducedGraph(3, 3, full.classes, {Y: {e for e in full.constituents[Y] if e[1] == full.part(Y, 2)[0]}})
    assert normalized_degree(half, Y, 1, v) == Fraction(1, 2)
    with pytest.raises(ValueError):
        normalized_degree(full, Y, 2, v)


@given(st.integers(0, 10**6))
def test_degree_sums(seed):
    A = ReducedGraph.random(3, 4, 3, 0.5, seed)
    for Y, E in A.constituents.items():
        for ell in range(1, 4):
            others = A.capacity(Y) // len(A.part(Y, ell))
            total = sum(normalized_degree(A, Y, ell, v) * others for v in A.part(Y, ell))
            assert total == len(E)
            assert all(0 <= normalized_degree(A, Y, ell, v) <= 1 for v in A.part(Y, ell))


def test_s_rho_examples():
    full = ReducedGraph.complete(3, 3, 2)
    Y = (0, 1, 2)
    assert s_rho(full, Y, 1, 1) == set(full.part(Y, 1))
    v = full.part(Y, 1)[0]
    one = ReducedGraph(3, 3, full.classes, {Y: {e for e in full.constituents[Y] if e[0] == v}})
    assert s_rho(one, Y, 1, Fraction(1, 100)) == {v}
    with pytest.raises(ValueError):
        s_rho(full, Y, 1, 0)


def test_algorithm1_scan_order():
    A = ReducedGraph.complete(3, 5, 2)
    assert algorithm1_color(A, range(5), Fraction(1, 2)) == (1, 2)


def test_algorithm1_none_and_one_three():
    # k = 3, Q = (y1, x1, y2, x2, y3) = (0, 1, 2, 3, 4), X = (1, 3), P_X = {a, b}
    base = ReducedGraph.with_sizes(3, 5, 2)
    X = (1, 3)
    a, b = base.classes[X]

    def edges_through(w, Y):
        ell = next(p for p in range(1, 4) if tuple(sorted(set(Y) - {Y[p - 1]})) == X)
        parts = [base.part(Y, p) for p in range(1, 4)]
        parts[ell - 1] = (w,)
        return frozenset(product(*parts))

    # y1 and y3 see a fully, y2 sees b
    cons = {(0, 1, 3): edges_through(a, (0, 1, 3)), (1, 2, 3): edges_through(b, (1, 2, 3)), (1, 3, 4): edges_through(a, (1, 3, 4))}
    A = ReducedGraph(3, 5, base.classes, cons)
    assert algorithm1_color(A, (0, 1, 2, 3, 4), Fraction(1, 2)) == (1, 3)
    cons[(1, 3, 4)] = frozenset()
    A = ReducedGraph(3, 5, base.classes, cons)
    assert algorithm1_color(A, (0, 1, 2, 3, 4), Fraction(1, 2)) is None
    with pytest.raises(ValueError):
        algorithm1_color(A, (0, 1, 2), Fraction(1, 2))


def test_anchor_checks():
    A = ReducedGraph.complete(3, 4, 2)
    alpha = {X: (v[0],) * 3 for X, v in A.classes.items()}
    beta = {X: (v[1],) * 2 for X, v in A.classes.items()}
    anchors = AnchorFamily((1, 2), alpha, beta)
    assert verify_anchors(A, anchors)
    Y = (0, 1, 2)
    first, _ = anchor_edges(3, Y, anchors)
    cons = dict(A.constituents)
    cons[Y] = cons[Y] - {first}
    assert not verify_anchors(ReducedGraph(3, 4, A.classes, cons), anchors)


def test_hand_built_anchor_instance():
    A, anchors = anchor_certified_graph(3, 4, 2, (2, 3), seed=3)
    assert verify_anchors(A, anchors)
    assert all(len(E) <= 2 for E in A.constituents.values())
    assert all(set(anchor_edges(3, Y, anchors)) == E for Y, E in A.constituents.items())


@pytest.mark.parametrize("pair", pairs(3))
def test_anchor_map_for_family(pair):
    F = family_F(3, 1)
    A, anchors = anchor_certified_graph(3, 8, 2, pair, seed=sum(pair))
    rm = build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(3, 1, *pair))
    assert verify_reduced_map(F, A, rm)


@pytest.mark.parametrize("pair", [(1, 2), (2, 4), (3, 4)])
def test_anchor_map_k4(pair):
    F = family_F(4, 2)
    A, anchors = anchor_certified_graph(4, F.n, 1, pair, seed=1)
    rm = build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(4, 2, *pair))
    assert verify_reduced_map(F, A, rm)


@given(hypergraphs(max_n=5, max_edges=4), st.sampled_from(pairs(3)), st.integers(0, 1000))
def test_anchor_map_from_searched_certificate(F, pair, seed):
    cert = find_split_certificate(F, pair)
    if cert is None:
        return
    A, anchors = anchor_certified_graph(3, max(F.n, 3), 2, pair, seed)
    assert verify_reduced_map(F, A, build_reduced_map_from_anchors(F, A, anchors, cert))


def test_anchor_preconditions():
    F = family_F(3, 1)
    A, anchors = anchor_certified_graph(3, 8, 1, (1, 2), seed=0)
    with pytest.raises(PreconditionError):
        build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(3, 1, 1, 3))
    small, small_anchors = anchor_certified_graph(3, 5, 1, (1, 2), seed=0)
    with pytest.raises(PreconditionError):
        build_reduced_map_from_anchors(F, small, small_anchors, paper_split_certificate(3, 1, 1, 2))
    bad = SplitCertificate.make((1, 2), F.edges, [], tuple(range(F.n)))
    with pytest.raises(PreconditionError):
        build_reduced_map_from_anchors(F, A, anchors, bad)


def random_partite(rng, k):
    sizes = [int(rng.integers(1, 7)) for _ in range(k)]
    parts, nxt = [], 0
    for s in sizes:
        parts.append(tuple(range(nxt, nxt + s)))
        nxt += s
    cand = list(product(*parts))
    keep = rng.random(len(cand)) < rng.uniform(0.05, 1)
    return Hypergraph(k, nxt, tuple(c for c, b in zip(cand, keep) if b)), parts


def test_lemma5_complete():
    H = Hypergraph(3, 6, tuple(product((0, 1), (2, 3), (4, 5))))
    assert lemma5_bound_check(H, [(0, 1), (2, 3), (4, 5)], (0,), 1)


def test_lemma5_precondition():
    H = Hypergraph(3, 6, ((0, 2, 4),))
    with pytest.raises(PreconditionError):
        lemma5_bound_check(H, [(0, 1), (2, 3), (4, 5)], (1,), Fraction(1, 2))
    with pytest.raises(PreconditionError):
        lemma5_bound_check(H, [(0, 1), (2, 3), (4, 5)], (2,), Fraction(1, 8))


@given(st.integers(0, 10**6), st.sampled_from([3, 4]))
def test_lemma5_random(seed, k):
    rng = np.random.default_rng(seed)
    H, parts = random_partite(rng, k)
    t = int(rng.integers(1, k))
    T = tuple(int(rng.choice(parts[i])) for i in range(t))
    through = sum(set(T) <= set(e) for e in H.edges)
    rest = int(np.prod([len(p) for p in parts[t:]]))
    if through == 0:
        return
    rho = Fraction(through, rest)
    assert lemma5_bound_check(H, parts, T, rho).holds
