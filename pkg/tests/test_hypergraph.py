from itertools import combinations, permutations

import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs
from unituran.palette import build_H, sample_psi, vanishing_palette
from unituran.hypergraph import (
    BudgetExceeded,
    Hypergraph,
    complete_graph,
    family_F,
    family_labels,
    find_embedding,
    is_embedding,
    is_f_free,
    shadow,
    tight_cycle,
    tight_path,
)


def brute_embeds(F, H):
    for img in permutations(range(H.n), F.n):
        host = H.edge_set()
        if all(tuple(sorted(img[v] for v in e)) in host for e in F.edges):
            return True
    return False


def test_canonical_edges():
    H = Hypergraph(3, 4, ((2, 1, 0), (0, 1, 2), (3, 1, 2)))
    assert H.edges == ((0, 1, 2), (1, 2, 3))


@pytest.mark.parametrize("bad", [((0, 0, 1),), ((0, 1),), ((0, 1, 4),), ((-1, 0, 1),)])
def test_rejects_bad_edges(bad):
    with pytest.raises(ValueError):
        Hypergraph(3, 4, bad)


def test_shadow_single_edge():
    assert shadow(Hypergraph(3, 3, ((0, 1, 2),))) == {(0, 1), (0, 2), (1, 2)}


def test_tight_path_and_cycle():
    assert tight_path(3, 5).edges == ((0, 1, 2), (1, 2, 3), (2, 3, 4))
    assert len(tight_cycle(3, 5).edges) == 5
    with pytest.raises(ValueError):
        tight_path(3, 2)
    with pytest.raises(ValueError):
        tight_cycle(3, 3)


@pytest.mark.parametrize("k,t", [(3, 1), (3, 2), (4, 2), (4, 3), (5, 3)])
def test_family_size(k, t):
    F = family_F(k, t)
    assert F.n == 3 * t + k + 2
    assert F.num_edges == 3 * (t + 2)


def test_family_paths_are_tight():
    k, t = 3, 1
    F = family_F(k, t)
    lab = family_labels(k, t)
    seq = [lab[x] for x in ("a1", "a2", "b0", "b1", "c1")]
    for i in range(len(seq) - k + 1):
        assert tuple(sorted(seq[i : i + k])) in F.edge_set()


def test_family_rejects_small_t():
    with pytest.raises(ValueError):
        family_F(4, 1)
    with pytest.raises(ValueError):
        family_F(2, 3)


def test_path_in_complete_graph():
    m = find_embedding(tight_path(3, 4), complete_graph(3, 5))
    assert is_embedding(tight_path(3, 4), complete_graph(3, 5), m)


def test_single_edge_embeds_iff_nonempty():
    edge = Hypergraph(3, 3, ((0, 1, 2),))
    assert is_f_free(Hypergraph(3, 6), edge)
    assert not is_f_free(Hypergraph(3, 6, ((1, 3, 5),)), edge)


def test_budget():
    # a vanishing host cannot contain the five-cycle, but ruling it out takes search
    host = build_H(30, sample_psi(30, 3, 3, 0), vanishing_palette(3))
    assert find_embedding(tight_cycle(3, 5), host) is None
    with pytest.raises(BudgetExceeded):
        find_embedding(tight_cycle(3, 5), host, budget=10)


@given(hypergraphs(max_n=4, max_edges=3), hypergraphs(max_n=6))
def test_embedding_matches_brute_force(F, H):
    m = find_embedding(F, H)
    assert (m is not None) == brute_embeds(F, H)
    if m is not None:
        assert is_embedding(F, H, m)


@given(hypergraphs(max_n=6), st.randoms(use_true_random=False))
def test_relabel_preserves_shadow_size(H, rnd):
    perm = list(range(H.n))
    rnd.shuffle(perm)
    assert len(shadow(H.relabel(perm))) == len(shadow(H))
    assert find_embedding(H, H.relabel(perm)) is not None
