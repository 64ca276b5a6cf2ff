"""Acceptance criteria 1-9, each with its own independent oracle.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import json
import time
from fractions import Fraction
from itertools import combinations, permutations, product
from math import sqrt

import numpy as np
import pytest

from unituran.cli import main
from unituran.conditions import check_club, find_split_certificate, pairs, paper_split_certificate, verify_split
from unituran.density import concentration_experiment
from unituran.hypergraph import Hypergraph, family_F, is_f_free, shadow
from unituran.io import certificate_from_dict
from unituran.palette import conj_palette, trial_graph, vanishing_palette, verify_palette_avoids
from unituran.reduced import (
    PreconditionError,
    ReducedGraph,
    anchor_certified_graph,
    build_reduced_map_from_anchors,
    find_reduced_map,
    lemma5_bound_check,
    verify_reduced_map,
)
from unituran.vanishing import (
    build_type_digraph,
    digraph_to_ordering,
    find_vanishing_ordering,
    is_vanishing,
    transitive_digraph,
)


@pytest.fixture
def criterion(record_property):
    """``criterion(n, detail)`` tags the running test for the summary hook."""

    def tag(num, detail=""):
        record_property("criterion", num)
        record_property("detail", detail)

    return tag


# -- independent oracles -----------------------------------------------------


def brute_vanishing(F, tau):
    pos = {v: p for p, v in enumerate(tau)}
    label = {}
    for e in F.edges:
        ordered = sorted(e, key=pos.__getitem__)
        for ell, v in enumerate(ordered, start=1):
            S = frozenset(ordered) - {v}
            if label.setdefault(S, ell) != ell:
                return False
    return True


def brute_has_vanishing(F):
    return any(brute_vanishing(F, tau) for tau in permutations(range(F.n)))


def has_cycle(n, arcs):
    out = [[] for _ in range(n)]
    for a, b in arcs:
        out[a].append(b)
    color = [0] * n

    def visit(v):
        color[v] = 1
        for w in out[v]:
            if color[w] == 1 or (color[w] == 0 and visit(w)):
                return True
        color[v] = 2
        return False

    return any(color[v] == 0 and visit(v) for v in range(n))


def brute_map_exists(F, A):
    sh = sorted(shadow(F))
    for phi_vals in product(range(A.m), repeat=F.n):
        if any(len({phi_vals[v] for v in e}) < F.k for e in F.edges):
            continue
        domains = [A.classes[tuple(sorted(phi_vals[u] for u in S))] for S in sh]
        for choice in product(*domains):
            psi = dict(zip(sh, choice))
            ok = True
            for e in F.edges:
                image = {psi[tuple(u for u in e if u != v)] for v in e}
                Y = tuple(sorted(phi_vals[v] for v in e))
                if not any(set(c) == image for c in A.constituents[Y]):
                    ok = False
                    break
            if ok:
                return True
    return False


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


# -- criteria ----------------------------------------------------------------


def test_criterion_1_club_k3(criterion, capsys):
    start = time.perf_counter()
    F = family_F(3, 1)
    assert (F.n, F.num_edges) == (8, 9)
    searched = check_club(F, prune=True)
    unpruned = check_club(F)
    brute = not brute_has_vanishing(F)
    code, out = run_cli(capsys, "club", "--family", "3,1")
    elapsed = time.perf_counter() - start
    criterion(1, f"search={searched} brute(8!)={brute} cli_exit={code} {elapsed:.1f}s (<10s)")
    assert searched and unpruned and brute
    assert code == 0 and "true" in out
    assert elapsed < 10


def test_criterion_2_spade_k3(criterion, capsys, tmp_path):
    start = time.perf_counter()
    F = family_F(3, 1)
    code, _ = run_cli(capsys, "spade", "--family", "3,1", "--out", tmp_path)
    found = []
    for i, j in pairs(3):
        data = json.loads((tmp_path / f"split_{i}_{j}.json").read_text())
        found.append(verify_split(F, certificate_from_dict(data)))
    paper = [verify_split(F, paper_split_certificate(3, 1, i, j)) for i, j in pairs(3)]
    elapsed = time.perf_counter() - start
    criterion(2, f"searched {sum(found)}/3 verified, constructed {sum(paper)}/3 verified, {elapsed:.1f}s (<60s)")
    assert code == 0
    assert all(found) and len(found) == 3
    assert all(paper)
    assert elapsed < 60


def test_criterion_3_verdict(criterion, capsys, tmp_path):
    got = {}
    for fam, want in (("3,1", Fraction(1, 27)), ("4,2", Fraction(1, 256))):
        out_dir = tmp_path / fam.replace(",", "_")
        code, out = run_cli(capsys, "verdict", "--family", fam, "--out", out_dir)
        printed = next(line for line in out.splitlines() if line.startswith("claimed density:"))
        stored = json.loads((out_dir / "verdict.json").read_text())["claimed_density"]
        got[fam] = (code, Fraction(printed.split(":")[1].strip()), Fraction(stored), want)
    criterion(3, ", ".join(f"F({f}) -> {v[1]} (want {v[3]})" for f, v in got.items()))
    for code, printed, stored, want in got.values():
        assert code == 0
        assert printed == want and stored == want


def test_criterion_4_k4(criterion):
    start = time.perf_counter()
    F = family_F(4, 2)
    paper = [verify_split(F, paper_split_certificate(4, 2, i, j)) for i, j in pairs(4)]
    club = check_club(F, prune=True, budget=10**9)
    elapsed = time.perf_counter() - start
    criterion(4, f"constructed certificates {sum(paper)}/6, club={club} (budget 1e9), {elapsed:.1f}s (<600s)")
    assert len(paper) == 6 and all(paper)
    assert club is True
    assert elapsed < 600


def test_criterion_5_oracle_equivalence(criterion):
    start = time.perf_counter()
    triples = list(combinations(range(5), 3))
    disagree = 0
    for mask in range(1 << len(triples)):
        F = Hypergraph(3, 5, tuple(t for b, t in enumerate(triples) if mask >> b & 1))
        want = brute_has_vanishing(F)
        disagree += (find_vanishing_ordering(F) is not None) != want
        disagree += (find_vanishing_ordering(F, prune=True) is not None) != want
    elapsed = time.perf_counter() - start
    criterion(5, f"1024 graphs, {disagree} disagreements, {elapsed:.1f}s (<60s)")
    assert disagree == 0
    assert elapsed < 60


def test_criterion_6_digraph_round_trip(criterion):
    rng = np.random.default_rng(6)
    done = success = 0
    while done < 200:
        n = int(rng.integers(3, 7))
        pool = list(combinations(range(n), 3))
        F = Hypergraph(3, n, tuple(t for t in pool if rng.random() < rng.uniform(0.1, 0.7)))
        tau = find_vanishing_ordering(F)
        if tau is None:
            continue
        done += 1
        D = build_type_digraph(F, tau)
        T = transitive_digraph(D, 0)
        back = digraph_to_ordering(F, D, 0)
        success += (not has_cycle(n, T.arcs)) and back is not None and brute_vanishing(F, back)
    criterion(6, f"{success}/200 round trips")
    assert success == 200


def test_criterion_7_palettes(criterion):
    F = family_F(3, 1)
    n, trials = 40, 20

    van = verify_palette_avoids(vanishing_palette(3), F, n, trials, seed=0)
    hosts = [trial_graph(vanishing_palette(3), n, 0, t) for t in range(trials)]
    identity_ok = all(is_vanishing(H, tuple(range(n))) for H in hosts)
    dens = van.densities
    se = dens.std(ddof=1) / sqrt(trials)
    van_z = abs(dens.mean() - 1 / 27) / se

    cp = conj_palette(3, 1, 2)
    conj = verify_palette_avoids(cp, F, n, trials, seed=0)
    cd = conj.densities
    cse = cd.std(ddof=1) / sqrt(trials)
    conj_z = abs(cd.mean() - 3 / 64) / cse

    rng = np.random.default_rng(7)
    star_ok = 0
    for s in range(50):
        H = trial_graph(cp, n, 1, s % trials)
        size = int(rng.integers(3, 9))
        sub = H.induced(sorted(rng.choice(n, size=size, replace=False).tolist()))
        star_ok += find_split_certificate(sub, (1, 2), star=True) is not None

    criterion(
        7,
        f"identity vanishing={identity_ok}, F-free {sum(t.f_free for t in van.trials)}/{trials}, "
        f"mean {dens.mean():.5f} ({van_z:.2f} SE from 1/27); conj mean {cd.mean():.5f} "
        f"({conj_z:.2f} SE from 3/64), star* {star_ok}/50",
    )
    assert identity_ok
    assert van.all_free
    assert van_z <= 3
    assert conj_z <= 3
    assert star_ok == 50


def test_criterion_8_concentration(criterion):
    start = time.perf_counter()
    rep = concentration_experiment(3, 30, vanishing_palette(3), 100, 50, 0.02, seed=0)
    elapsed = time.perf_counter() - start
    criterion(
        8,
        f"{rep.violations}/{rep.trials * rep.witnesses_per_trial} violations, "
        f"min margin {rep.min_margin:.1f}, {elapsed:.1f}s (<300s)",
    )
    assert rep.violations == 0
    assert elapsed < 300


def test_criterion_9_reduced(criterion):
    rng = np.random.default_rng(9)
    agree = 0
    for inst in range(200):
        m = int(rng.integers(3, 5))
        A = ReducedGraph.random(3, m, 2, float(rng.uniform(0.2, 0.9)), seed=inst)
        n = int(rng.integers(3, 6))
        pool = list(combinations(range(n), 3))
        F = Hypergraph(3, n, tuple(t for t in pool if rng.random() < 0.35))
        rm = find_reduced_map(F, A)
        found = rm is not None and verify_reduced_map(F, A, rm)
        agree += found == brute_map_exists(F, A)

    F = family_F(3, 1)
    A, anchors = anchor_certified_graph(3, 8, 2, (1, 2), seed=0)
    rm = build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(3, 1, 1, 2))
    anchor_ok = verify_reduced_map(F, A, rm)

    failures = checked = 0
    seed = 0
    while checked < 1000:
        local = np.random.default_rng([9, seed])
        seed += 1
        k = int(local.choice([3, 4]))
        sizes = [int(local.integers(1, 6)) for _ in range(k)]
        parts, nxt = [], 0
        for s in sizes:
            parts.append(tuple(range(nxt, nxt + s)))
            nxt += s
        cand = list(product(*parts))
        keep = local.random(len(cand)) < local.uniform(0.05, 1)
        H = Hypergraph(k, nxt, tuple(c for c, b in zip(cand, keep) if b))
        t = int(local.integers(1, k))
        T = tuple(int(local.choice(parts[i])) for i in range(t))
        through = sum(set(T) <= set(e) for e in H.edges)
        if through == 0:
            continue
        rho = Fraction(through, int(np.prod(sizes[t:])))
        try:
            failures += not lemma5_bound_check(H, parts, T, rho).holds
        except PreconditionError:
            continue
        checked += 1

    criterion(9, f"map search agrees {agree}/200, anchor map valid={anchor_ok}, counting failures {failures}/1000")
    assert agree == 200
    assert anchor_ok
    assert failures == 0
