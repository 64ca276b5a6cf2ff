"""Uniform density checks for k-graphs.

``H`` is (d, mu, j)-dense when every j-graph ``G`` on its vertex set
satisfies ``|K_k(G) & E| >= d |K_k(G)| - mu n^k``, where ``K_k(G)`` is the
set of k-sets spanning a complete j-graph in ``G``.  The *margin* of a
witness is the left side minus the right side; ``G`` violates density
exactly when its margin is negative.

Checking every ``G`` is only possible for tiny instances.  The sampled
checkers therefore report ``violated`` with a witness or ``unknown``, never
``holds``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, exp
from typing import Sequence

import numpy as np

from .hypergraph import Hypergraph
from .palette import Palette, build_H, colex_rank, lower_bound, sample_psi, subset_array

__all__ = [
    "DensitySpec",
    "WitnessGraph",
    "DensityResult",
    "count_cliques",
    "clique_closure",
    "margin",
    "check_j_dense",
    "check_kj_dense",
    "edge_density",
    "azuma_bound",
    "concentration_experiment",
    "ConcentrationReport",
]

HOLDS, VIOLATED, UNKNOWN = "holds", "violated", "unknown"


@dataclass(frozen=True)
class DensitySpec:
    d: float
    mu: float
    j: int

    def __post_init__(self):
        if not 0 <= self.d <= 1:
            raise ValueError(f"d must lie in [0, 1], got {self.d}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.j < 0:
            raise ValueError(f"j must be non-negative, got {self.j}")


@dataclass(frozen=True)
class WitnessGraph:
    """A j-graph on ``[0, n)``.

    For ``j = 0`` the only possible edge is the empty set, so there are two
    witnesses: ``sets = frozenset()`` and ``sets = frozenset({()})``.
    """

    j: int
    n: int
    sets: frozenset[tuple[int, ...]] = frozenset()

    def __post_init__(self):
        canon = set()
        for s in self.sets:
            t = tuple(sorted(int(v) for v in s))
            if len(t) != self.j or len(set(t)) != self.j or (t and not 0 <= t[0] <= t[-1] < self.n):
                raise ValueError(f"{tuple(s)} is not a {self.j}-subset of [0, {self.n})")
            canon.add(t)
        object.__setattr__(self, "sets", frozenset(canon))

    @classmethod
    def complete(cls, j: int, n: int) -> "WitnessGraph":
        return cls(j, n, frozenset(combinations(range(n), j)))

    @classmethod
    def from_vertices(cls, n: int, vertices: Sequence[int]) -> "WitnessGraph":
        return cls(1, n, frozenset((v,) for v in vertices))

    def indicator(self) -> np.ndarray:
        """Membership of each j-set, indexed by colex rank."""
        ind = np.zeros(comb(self.n, self.j), dtype=bool)
        if self.sets:
            ind[colex_rank(np.array(sorted(self.sets), dtype=np.int64).reshape(-1, self.j), self.n)] = True
        return ind

    def sorted_sets(self) -> list[tuple[int, ...]]:
        return sorted(self.sets)


@dataclass
class DensityResult:
    status: str
    spec: DensitySpec
    witness: WitnessGraph | None = None
    margin: float | None = None
    tried: int = 0
    mode: str = "exact"
    notes: list[str] = field(default_factory=list)


class _CliqueTable:
    # k-sets of [0, n) (lex order) with the colex ranks of their j-subsets
    def __init__(self, n: int, k: int, j: int):
        self.n, self.k, self.j = n, k, j
        self.ksets = subset_array(n, k)
        cols = list(combinations(range(k), j))
        self.sub_ranks = np.stack(
            [colex_rank(self.ksets[:, list(c)], n) for c in cols], axis=1
        ) if j > 0 else np.zeros((len(self.ksets), 1), dtype=np.int64)

    def member(self, indicator: np.ndarray) -> np.ndarray:
        return indicator[self.sub_ranks].all(axis=1)

    def edge_mask(self, H: Hypergraph) -> np.ndarray:
        mask = np.zeros(len(self.ksets), dtype=bool)
        if H.edges:
            mask[_lex_rank(np.array(H.edges, dtype=np.int64), self.n)] = True
        return mask


def _lex_rank(sets: np.ndarray, n: int) -> np.ndarray:
    # lex rank among k-subsets of [0, n) equals reversed colex rank of the complement labels
    k = sets.shape[1]
    flipped = (n - 1 - sets)[:, ::-1]
    return comb(n, k) - 1 - colex_rank(flipped, n)


def count_cliques(G: WitnessGraph, k: int) -> int:
    """Number of k-sets whose every j-subset is an edge of ``G``."""
    if G.j >= k:
        raise ValueError(f"need j < k, got j={G.j}, k={k}")
    if G.n < k:
        return 0
    if G.j == 0:
        return comb(G.n, k) if G.sets else 0
    if G.j == 1:
        return comb(len(G.sets), k)
    table = _CliqueTable(G.n, k, G.j)
    return int(table.member(G.indicator()).sum())


def clique_closure(G: WitnessGraph, size: int) -> WitnessGraph:
    """The ``size``-graph of all ``size``-sets spanning a clique of ``G``."""
    if size < G.j:
        raise ValueError(f"closure size {size} is below the uniformity {G.j}")
    out = [
        S for S in combinations(range(G.n), size) if all(T in G.sets for T in combinations(S, G.j))
    ]
    return WitnessGraph(size, G.n, frozenset(out))


def margin(H: Hypergraph, G: WitnessGraph, d: float, mu: float) -> float:
    """``|K_k(G) & E| - d |K_k(G)| + mu n^k``; negative means ``G`` is a violation."""
    if G.n != H.n:
        raise ValueError("witness and host must share a vertex set")
    k, n = H.k, H.n
    if G.j == 0:
        inside = H.num_edges if G.sets else 0
        total = comb(n, k) if G.sets else 0
    else:
        table = _CliqueTable(n, k, G.j)
        member = table.member(G.indicator())
        inside = int((member & table.edge_mask(H)).sum())
        total = int(member.sum())
    return inside - d * total + mu * n**k


def edge_density(H: Hypergraph) -> Fraction:
    if H.n < H.k:
        raise ValueError(f"need n >= k, got n={H.n}, k={H.k}")
    return Fraction(H.num_edges, comb(H.n, H.k))


# ---------------------------------------------------------------------------
# (d, mu, j)-denseness


def _exact(H: Hypergraph, spec: DensitySpec, budget: int) -> DensityResult:
    n, k, j = H.n, H.k, spec.j
    slots = comb(n, j)
    if slots > budget:
        return DensityResult(
            UNKNOWN, spec, mode="exact",
            notes=[f"2^{slots} witnesses exceed the 2^{budget} budget"],
        )
    if j == 0:
        best = None
        for sets in (frozenset(), frozenset({()})):
            G = WitnessGraph(0, n, sets)
            m = margin(H, G, spec.d, spec.mu)
            if m < 0:
                return DensityResult(VIOLATED, spec, G, m, tried=1 + bool(sets))
            best = m if best is None else min(best, m)
        return DensityResult(HOLDS, spec, margin=best, tried=2)
    table = _CliqueTable(n, k, j)
    edges = table.edge_mask(H)
    weight = edges.astype(float) - spec.d
    offset = spec.mu * n**k
    jsets = subset_array(n, j)
    order = colex_rank(jsets, n)
    worst = None
    for mask in range(1 << slots):
        ind = np.zeros(slots, dtype=bool)
        bits = np.array([(mask >> b) & 1 for b in range(slots)], dtype=bool)
        ind[order] = bits
        m = float(weight[table.member(ind)].sum()) + offset
        if m < 0:
            G = WitnessGraph(j, n, frozenset(map(tuple, jsets[bits].tolist())))
            return DensityResult(VIOLATED, spec, G, m, tried=mask + 1)
        worst = m if worst is None else min(worst, m)
    return DensityResult(HOLDS, spec, margin=worst, tried=1 << slots)


def _greedy(table: _CliqueTable, weight: np.ndarray, ind: np.ndarray, offset: float, max_steps: int):
    # Flip the j-set whose toggle lowers the margin most, until none does.
    slots = len(ind)
    for _ in range(max_steps):
        present = ind[table.sub_ranks]
        missing = (~present).sum(axis=1)
        full = missing == 0
        m = float(weight[full].sum()) + offset
        if m < 0:
            return ind, m
        # removing a present j-set destroys every clique built on it
        loss = np.bincount(table.sub_ranks[full].ravel(), np.repeat(weight[full], table.sub_ranks.shape[1]), slots)
        # adding an absent j-set completes every k-set missing only it
        near = missing == 1
        col = np.argmin(present[near], axis=1)
        gain = np.bincount(table.sub_ranks[near][np.arange(near.sum()), col], weight[near], slots)
        delta = np.where(ind, -loss, gain)
        best = int(np.argmin(delta))
        if delta[best] >= -1e-12:
            return ind, m
        ind = ind.copy()
        ind[best] = ~ind[best]
    present = ind[table.sub_ranks].all(axis=1)
    return ind, float(weight[present].sum()) + offset


def check_j_dense(
    H: Hypergraph,
    spec: DensitySpec,
    mode: str = "sampled",
    budget: int = 20,
    seed: int = 0,
    samples: int = 200,
    restarts: int = 3,
) -> DensityResult:
    """Test the (d, mu, j)-density inequality on ``H``.

    Parameters
    ----------
    H : Hypergraph
    spec : DensitySpec
    mode : {"exact", "sampled"}
        ``exact`` enumerates all ``2^C(n, j)`` j-graphs, provided
        ``C(n, j) <= budget``.  ``sampled`` draws ``samples`` witnesses,
        each refined by greedy descent from ``restarts`` random starts.
    budget : int
        Base-2 logarithm of the number of witnesses exact mode may try.
    seed : int
        Seed for the sampled adversary.

    Returns
    -------
    DensityResult
        ``holds`` only from exact enumeration; sampled mode gives
        ``violated`` with a witness or ``unknown``.
    """
    n, k, j = H.n, H.k, spec.j
    if j >= k:
        raise ValueError(f"need j < k, got j={j}, k={k}")
    notes = []
    if j == k - 1:
        notes.append("j = k-1 lies outside the usual regime j <= k-2")
    if mode == "exact":
        res = _exact(H, spec, budget)
        res.notes = notes + res.notes
        return res
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if j == 0:
        res = _exact(H, spec, budget)
        res.notes = notes + ["j = 0 has only two witnesses; checked exactly"] + res.notes
        return res
    rng = np.random.default_rng(seed)
    table = _CliqueTable(n, k, j)
    weight = table.edge_mask(H).astype(float) - spec.d
    offset = spec.mu * n**k
    slots = comb(n, j)
    jsets_colex = subset_array(n, j)
    jsets_colex = jsets_colex[np.argsort(colex_rank(jsets_colex, n))]
    tried = 0
    worst = None
    for s in range(samples):
        for _ in range(restarts):
            tried += 1
            ind = rng.random(slots) < rng.random()
            ind, m = _greedy(table, weight, ind, offset, max_steps=4 * slots)
            if m < 0:
                G = WitnessGraph(j, n, frozenset(map(tuple, jsets_colex[ind].tolist())))
                return DensityResult(VIOLATED, spec, G, m, tried, "sampled", notes)
            worst = m if worst is None else min(worst, m)
    notes.append(f"no violation among {tried} refined witnesses")
    return DensityResult(UNKNOWN, spec, None, worst, tried, "sampled", notes)


# ---------------------------------------------------------------------------
# (d, mu, [k]^j)-denseness


def _edge_tensor(H: Hypergraph) -> np.ndarray:
    from itertools import permutations

    E = np.zeros((H.n,) * H.k, dtype=bool)
    for e in H.edges:
        for p in permutations(e):
            E[p] = True
    return E


def _family_tensor(family: dict, n: int, k: int) -> np.ndarray:
    K = np.ones((n,) * k, dtype=bool)
    for J, GJ in family.items():
        shape = [1] * k
        for pos in J:
            shape[pos] = n
        K &= np.asarray(GJ, dtype=bool).reshape(shape)
    return K


def kj_margin(H: Hypergraph, family: dict, d: float, mu: float) -> float:
    """Margin for a family ``{J: G_J}``; ``G_J`` is a boolean array over ``V^J``.

    ``J`` is a sorted tuple of 0-based positions and the axes of ``G_J``
    follow ``J``.  For ``j = 0`` each ``G_J`` is a 0-d boolean.
    """
    K = _family_tensor(family, H.n, H.k)
    inside = int((K & _edge_tensor(H)).sum())
    return inside - d * int(K.sum()) + mu * H.n**H.k


def check_kj_dense(H: Hypergraph, spec: DensitySpec, samples: int = 100, seed: int = 0) -> DensityResult:
    """Sampled search for a family ``{G_J : J in [k]^j}`` violating density.

    The first family is the full one; after that, half are independent
    random sets of tuples and half products of random vertex subsets, a
    shape that tracks vertex partitions.  Results are ``violated`` or
    ``unknown``.
    """
    n, k, j = H.n, H.k, spec.j
    if not 1 <= j <= k - 1:
        raise ValueError(f"need 1 <= j <= k-1, got j={j}, k={k}")
    rng = np.random.default_rng(seed)
    E = _edge_tensor(H)
    offset = spec.mu * n**k
    Js = list(combinations(range(k), j))
    worst = None
    for s in range(samples):
        family = {}
        for J in Js:
            if s == 0:
                family[J] = np.ones((n,) * j, dtype=bool)
            elif s % 2 == 0:
                family[J] = rng.random((n,) * j) < rng.random()
            else:
                parts = [rng.random(n) < rng.random() for _ in J]
                grid = np.ones((n,) * j, dtype=bool)
                for axis, part in enumerate(parts):
                    shape = [1] * j
                    shape[axis] = n
                    grid = grid & part.reshape(shape)
                family[J] = grid
        K = _family_tensor(family, n, k)
        m = int((K & E).sum()) - spec.d * int(K.sum()) + offset
        if m < 0:
            res = DensityResult(VIOLATED, spec, None, m, s + 1, "sampled")
            res.notes.append("witness family: " + repr({J: np.argwhere(G).tolist() for J, G in family.items()}))
            res.family = family
            return res
        worst = m if worst is None else min(worst, m)
    return DensityResult(UNKNOWN, spec, None, worst, samples, "sampled", [f"no violation among {samples} families"])


# ---------------------------------------------------------------------------
# concentration


def azuma_bound(n: int, k: int, mu: float) -> tuple[float, float]:
    """``exp(-mu^2 n^(2k) / (2 C(n, k-1) n^2))`` and its natural log."""
    exponent = -(mu**2) * n ** (2 * k) / (2 * comb(n, k - 1) * n**2)
    return exp(exponent), exponent


@dataclass
class ConcentrationReport:
    k: int
    n: int
    mu: float
    trials: int
    witnesses_per_trial: int
    violations: int
    min_margin: float
    azuma: float
    log_azuma: float
    seed: int

    @property
    def violation_rate(self) -> float:
        total = self.trials * self.witnesses_per_trial
        return self.violations / total if total else 0.0


def concentration_experiment(
    k: int, n: int, P: Palette, trials: int, witnesses_per_trial: int, mu: float, seed: int
) -> ConcentrationReport:
    """Count random (k-2)-graph witnesses that break the density inequality.

    Each trial builds a palette graph from a fresh coloring seeded with
    ``[seed, trial]``; witnesses are random (k-2)-graphs whose edge
    probability is itself uniform on ``[0, 1]``.
    """
    if P.k != k:
        raise ValueError(f"palette has k={P.k}, expected {k}")
    j = k - 2
    d = float(lower_bound(P))
    table = _CliqueTable(n, k, j)
    offset = mu * n**k
    slots = comb(n, j)
    violations = 0
    worst = float("inf")
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        psi = sample_psi(n, P.r, k, int(rng.integers(2**62)))
        weight = table.edge_mask(build_H(n, psi, P)).astype(float) - d
        for _ in range(witnesses_per_trial):
            ind = rng.random(slots) < rng.random()
            m = float(weight[table.member(ind)].sum()) + offset
            worst = min(worst, m)
            violations += m < 0
    bound, log_bound = azuma_bound(n, k, mu)
    return ConcentrationReport(k, n, mu, trials, witnesses_per_trial, int(violations), worst, bound, log_bound, seed)
