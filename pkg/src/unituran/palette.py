"""Palette constructions of F-free hypergraphs.

A palette is a set of k-tuples of colors from ``1..r``.  Given a coloring
``psi`` of all (k-1)-subsets of ``[0, n)``, the k-set ``{x_1 < ... < x_k}``
becomes an edge when its signature
``(psi(e - x_1), psi(e - x_2), ..., psi(e - x_k))`` lies in the palette.
Each k-set is then an edge with probability ``|P| / r^k`` under a uniform
random coloring.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .hypergraph import Hypergraph, find_embedding

__all__ = [
    "Palette",
    "ColoringFunction",
    "lower_bound",
    "sample_psi",
    "build_H",
    "vanishing_palette",
    "conj_palette",
    "verify_palette_avoids",
    "TrialResult",
    "AvoidanceReport",
    "subset_array",
    "colex_rank",
]

# largest table materialised by sample_psi; beyond it psi is a keyed hash
MAX_TABLE = 10**7


@dataclass(frozen=True)
class Palette:
    k: int
    r: int
    tuples: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"need at least one color, got r={self.r}")
        canon = set()
        for tup in self.tuples:
            tup = tuple(int(c) for c in tup)
            if len(tup) != self.k or not all(1 <= c <= self.r for c in tup):
                raise ValueError(f"{tup} is not a {self.k}-tuple over 1..{self.r}")
            canon.add(tup)
        object.__setattr__(self, "tuples", frozenset(canon))

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)


def lower_bound(P: Palette) -> Fraction:
    return Fraction(len(P.tuples), P.r**P.k)


def vanishing_palette(k: int) -> Palette:
    """The single signature ``(1, 2, ..., k)`` with ``r = k``."""
    if k < 3:
        raise ValueError(f"need k >= 3, got {k}")
    return Palette(k, k, frozenset({tuple(range(1, k + 1))}))


def conj_palette(k: int, i: int, j: int) -> Palette:
    """``(1..k)`` plus the two copies with position ``i`` resp. ``j`` set to ``k+1``."""
    if k < 3:
        raise ValueError(f"need k >= 3, got {k}")
    if not 1 <= i < j <= k:
        raise ValueError(f"pair ({i}, {j}) is not 1 <= i < j <= {k}")
    base = list(range(1, k + 1))
    with_i = base.copy()
    with_i[i - 1] = k + 1
    with_j = base.copy()
    with_j[j - 1] = k + 1
    return Palette(k, k + 1, frozenset({tuple(base), tuple(with_i), tuple(with_j)}))


# ---------------------------------------------------------------------------
# colorings of (k-1)-sets


def _binom_table(n: int, k: int) -> np.ndarray:
    table = np.zeros((n + 1, k + 2), dtype=np.int64)
    for a in range(n + 1):
        for b in range(k + 2):
            table[a, b] = comb(a, b)
    return table


def colex_rank(sets: np.ndarray, n: int) -> np.ndarray:
    """Colexicographic rank of each row (a strictly increasing tuple)."""
    sets = np.asarray(sets, dtype=np.int64)
    if sets.ndim != 2:
        raise ValueError("expected a 2-d array of sorted tuples")
    width = sets.shape[1]
    if width == 0:
        return np.zeros(len(sets), dtype=np.int64)
    table = _binom_table(n, width)
    return sum(table[sets[:, p], p + 1] for p in range(width))


def subset_array(n: int, size: int) -> np.ndarray:
    """All ``size``-subsets of ``[0, n)`` as rows, in lexicographic order."""
    from itertools import combinations

    count = comb(n, size)
    out = np.fromiter(
        (v for c in combinations(range(n), size) for v in c), dtype=np.int64, count=count * size
    )
    return out.reshape(count, size)


@dataclass(frozen=True)
class ColoringFunction:
    """A coloring of every (k-1)-subset of ``[0, n)`` with colors ``1..r``.

    ``table[colex_rank(S)]`` holds the color of ``S`` when materialised;
    otherwise colors come from a keyed BLAKE2 hash of ``(seed, S)``.
    """

    n: int
    r: int
    k: int
    seed: int | None = None
    table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.table is not None:
            t = np.asarray(self.table, dtype=np.int64)
            if t.shape != (comb(self.n, self.k - 1),):
                raise ValueError("coloring table must have one entry per (k-1)-set")
            if len(t) and (t.min() < 1 or t.max() > self.r):
                raise ValueError(f"colors must lie in 1..{self.r}")
            object.__setattr__(self, "table", t)
        elif self.seed is None:
            raise ValueError("a coloring needs either a table or a seed")

    @classmethod
    def from_mapping(cls, n: int, r: int, k: int, colors: dict) -> "ColoringFunction":
        sets = subset_array(n, k - 1)
        ranks = colex_rank(sets, n)
        table = np.zeros(len(sets), dtype=np.int64)
        for row, rank in zip(sets, ranks):
            table[rank] = colors[tuple(int(v) for v in row)]
        return cls(n, r, k, table=table)

    @classmethod
    def constant(cls, n: int, r: int, k: int, color: int = 1) -> "ColoringFunction":
        return cls(n, r, k, table=np.full(comb(n, k - 1), color, dtype=np.int64))

    def _hash_color(self, S: Sequence[int]) -> int:
        key = self.seed.to_bytes(16, "little", signed=True)
        digest = hashlib.blake2b(
            ",".join(str(int(v)) for v in S).encode(), digest_size=8, key=key
        ).digest()
        return 1 + int.from_bytes(digest, "little") % self.r

    def colors(self, sets: np.ndarray) -> np.ndarray:
        """Colors of the rows of ``sets`` (each a sorted (k-1)-tuple)."""
        sets = np.asarray(sets, dtype=np.int64)
        if self.table is not None:
            return self.table[colex_rank(sets, self.n)]
        return np.array([self._hash_color(row) for row in sets], dtype=np.int64)

    def __call__(self, S: Sequence[int]) -> int:
        S = sorted(int(v) for v in S)
        if len(S) != self.k - 1 or len(set(S)) != len(S) or (S and not 0 <= S[0] <= S[-1] < self.n):
            raise ValueError(f"{S} is not a (k-1)-subset of [0, {self.n})")
        return int(self.colors(np.array([S], dtype=np.int64).reshape(1, self.k - 1))[0])

    def as_dict(self) -> dict[tuple[int, ...], int]:
        sets = subset_array(self.n, self.k - 1)
        return {tuple(int(v) for v in row): int(c) for row, c in zip(sets, self.colors(sets))}


def sample_psi(n: int, r: int, k: int, seed: int) -> ColoringFunction:
    """Independent uniform colors for all (k-1)-sets, fixed by ``seed``."""
    if n < k - 1 or r < 1:
        raise ValueError(f"need n >= k-1 and r >= 1, got n={n}, r={r}, k={k}")
    size = comb(n, k - 1)
    if size > MAX_TABLE:
        return ColoringFunction(n, r, k, seed=seed)
    rng = np.random.default_rng(seed)
    return ColoringFunction(n, r, k, seed=seed, table=rng.integers(1, r + 1, size=size))


def signatures(n: int, psi: ColoringFunction) -> tuple[np.ndarray, np.ndarray]:
    """All k-sets of ``[0, n)`` and their color signatures."""
    k = psi.k
    ksets = subset_array(n, k)
    sig = np.empty_like(ksets)
    for ell in range(k):
        window = np.delete(ksets, ell, axis=1)
        sig[:, ell] = psi.colors(window)
    return ksets, sig


def build_H(n: int, psi: ColoringFunction, P: Palette) -> Hypergraph:
    """The k-graph on ``[0, n)`` whose edges have signature in ``P``."""
    if psi.n != n:
        raise ValueError(f"coloring is defined on [0, {psi.n}), not [0, {n})")
    if psi.r != P.r or psi.k != P.k:
        raise ValueError(f"coloring (r={psi.r}, k={psi.k}) does not match palette (r={P.r}, k={P.k})")
    k = P.k
    if n < k:
        return Hypergraph(k, n)
    ksets, sig = signatures(n, psi)
    if not P.tuples:
        return Hypergraph(k, n)
    pal = np.array(sorted(P.tuples), dtype=np.int64)
    keep = (sig[:, None, :] == pal[None, :, :]).all(axis=2).any(axis=1)
    return Hypergraph(k, n, tuple(map(tuple, ksets[keep].tolist())))


# ---------------------------------------------------------------------------
# avoidance experiments


@dataclass
class TrialResult:
    trial: int
    seed: list[int]
    edges: int
    density: float
    f_free: bool
    embedding: dict[int, int] | None = None
    psi: dict | None = None


@dataclass
class AvoidanceReport:
    n: int
    trials: list[TrialResult]
    expected_density: Fraction

    @property
    def all_free(self) -> bool:
        return all(t.f_free for t in self.trials)

    @property
    def densities(self) -> np.ndarray:
        return np.array([t.density for t in self.trials])

    @property
    def counterexamples(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.f_free]


def trial_seed(seed: int, trial: int) -> list[int]:
    return [int(seed), int(trial)]


def _one_trial(args) -> TrialResult:
    P, F, n, seed, trial = args
    s = trial_seed(seed, trial)
    rng = np.random.default_rng(s)
    size = comb(n, P.k - 1)
    psi = ColoringFunction(n, P.r, P.k, seed=int(rng.integers(2**62)), table=rng.integers(1, P.r + 1, size=size))
    H = build_H(n, psi, P)
    emb = find_embedding(F, H)
    result = TrialResult(trial, s, H.num_edges, H.num_edges / comb(n, P.k), emb is None)
    if emb is not None:
        result.embedding = emb
        result.psi = {",".join(map(str, S)): c for S, c in psi.as_dict().items()}
    return result


def verify_palette_avoids(
    P: Palette, F: Hypergraph, n: int, trials: int, seed: int, workers: int = 1
) -> AvoidanceReport:
    """Build ``trials`` random palette graphs and test each for a copy of ``F``.

    Trial ``t`` draws its coloring from the generator seeded with
    ``[seed, t]``, so results do not depend on ``workers``.  Failures carry
    the full coloring and the embedding that was found.
    """
    if F.k != P.k:
        raise ValueError(f"uniformity mismatch: F has k={F.k}, palette has k={P.k}")
    jobs = [(P, F, n, seed, t) for t in range(trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_trial, jobs))
    else:
        results = [_one_trial(j) for j in jobs]
    return AvoidanceReport(n, results, lower_bound(P))


def trial_graph(P: Palette, n: int, seed: int, trial: int) -> Hypergraph:
    """Rebuild the host graph of one trial of :func:`verify_palette_avoids`."""
    rng = np.random.default_rng(trial_seed(seed, trial))
    size = comb(n, P.k - 1)
    psi = ColoringFunction(n, P.r, P.k, seed=int(rng.integers(2**62)), table=rng.integers(1, P.r + 1, size=size))
    return build_H(n, psi, P)
