"""Reduced k-graphs, reduced maps and anchor families.

An m-reduced k-graph has a vertex class ``P_X`` for each (k-1)-subset ``X``
of the index set ``0..m-1`` and, for each k-subset ``Y``, a k-partite
constituent ``A_Y`` whose parts are the classes ``P_{Y - y}``.

Constituent edges are stored *positionally*: with ``Y = (y_1 < ... < y_k)``
the ``l``-th entry of an edge lies in ``P_{Y - y_l}``.  Index conventions
are 1-based for positions and types, 0-based for vertices and indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from .conditions import SplitCertificate, verify_split
from .hypergraph import BudgetExceeded, Edge, Hypergraph, _search_order, shadow
from .vanishing import type_assignment

__all__ = [
    "ReducedGraph",
    "ReducedMap",
    "AnchorFamily",
    "PreconditionError",
    "is_d_dense",
    "verify_reduced_map",
    "find_reduced_map",
    "normalized_degree",
    "s_rho",
    "algorithm1_color",
    "verify_anchors",
    "anchor_edges",
    "anchor_certified_graph",
    "build_reduced_map_from_anchors",
    "lemma5_bound_check",
]

Index = tuple[int, ...]


class PreconditionError(ValueError):
    """Inputs do not meet the hypotheses of the requested check."""


def drop(Y: Sequence[int], ell: int) -> Index:
    """``Y`` without its ``ell``-th smallest element (``ell`` is 1-based)."""
    Y = tuple(sorted(Y))
    return Y[: ell - 1] + Y[ell:]


@dataclass(frozen=True)
class ReducedGraph:
    """An m-reduced k-graph with explicit finite classes.

    ``classes`` must cover every (k-1)-subset of ``range(m)``; missing
    constituents are empty.  Edges may be given in any vertex order and are
    stored positionally.
    """

    k: int
    m: int
    classes: Mapping[Index, tuple[int, ...]]
    constituents: Mapping[Index, frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        k, m = self.k, self.m
        if k < 2 or m < k:
            raise ValueError(f"need m >= k >= 2, got k={k}, m={m}")
        classes = {}
        owner = {}
        for X in combinations(range(m), k - 1):
            if X not in self.classes:
                raise ValueError(f"no class for index set {X}")
            members = tuple(int(v) for v in self.classes[X])
            if not members:
                raise ValueError(f"class {X} is empty")
            for v in members:
                if v in owner:
                    raise ValueError(f"vertex {v} lies in classes {owner[v]} and {X}")
                owner[v] = X
            classes[X] = members
        extra = set(self.classes) - set(classes)
        if extra:
            raise ValueError(f"classes keyed by non-index sets: {sorted(extra)}")
        cons = {}
        for Y in combinations(range(m), k):
            cons[Y] = frozenset()
        for Y, edges in self.constituents.items():
            Y = tuple(sorted(Y))
            if Y not in cons:
                raise ValueError(f"constituent key {Y} is not a {k}-subset of the index set")
            canon = set()
            for e in edges:
                canon.add(self._positional(Y, e, owner))
            cons[Y] = frozenset(canon)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "constituents", cons)
        object.__setattr__(self, "_owner", owner)

    def _positional(self, Y: Index, e: Iterable[int], owner) -> tuple[int, ...]:
        slots: list[int | None] = [None] * self.k
        e = [int(v) for v in e]
        if len(e) != self.k:
            raise ValueError(f"constituent edge {e} of {Y} does not have {self.k} vertices")
        for v in e:
            X = owner.get(v)
            if X is None or not set(X) <= set(Y):
                raise ValueError(f"vertex {v} of edge {e} is not in a part of constituent {Y}")
            ell = next(p for p in range(1, self.k + 1) if drop(Y, p) == X)
            if slots[ell - 1] is not None:
                raise ValueError(f"edge {e} of {Y} has two vertices in class {X}")
            slots[ell - 1] = v
        return tuple(slots)

    @property
    def index_set(self) -> range:
        return range(self.m)

    def class_of(self, v: int) -> Index:
        return self._owner[v]

    def part(self, Y: Sequence[int], ell: int) -> tuple[int, ...]:
        return self.classes[drop(Y, ell)]

    def capacity(self, Y: Sequence[int]) -> int:
        """Number of possible crossing edges of ``A_Y``."""
        return prod(len(self.part(Y, ell)) for ell in range(1, self.k + 1))

    @property
    def vertices(self) -> list[int]:
        return sorted(self._owner)

    # constructors -----------------------------------------------------------

    @classmethod
    def with_sizes(cls, k: int, m: int, sizes, edges: Mapping | None = None) -> "ReducedGraph":
        """Classes of the given sizes (an int or a map per index set), numbered consecutively."""
        classes = {}
        nxt = 0
        for X in combinations(range(m), k - 1):
            s = sizes if isinstance(sizes, int) else sizes[X]
            classes[X] = tuple(range(nxt, nxt + s))
            nxt += s
        return cls(k, m, classes, edges or {})

    @classmethod
    def complete(cls, k: int, m: int, size: int = 1) -> "ReducedGraph":
        base = cls.with_sizes(k, m, size)
        edges = {Y: frozenset(product(*(base.part(Y, ell) for ell in range(1, k + 1)))) for Y in base.constituents}
        return cls(k, m, base.classes, edges)

    @classmethod
    def random(cls, k: int, m: int, max_size: int, p: float, seed: int) -> "ReducedGraph":
        rng = np.random.default_rng(seed)
        sizes = {X: int(rng.integers(1, max_size + 1)) for X in combinations(range(m), k - 1)}
        base = cls.with_sizes(k, m, sizes)
        edges = {}
        for Y in base.constituents:
            cand = list(product(*(base.part(Y, ell) for ell in range(1, k + 1))))
            keep = rng.random(len(cand)) < p
            edges[Y] = frozenset(c for c, b in zip(cand, keep) if b)
        return cls(k, m, base.classes, edges)

    # serialisation ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "classes": {",".join(map(str, X)): list(v) for X, v in self.classes.items()},
            "constituents": {
                ",".join(map(str, Y)): sorted(list(e) for e in edges) for Y, edges in self.constituents.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReducedGraph":
        def key(s):
            return tuple(int(x) for x in s.split(",")) if s else ()

        return cls(
            int(data["k"]),
            int(data["m"]),
            {key(X): tuple(v) for X, v in data["classes"].items()},
            {key(Y): frozenset(tuple(e) for e in edges) for Y, edges in data.get("constituents", {}).items()},
        )


@dataclass(frozen=True)
class ReducedMap:
    phi: Mapping[int, int]
    psi: Mapping[Edge, int]

    def to_dict(self) -> dict:
        return {
            "phi": {str(v): i for v, i in sorted(self.phi.items())},
            "psi": {",".join(map(str, S)): w for S, w in sorted(self.psi.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReducedMap":
        return cls(
            {int(v): int(i) for v, i in data["phi"].items()},
            {tuple(int(x) for x in S.split(",")): int(w) for S, w in data["psi"].items()},
        )


def is_d_dense(A: ReducedGraph, d) -> bool:
    d = Fraction(d)
    return all(len(E) >= d * A.capacity(Y) for Y, E in A.constituents.items())


# ---------------------------------------------------------------------------
# reduced maps


def _edge_image(F: Hypergraph, A: ReducedGraph, e: Edge, phi, psi) -> tuple[Index, tuple[int, ...]]:
    # constituent key and positional image of the windows of e
    Y = tuple(sorted(phi[v] for v in e))
    slots = [0] * F.k
    for v in e:
        S = tuple(u for u in e if u != v)
        slots[Y.index(phi[v])] = psi[S]
    return Y, tuple(slots)


def verify_reduced_map(F: Hypergraph, A: ReducedGraph, rm: ReducedMap) -> bool:
    """Check that ``rm`` is a reduced map from ``F`` to ``A``.

    Raises ValueError when ``phi`` misses a vertex or ``psi`` misses a
    shadow set.
    """
    if F.k != A.k:
        raise ValueError(f"uniformity mismatch: F has k={F.k}, A has k={A.k}")
    missing = [v for v in F.vertices if v not in rm.phi]
    if missing:
        raise ValueError(f"phi is undefined on vertices {missing}")
    sh = shadow(F)
    missing_s = sorted(S for S in sh if S not in rm.psi)
    if missing_s:
        raise ValueError(f"psi is undefined on shadow sets {missing_s}")
    phi, psi = rm.phi, rm.psi
    if any(not 0 <= phi[v] < A.m for v in F.vertices):
        return False
    for e in F.edges:
        if len({phi[v] for v in e}) != F.k:
            return False
    for S in sh:
        if psi[S] not in A.classes[tuple(sorted(phi[v] for v in S))]:
            return False
    for e in F.edges:
        Y, img = _edge_image(F, A, e, phi, psi)
        if img not in A.constituents[Y]:
            return False
    return True


class _Patterns:
    # every constituent edge with any subset of positions masked out
    def __init__(self, A: ReducedGraph):
        self.table: dict[Index, set] = {}
        for Y, edges in A.constituents.items():
            pats = set()
            for e in edges:
                for mask in range(1 << A.k):
                    pats.add(tuple(v if mask >> p & 1 else None for p, v in enumerate(e)))
            self.table[Y] = pats

    def allows(self, Y: Index, partial: tuple) -> bool:
        return partial in self.table[Y]


def find_reduced_map(F: Hypergraph, A: ReducedGraph, budget: int | None = None) -> ReducedMap | None:
    """Backtracking search for a reduced map from ``F`` to ``A``.

    ``phi`` is assigned first (non-isolated vertices in the copy-search
    variable order, indices ascending), then ``psi`` edge by edge with
    candidates ascending.  Partial images are checked against the
    constituents at every step.  Isolated vertices of ``F`` map to index 0.

    Raises
    ------
    BudgetExceeded
        When more than ``budget`` nodes are visited.
    """
    if F.k != A.k:
        raise ValueError(f"uniformity mismatch: F has k={F.k}, A has k={A.k}")
    k = F.k
    pats = _Patterns(A)
    order = _search_order(F)
    edges_of = {v: [e for e in F.edges if v in e] for v in F.vertices}
    # shadow sets in the order their edges are completed
    windows: list[Edge] = []
    seen = set()
    for e in F.edges:
        for S in combinations(e, k - 1):
            if S not in seen:
                seen.add(S)
                windows.append(S)
    edges_through = {S: [e for e in F.edges if set(S) <= set(e)] for S in windows}
    phi: dict[int, int] = {}
    psi: dict[Edge, int] = {}
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded(budget)

    def phi_ok(v: int) -> bool:
        for e in edges_of[v]:
            if all(u in phi for u in e):
                Y = tuple(sorted(phi[u] for u in e))
                if len(set(Y)) != k or not A.constituents[Y]:
                    return False
            elif len({phi[u] for u in e if u in phi}) != sum(u in phi for u in e):
                return False
        return True

    def psi_ok(S: Edge) -> bool:
        for e in edges_through[S]:
            Y = tuple(sorted(phi[u] for u in e))
            partial = [None] * k
            for v in e:
                W = tuple(u for u in e if u != v)
                if W in psi:
                    partial[Y.index(phi[v])] = psi[W]
            if not pats.allows(Y, tuple(partial)):
                return False
        return True

    def assign_psi(pos: int) -> bool:
        if pos == len(windows):
            return True
        S = windows[pos]
        for w in A.classes[tuple(sorted(phi[u] for u in S))]:
            tick()
            psi[S] = w
            if psi_ok(S) and assign_psi(pos + 1):
                return True
            del psi[S]
        return False

    def assign_phi(pos: int) -> bool:
        if pos == len(order):
            return assign_psi(0)
        v = order[pos]
        for idx in range(A.m):
            tick()
            phi[v] = idx
            if phi_ok(v) and assign_phi(pos + 1):
                return True
            del phi[v]
        return False

    if not assign_phi(0):
        return None
    for v in F.vertices:
        phi.setdefault(v, 0)
    rm = ReducedMap(dict(sorted(phi.items())), dict(sorted(psi.items())))
    if not verify_reduced_map(F, A, rm):
        raise RuntimeError("reduced-map search returned an invalid map")
    return rm


# ---------------------------------------------------------------------------
# degrees and Algorithm 1


def normalized_degree(A: ReducedGraph, Y: Sequence[int], ell: int, v: int) -> Fraction:
    """Edges of ``A_Y`` through ``v`` over the product of the other part sizes."""
    Y = tuple(sorted(Y))
    if Y not in A.constituents:
        raise ValueError(f"{Y} is not a {A.k}-subset of the index set")
    if not 1 <= ell <= A.k:
        raise ValueError(f"position {ell} is outside 1..{A.k}")
    if v not in A.part(Y, ell):
        raise ValueError(f"vertex {v} is not in class {drop(Y, ell)}")
    hits = sum(1 for e in A.constituents[Y] if e[ell - 1] == v)
    others = prod(len(A.part(Y, p)) for p in range(1, A.k + 1) if p != ell)
    return Fraction(hits, others)


def s_rho(A: ReducedGraph, Y: Sequence[int], ell: int, rho) -> frozenset[int]:
    """Vertices of ``P_{Y - y_ell}`` whose normalized degree is at least ``rho``."""
    rho = Fraction(rho)
    if not 0 < rho <= 1:
        raise ValueError(f"need 0 < rho <= 1, got {rho}")
    return frozenset(v for v in A.part(Y, ell) if normalized_degree(A, Y, ell, v) >= rho)


def algorithm1_color(A: ReducedGraph, Q: Sequence[int], rho) -> tuple[int, int] | None:
    """First pair ``(i, j)`` whose degree sets towards ``y_i`` and ``y_j`` overlap.

    ``Q`` is a (2k-1)-set read as ``y_1 < x_1 < y_2 < ... < x_{k-1} < y_k``
    and ``X = (x_1, ..., x_{k-1})``.  Pairs are scanned with ``i`` ascending
    outside and ``j`` ascending inside; the first with
    ``|S_i & S_j| >= rho |P_X|`` is returned, or None.
    """
    k = A.k
    Q = sorted(int(q) for q in Q)
    if len(Q) != 2 * k - 1 or len(set(Q)) != len(Q) or not all(0 <= q < A.m for q in Q):
        raise ValueError(f"Q must be {2 * k - 1} distinct indices of 0..{A.m - 1}, got {Q}")
    rho = Fraction(rho)
    ys, xs = Q[0::2], tuple(Q[1::2])
    sets = []
    for y in ys:
        Y = tuple(sorted(xs + (y,)))
        sets.append(s_rho(A, Y, Y.index(y) + 1, rho))
    need = rho * len(A.classes[xs])
    for i in range(1, k):
        for j in range(i + 1, k + 1):
            if len(sets[i - 1] & sets[j - 1]) >= need:
                return i, j
    return None


# ---------------------------------------------------------------------------
# anchors


@dataclass(frozen=True)
class AnchorFamily:
    """Per index set ``X``: ``alpha[X]`` (k vertices) and ``beta[X]`` (k-1 vertices).

    Entries may repeat.  ``pair`` is ``(i', j')`` with ``1 <= i' < j' <= k``.
    """

    pair: tuple[int, int]
    alpha: Mapping[Index, tuple[int, ...]]
    beta: Mapping[Index, tuple[int, ...]]

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "alpha": {",".join(map(str, X)): list(v) for X, v in sorted(self.alpha.items())},
            "beta": {",".join(map(str, X)): list(v) for X, v in sorted(self.beta.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnchorFamily":
        def key(s):
            return tuple(int(x) for x in s.split(",")) if s else ()

        return cls(
            tuple(data["pair"]),
            {key(X): tuple(v) for X, v in data["alpha"].items()},
            {key(X): tuple(v) for X, v in data["beta"].items()},
        )


def anchor_edges(k: int, Y: Sequence[int], anchors: AnchorFamily) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The two positional edges that anchors demand inside ``A_Y``."""
    i2, j2 = anchors.pair
    Y = tuple(sorted(Y))
    first = tuple(anchors.alpha[drop(Y, ell)][ell - 1] for ell in range(1, k + 1))
    second = []
    for ell in range(1, k + 1):
        X = drop(Y, ell)
        if ell < j2:
            second.append(anchors.beta[X][ell - 1])
        elif ell == j2:
            second.append(anchors.alpha[X][i2 - 1])
        else:
            second.append(anchors.beta[X][ell - 2])
    return first, tuple(second)


def _check_anchor_shape(A: ReducedGraph, anchors: AnchorFamily) -> None:
    i2, j2 = anchors.pair
    if not 1 <= i2 < j2 <= A.k:
        raise ValueError(f"anchor pair {anchors.pair} is not 1 <= i' < j' <= {A.k}")
    for X, members in A.classes.items():
        al, be = anchors.alpha.get(X), anchors.beta.get(X)
        if al is None or be is None:
            raise ValueError(f"anchors missing for class {X}")
        if len(al) != A.k or len(be) != A.k - 1:
            raise ValueError(f"class {X} needs {A.k} alpha and {A.k - 1} beta anchors")
        if not set(al) | set(be) <= set(members):
            raise ValueError(f"anchors of {X} lie outside its class")


def verify_anchors(A: ReducedGraph, anchors: AnchorFamily) -> bool:
    """Check both anchor edge conditions on every constituent."""
    _check_anchor_shape(A, anchors)
    for Y, E in A.constituents.items():
        first, second = anchor_edges(A.k, Y, anchors)
        if first not in E or second not in E:
            return False
    return True


def anchor_certified_graph(
    k: int, m: int, size: int, pair: tuple[int, int], seed: int, extra: float = 0.0
) -> tuple[ReducedGraph, AnchorFamily]:
    """A reduced graph whose constituents hold the anchor edges (plus noise).

    Anchors are drawn uniformly from classes of ``size`` vertices; each other
    crossing edge is added with probability ``extra``.
    """
    rng = np.random.default_rng(seed)
    base = ReducedGraph.with_sizes(k, m, size)
    alpha = {X: tuple(int(rng.choice(v)) for _ in range(k)) for X, v in base.classes.items()}
    beta = {X: tuple(int(rng.choice(v)) for _ in range(k - 1)) for X, v in base.classes.items()}
    anchors = AnchorFamily(tuple(pair), alpha, beta)
    edges = {}
    for Y in base.constituents:
        E = set(anchor_edges(k, Y, anchors))
        if extra > 0:
            for c in product(*(base.part(Y, ell) for ell in range(1, k + 1))):
                if rng.random() < extra:
                    E.add(c)
        edges[Y] = frozenset(E)
    return ReducedGraph(k, m, base.classes, edges), anchors


def build_reduced_map_from_anchors(
    F: Hypergraph, A: ReducedGraph, anchors: AnchorFamily, cert: SplitCertificate
) -> ReducedMap:
    """Turn anchors plus a split certificate into a reduced map.

    The ``l``-th vertex of the certificate ordering goes to index ``l - 1``.
    A shadow set typed ``r`` by part 1 goes to ``alpha^r``; typed ``t`` by
    part 2 it goes to ``beta^t`` below ``j'``, ``alpha^{i'}`` at ``j'`` and
    ``beta^(t-1)`` above.  The result is re-verified before returning.

    Raises
    ------
    PreconditionError
        Anchors fail, the certificate is for another pair or does not
        verify, or ``A`` has fewer indices than ``F`` has vertices.
    """
    if F.k != A.k:
        raise PreconditionError(f"uniformity mismatch: F has k={F.k}, A has k={A.k}")
    if tuple(cert.pair) != tuple(anchors.pair):
        raise PreconditionError(f"certificate pair {cert.pair} differs from anchor pair {anchors.pair}")
    if A.m < F.n:
        raise PreconditionError(f"A has {A.m} indices but F has {F.n} vertices")
    if not verify_anchors(A, anchors):
        raise PreconditionError("anchor edges are missing from some constituent")
    if not verify_split(F, cert):
        raise PreconditionError("split certificate does not verify")
    i2, j2 = anchors.pair
    phi = {v: idx for idx, v in enumerate(cert.ordering)}
    t1 = {S: next(iter(ts)) for S, ts in type_assignment(F.with_edges(cert.part1), cert.ordering).items()}
    t2 = {S: next(iter(ts)) for S, ts in type_assignment(F.with_edges(cert.part2), cert.ordering).items()}
    psi = {}
    for S in sorted(shadow(F)):
        X = tuple(sorted(phi[v] for v in S))
        if S in t1:
            psi[S] = anchors.alpha[X][t1[S] - 1]
        else:
            t = t2[S]
            if t < j2:
                psi[S] = anchors.beta[X][t - 1]
            elif t == j2:
                psi[S] = anchors.alpha[X][i2 - 1]
            else:
                psi[S] = anchors.beta[X][t - 2]
    rm = ReducedMap(dict(sorted(phi.items())), psi)
    if not verify_reduced_map(F, A, rm):
        raise RuntimeError("anchor construction produced an invalid reduced map")
    return rm


# ---------------------------------------------------------------------------
# counting lemma


@dataclass
class CountingResult:
    holds: bool
    heavy: int
    needed: Fraction
    containing: int

    def __bool__(self) -> bool:
        return self.holds


def lemma5_bound_check(H: Hypergraph, parts: Sequence[Sequence[int]], T: Sequence[int], rho) -> CountingResult:
    """Check the one-step extension count for a k-partite ``H``.

    ``T = (v_1, ..., v_t)`` with ``v_i`` in part ``i`` must lie in at least
    ``rho * prod_{j > t} |V_j|`` edges.  The result records how many
    ``u`` in part ``t+1`` extend ``T`` into at least
    ``rho/2 * prod_{j > t+1} |V_j|`` edges and whether that is at least
    ``rho/2 * |V_{t+1}|``.

    Raises
    ------
    PreconditionError
        When ``T`` is not a transversal prefix or lies in too few edges.
    """
    k = H.k
    rho = Fraction(rho)
    parts = [tuple(p) for p in parts]
    if len(parts) != k:
        raise PreconditionError(f"need {k} parts, got {len(parts)}")
    where = {}
    for idx, p in enumerate(parts):
        for v in p:
            if v in where:
                raise PreconditionError(f"vertex {v} lies in two parts")
            where[v] = idx
    for e in H.edges:
        if sorted(where.get(v, -1) for v in e) != list(range(k)):
            raise PreconditionError(f"edge {e} is not crossing")
    t = len(T)
    if not 1 <= t <= k - 1:
        raise PreconditionError(f"need 1 <= |T| <= {k - 1}, got {t}")
    if any(where.get(v) != i for i, v in enumerate(T)):
        raise PreconditionError("T must take its i-th vertex from part i")
    if not rho > 0:
        raise PreconditionError(f"need rho > 0, got {rho}")
    Tset = set(T)
    through = [e for e in H.edges if Tset <= set(e)]
    if len(through) < rho * prod(len(p) for p in parts[t:]):
        raise PreconditionError("T lies in fewer edges than the hypothesis requires")
    rest = prod(len(p) for p in parts[t + 1 :])
    heavy = 0
    for u in parts[t]:
        if sum(1 for e in through if u in e) >= rho / 2 * rest:
            heavy += 1
    needed = rho / 2 * len(parts[t])
    return CountingResult(heavy >= needed, heavy, needed, len(through))
