"""Vanishing orderings and their colored-digraph certificates.

An ordering lists the vertices by position.  Under an ordering every edge
``e = (v_1 < ... < v_k)`` gives its window ``e - {v_l}`` the *type* ``l``;
the ordering is vanishing when no (k-1)-set receives two different types.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .hypergraph import BudgetExceeded, Edge, Hypergraph, shadow

__all__ = [
    "Ordering",
    "ColoredDigraph",
    "Digraph",
    "check_ordering",
    "positions",
    "sorted_by",
    "type_assignment",
    "is_vanishing",
    "order_constraints",
    "find_vanishing_ordering",
    "count_vanishing_orderings",
    "build_type_digraph",
    "transitive_digraph",
    "acyclic_ordering",
    "digraph_to_ordering",
]

Ordering = tuple[int, ...]


def check_ordering(tau: Sequence[int], n: int) -> Ordering:
    tau = tuple(int(v) for v in tau)
    if sorted(tau) != list(range(n)):
        raise ValueError(f"{tau} is not an ordering of 0..{n - 1}")
    return tau


def positions(tau: Sequence[int]) -> list[int]:
    pos = [0] * len(tau)
    for i, v in enumerate(tau):
        pos[v] = i
    return pos


def sorted_by(e: Iterable[int], pos: Sequence[int]) -> tuple[int, ...]:
    """The vertices of ``e`` as they appear under the ordering."""
    return tuple(sorted(e, key=pos.__getitem__))


def _windows(e: Sequence[int], pos: Sequence[int]):
    """Yield ``(window, type)`` for the k windows of ``e`` under ``pos``."""
    seq = sorted_by(e, pos)
    for ell, v in enumerate(seq, start=1):
        yield tuple(sorted(u for u in e if u != v)), ell


def type_assignment(F: Hypergraph, tau: Sequence[int]) -> dict[Edge, frozenset[int]]:
    """Map every shadow set of ``F`` to the set of types it receives."""
    pos = positions(check_ordering(tau, F.n))
    types: dict[Edge, set[int]] = {}
    for e in F.edges:
        for S, ell in _windows(e, pos):
            types.setdefault(S, set()).add(ell)
    return {S: frozenset(ts) for S, ts in sorted(types.items())}


def is_vanishing(F: Hypergraph, tau: Sequence[int]) -> bool:
    return all(len(ts) == 1 for ts in type_assignment(F, tau).values())


def order_constraints(F: Hypergraph) -> list[tuple[int, int, int]]:
    """Triples ``(s, u, w)`` that every vanishing ordering must respect.

    For edges ``S + u`` and ``S + w`` the window ``S`` gets the same type
    from both exactly when ``u`` and ``w`` fall into the same gap of ``S``,
    i.e. when ``u`` and ``w`` lie on the same side of every ``s`` in ``S``.
    An ordering is vanishing iff it satisfies all the triples.
    """
    through: dict[Edge, list[int]] = {}
    for e in F.edges:
        for v in e:
            through.setdefault(tuple(u for u in e if u != v), []).append(v)
    triples = set()
    for S, extra in through.items():
        for u, w in combinations(sorted(extra), 2):
            for s in S:
                triples.add((s, u, w))
    return sorted(triples)


class _OrderingSearch:
    """Backtracking over prefix placements with incremental conflict checks.

    With ``prune=False`` an edge's windows are typed once its last vertex is
    placed.  With ``prune=True`` the triples of :func:`order_constraints`
    are checked instead: the relative order of two vertices is known as soon
    as one of them is placed, since unplaced vertices all come later.
    """

    def __init__(self, F: Hypergraph, prune: bool = False, budget: int | None = None):
        self.F = F
        self.prune = prune
        self.budget = budget
        self.nodes = 0
        self.edges_of = [[] for _ in F.vertices]
        for e in F.edges:
            for v in e:
                self.edges_of[v].append(e)
        self.placed_count = {e: 0 for e in F.edges}
        self.isolated = [not self.edges_of[v] for v in F.vertices]
        self.triples_of: list[list[tuple[int, int, int]]] = [[] for _ in F.vertices]
        if prune:
            for tr in order_constraints(F):
                for x in set(tr):
                    self.triples_of[x].append(tr)
        self.type_of: dict[Edge, int] = {}
        self.type_refs: dict[Edge, int] = {}
        self.pos = [-1] * F.n
        self.prefix: list[int] = []

    def _tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExceeded(self.budget)

    def _record(self, S: Edge, ell: int, undo: list) -> bool:
        cur = self.type_of.get(S)
        if cur is None:
            self.type_of[S] = ell
            self.type_refs[S] = 1
        elif cur != ell:
            return False
        else:
            self.type_refs[S] += 1
        undo.append(S)
        return True

    def _unrecord(self, undo: list):
        for S in reversed(undo):
            self.type_refs[S] -= 1
            if self.type_refs[S] == 0:
                del self.type_refs[S]
                del self.type_of[S]

    def _before(self, a: int, b: int):
        pa, pb = self.pos[a], self.pos[b]
        if pa >= 0 and (pb < 0 or pa < pb):
            return True
        if pb >= 0:
            return False
        return None

    def place(self, v: int) -> tuple[bool, list]:
        self.pos[v] = len(self.prefix)
        self.prefix.append(v)
        undo: list = []
        ok = True
        if self.prune:
            before = self._before
            for s, u, w in self.triples_of[v]:
                x = before(u, s)
                if x is not None:
                    y = before(w, s)
                    if y is not None and x != y:
                        ok = False
                        break
            return ok, undo
        for e in self.edges_of[v]:
            self.placed_count[e] += 1
            if ok and self.placed_count[e] == len(e):
                for S, ell in _windows(e, self.pos):
                    if not self._record(S, ell, undo):
                        ok = False
                        break
        return ok, undo

    def unplace(self, v: int, undo: list):
        if not self.prune:
            self._unrecord(undo)
            for e in self.edges_of[v]:
                self.placed_count[e] -= 1
        self.prefix.pop()
        self.pos[v] = -1

    def first(self) -> Ordering | None:
        if self.dfs_first(self.F.n):
            return tuple(self.prefix)
        return None

    def dfs_first(self, n: int) -> bool:
        if len(self.prefix) == n:
            return True
        for v in range(n):
            if self.pos[v] >= 0:
                continue
            self._tick()
            ok, undo = self.place(v)
            if ok and self.dfs_first(n):
                return True
            self.unplace(v, undo)
            if self.isolated[v]:
                # an isolated vertex never causes or removes a conflict, so
                # the remaining problem is the same as at this node
                return False
        return False

    def count(self) -> int:
        n = self.F.n
        if len(self.prefix) == n:
            return 1
        total = 0
        for v in range(n):
            if self.pos[v] >= 0:
                continue
            self._tick()
            ok, undo = self.place(v)
            if ok:
                total += self.count()
            self.unplace(v, undo)
        return total


def find_vanishing_ordering(
    F: Hypergraph, prune: bool = False, budget: int | None = None
) -> Ordering | None:
    """Return the lexicographically least vanishing ordering of ``F``.

    Parameters
    ----------
    F : Hypergraph
    prune : bool
        Check the pairwise order constraints of :func:`order_constraints`
        as vertices are placed instead of waiting for whole edges.  Same
        answer, far fewer nodes.
    budget : int, optional
        Node limit; :class:`BudgetExceeded` is raised when exhausted.

    Returns
    -------
    tuple or None
        None when ``F`` has no vanishing ordering.
    """
    return _OrderingSearch(F, prune=prune, budget=budget).first()


def count_vanishing_orderings(F: Hypergraph, max_vertices: int = 8) -> int:
    if F.n > max_vertices:
        raise ValueError(f"count mode is limited to {max_vertices} vertices, F has {F.n}")
    return _OrderingSearch(F, prune=True).count()


# ---------------------------------------------------------------------------
# colored digraphs


@dataclass(frozen=True)
class ColoredDigraph:
    """A k-edge-colored (k-1)-uniform digraph on ``0..n-1``.

    ``arcs`` holds ``(tuple, color)`` pairs with colors in ``0..k-1``.
    """

    k: int
    n: int
    arcs: frozenset[tuple[tuple[int, ...], int]]

    def __post_init__(self):
        for tup, c in self.arcs:
            if len(tup) != self.k - 1 or len(set(tup)) != len(tup):
                raise ValueError(f"arc {tup} is not a tuple of {self.k - 1} distinct vertices")
            if not all(0 <= v < self.n for v in tup):
                raise ValueError(f"arc {tup} leaves the vertex range")
            if not 0 <= c < self.k:
                raise ValueError(f"arc color {c} outside 0..{self.k - 1}")

    def is_simple(self) -> bool:
        seen = set()
        for tup, _ in self.arcs:
            key = frozenset(tup)
            if key in seen:
                return False
            seen.add(key)
        return True

    def arc_on(self) -> dict[frozenset, tuple[tuple[int, ...], int]]:
        return {frozenset(tup): (tup, c) for tup, c in self.arcs}


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self):
        for a, b in self.arcs:
            if a == b:
                raise ValueError(f"self-loop at {a}")


def _cycle_arcs(seq: Sequence[int]):
    # directed tight (k-1)-cycle on seq, arc j (0-based) colored j
    k = len(seq)
    for j in range(k):
        yield tuple(seq[(j + s) % k] for s in range(k - 1)), j


def build_type_digraph(F: Hypergraph, tau: Sequence[int]) -> ColoredDigraph:
    """Every edge becomes a directed tight (k-1)-cycle colored ``0..k-1``.

    Raises ValueError unless ``tau`` is vanishing for ``F``.
    """
    tau = check_ordering(tau, F.n)
    if not is_vanishing(F, tau):
        raise ValueError("ordering is not vanishing; the type digraph would not be simple")
    pos = positions(tau)
    arcs = set()
    for e in F.edges:
        arcs.update(_cycle_arcs(sorted_by(e, pos)))
    D = ColoredDigraph(F.k, F.n, frozenset(arcs))
    assert D.is_simple()
    return D


def transitive_digraph(D: ColoredDigraph, beta: int, cyclic: bool = True) -> Digraph:
    """Forward pairs of every arc colored ``beta`` or ``beta + 1``.

    Colors are consecutive in Z_k when ``cyclic`` (so ``{k-1, 0}`` is a
    valid pair); otherwise ``beta + 1`` must itself be a color.
    """
    top = D.k - 1 if cyclic else D.k - 2
    if not 0 <= beta <= top:
        raise ValueError(f"beta={beta} outside 0..{top}")
    colors = {beta, (beta + 1) % D.k}
    pairs = set()
    for tup, c in D.arcs:
        if c in colors:
            pairs.update(combinations(tup, 2))
    return Digraph(D.n, frozenset(pairs))


def acyclic_ordering(G: Digraph) -> Ordering | None:
    """Topological order taking the smallest available source first."""
    indeg = [0] * G.n
    out: list[list[int]] = [[] for _ in range(G.n)]
    for a, b in G.arcs:
        out[a].append(b)
        indeg[b] += 1
    heap = [v for v in range(G.n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return tuple(order) if len(order) == G.n else None


def _check_certificate(F: Hypergraph, D: ColoredDigraph) -> None:
    if D.k != F.k or D.n != F.n:
        raise ValueError("digraph does not live on the vertex set of F")
    if not D.is_simple():
        raise ValueError("digraph is not simple")
    arc_on = D.arc_on()
    for e in F.edges:
        first = None
        for S in combinations(e, F.k - 1):
            got = arc_on.get(frozenset(S))
            if got is None:
                raise ValueError(f"edge {e}: no arc on {S}")
            if got[1] == 0:
                first = got[0]
        if first is None:
            raise ValueError(f"edge {e}: no arc colored 0")
        last = next(v for v in e if v not in first)
        for tup, c in _cycle_arcs(first + (last,)):
            if arc_on[frozenset(tup)] != (tup, c):
                raise ValueError(f"edge {e}: arcs do not form a colored tight cycle")


def digraph_to_ordering(
    F: Hypergraph, D: ColoredDigraph, beta: int = 0, cyclic: bool = True
) -> Ordering | None:
    """Turn a colored-digraph certificate into a vanishing ordering.

    Returns None when ``T(D_{beta,beta+1})`` has a directed cycle; raises
    ValueError when ``D`` is not a valid certificate for ``F``.
    """
    _check_certificate(F, D)
    tau = acyclic_ordering(transitive_digraph(D, beta, cyclic=cyclic))
    if tau is not None and not is_vanishing(F, tau):
        raise AssertionError("acyclic order of a valid certificate must be vanishing")
    return tau


def type_classes(F: Hypergraph, tau: Sequence[int]) -> dict[int, set[Edge]]:
    """Type classes ``C_1..C_k`` of a vanishing ordering."""
    classes: dict[int, set[Edge]] = {ell: set() for ell in range(1, F.k + 1)}
    for S, ts in type_assignment(F, tau).items():
        if len(ts) != 1:
            raise ValueError(f"{S} receives types {sorted(ts)}")
        classes[next(iter(ts))].add(S)
    assert set().union(*classes.values()) == set(shadow(F))
    return classes
