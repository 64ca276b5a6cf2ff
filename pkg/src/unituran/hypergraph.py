"""k-uniform hypergraphs, shadows, the standard families and copy search.

Vertices are always the dense integers ``0..n-1``; edges are strictly sorted
tuples kept in lexicographic order.  Relabelling to external names is the
job of :mod:`unituran.io`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "Hypergraph",
    "BudgetExceeded",
    "shadow",
    "tight_path",
    "tight_cycle",
    "family_F",
    "family_labels",
    "find_embedding",
    "is_embedding",
    "is_f_free",
    "complete_graph",
]


class BudgetExceeded(RuntimeError):
    """A search hit its node limit before reaching a verdict."""

    def __init__(self, nodes: int):
        super().__init__(f"search budget of {nodes} nodes exhausted")
        self.nodes = nodes


Edge = tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    """An immutable k-uniform hypergraph on vertices ``0..n-1``.

    Isolated vertices are allowed.  ``edges`` is canonicalised at
    construction: every edge sorted, duplicates removed, list sorted.
    """

    k: int
    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"uniformity must be positive, got {self.k}")
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        canon = set()
        for e in self.edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != self.k or len(set(t)) != self.k:
                raise ValueError(f"edge {tuple(e)} is not a {self.k}-set")
            if t[0] < 0 or t[-1] >= self.n:
                raise ValueError(f"edge {t} has a vertex outside [0, {self.n})")
            canon.add(t)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def with_edges(self, edges: Iterable[Sequence[int]]) -> "Hypergraph":
        """Same vertex set, different edges (spanning subhypergraphs)."""
        return Hypergraph(self.k, self.n, tuple(tuple(e) for e in edges))

    def induced(self, vertices: Sequence[int]) -> "Hypergraph":
        """Induced subhypergraph, relabelled to ``0..len(vertices)-1`` in the
        given order."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [
            tuple(index[v] for v in e) for e in self.edges if all(v in index for v in e)
        ]
        return Hypergraph(self.k, len(index), tuple(edges))

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Image under the vertex map ``v -> perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("relabelling must be a permutation of the vertices")
        return Hypergraph(self.k, self.n, tuple(tuple(perm[v] for v in e) for e in self.edges))

    def __len__(self) -> int:
        return len(self.edges)


def complete_graph(k: int, n: int) -> Hypergraph:
    return Hypergraph(k, n, tuple(combinations(range(n), k)))


def shadow(F: Hypergraph) -> frozenset[Edge]:
    """All (k-1)-sets contained in some edge of ``F``."""
    return frozenset(S for e in F.edges for S in combinations(e, F.k - 1))


def tight_path(k: int, length: int) -> Hypergraph:
    """Tight k-uniform path ``0, 1, ..., length-1``."""
    if length < k:
        raise ValueError(f"a tight {k}-path needs length >= {k}, got {length}")
    return Hypergraph(k, length, tuple(tuple(range(i, i + k)) for i in range(length - k + 1)))


def tight_cycle(k: int, length: int) -> Hypergraph:
    """Tight k-uniform cycle on ``0..length-1`` with indices taken mod length."""
    if length <= k:
        raise ValueError(f"a tight {k}-cycle needs length > {k}, got {length}")
    edges = tuple(tuple((i + s) % length for s in range(k)) for i in range(length))
    return Hypergraph(k, length, edges)


def family_labels(k: int, t: int) -> dict[str, int]:
    """Vertex numbering used by :func:`family_F`.

    ``a1..a{k-1}`` are ``0..k-2``, followed by ``b0..bt``, ``c0..ct`` and
    ``d0..dt`` in consecutive blocks.
    """
    labels = {f"a{i}": i - 1 for i in range(1, k)}
    base = k - 1
    for block, x in enumerate("bcd"):
        for r in range(t + 1):
            labels[f"{x}{r}"] = base + block * (t + 1) + r
    return labels


def family_F(k: int, t: int) -> Hypergraph:
    """The k-graph built from three tight paths of length ``t+k+1``.

    The paths are ``(a_1..a_{k-1}, x_0..x_t, x'_t)`` for
    ``(x, x') in {(b, c), (c, d), (d, b)}``; the result has ``3t+k+2``
    vertices and ``3(t+2)`` edges.
    """
    if k < 3 or t < k - 2:
        raise ValueError(f"need t >= k-2 >= 1, got k={k}, t={t}")
    lab = family_labels(k, t)
    prefix = [lab[f"a{i}"] for i in range(1, k)]
    edges = []
    for x, nxt in (("b", "c"), ("c", "d"), ("d", "b")):
        seq = prefix + [lab[f"{x}{r}"] for r in range(t + 1)] + [lab[f"{nxt}{t}"]]
        edges.extend(tuple(seq[i : i + k]) for i in range(len(seq) - k + 1))
    return Hypergraph(k, len(lab), tuple(edges))


# ---------------------------------------------------------------------------
# copy search


def _search_order(F: Hypergraph) -> list[int]:
    # Highest degree first; afterwards prefer vertices sharing the most edges
    # with the already ordered ones, so forward checking bites early.
    deg = F.degrees()
    active = [v for v in F.vertices if deg[v] > 0]
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < len(active):
        best = None
        best_key = None
        for v in active:
            if v in placed:
                continue
            touching = sum(1 for e in F.edges if v in e and placed.intersection(e))
            key = (-touching, -deg[v], v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        order.append(best)
        placed.add(best)
    return order


def find_embedding(F: Hypergraph, H: Hypergraph, budget: int | None = None) -> dict[int, int] | None:
    """Find a (not necessarily induced) copy of ``F`` in ``H``.

    Parameters
    ----------
    F, H : Hypergraph
        Pattern and host; both must have the same uniformity.
    budget : int, optional
        Maximum number of search nodes; :class:`BudgetExceeded` is raised
        when it runs out.

    Returns
    -------
    dict or None
        An injective map ``V(F) -> V(H)`` sending edges to edges, or None.
        Non-isolated vertices of ``F`` are assigned in a fixed variable order
        (degree descending, connectivity aware, ties by index) with
        candidate images tried in ascending order, so the witness is the
        lexicographically least one in that variable order.  Isolated
        vertices of ``F`` take the smallest unused host vertices.
    """
    if F.k != H.k:
        raise ValueError(f"uniformity mismatch: F has k={F.k}, H has k={H.k}")
    if F.n > H.n:
        return None
    k = F.k
    order = _search_order(F)
    host_edges = H.edge_set()
    # every proper sub-tuple of a host edge, for forward checking
    host_sub: set[Edge] = set()
    for e in H.edges:
        for r in range(1, k):
            host_sub.update(combinations(e, r))
    codeg: dict[Edge, list[int]] = {}
    for e in H.edges:
        for v in e:
            codeg.setdefault(tuple(u for u in e if u != v), []).append(v)
    for key in codeg:
        codeg[key].sort()

    edges_of = {v: [e for e in F.edges if v in e] for v in F.vertices}
    mapping: dict[int, int] = {}
    used: set[int] = set()
    nodes = 0

    def candidates(v: int) -> Iterable[int]:
        pools = []
        for e in edges_of[v]:
            others = [u for u in e if u != v]
            if all(u in mapping for u in others):
                key = tuple(sorted(mapping[u] for u in others))
                pools.append(codeg.get(key, ()))
        if not pools:
            return range(H.n)
        pools.sort(key=len)
        rest = [set(p) for p in pools[1:]]
        return [w for w in pools[0] if all(w in p for p in rest)]

    def consistent(v: int) -> bool:
        for e in edges_of[v]:
            img = tuple(sorted(mapping[u] for u in e if u in mapping))
            if len(img) == k:
                if img not in host_edges:
                    return False
            elif img not in host_sub:
                return False
        return True

    def extend(pos: int) -> bool:
        nonlocal nodes
        if pos == len(order):
            return True
        v = order[pos]
        for w in candidates(v):
            if w in used:
                continue
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExceeded(budget)
            mapping[v] = w
            used.add(w)
            if consistent(v) and extend(pos + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if not extend(0):
        return None
    spare = (w for w in range(H.n) if w not in used)
    for v in F.vertices:
        if v not in mapping:
            mapping[v] = next(spare)
    return dict(sorted(mapping.items()))


def is_embedding(F: Hypergraph, H: Hypergraph, mapping: dict[int, int]) -> bool:
    """Check that ``mapping`` is an injective edge-preserving map."""
    if set(mapping) != set(F.vertices):
        return False
    if len(set(mapping.values())) != F.n or any(not 0 <= w < H.n for w in mapping.values()):
        return False
    host = H.edge_set()
    return all(tuple(sorted(mapping[v] for v in e)) in host for e in F.edges)


def is_f_free(H: Hypergraph, F: Hypergraph, budget: int | None = None) -> bool:
    return find_embedding(F, H, budget=budget) is None
