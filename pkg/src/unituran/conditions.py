"""Split certificates for the two-part conditions and the combined verdict.

A split certificate for a pair ``(i, j)`` partitions the edges of ``F``
into two spanning parts together with one ordering that is vanishing for
each part separately.  Whenever an edge of part 1 and an edge of part 2
share a (k-1)-set ``S``, ``S`` must be ``i``-type in part 1 and ``j``-type
in part 2.  The *star* variant additionally accepts ``S`` having the same
type in both parts.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .hypergraph import BudgetExceeded, Edge, Hypergraph, family_F, family_labels
from .vanishing import Ordering, check_ordering, find_vanishing_ordering, is_vanishing, positions, sorted_by, type_assignment

__all__ = [
    "SplitCertificate",
    "Verdict",
    "pairs",
    "check_club",
    "verify_split",
    "find_split_certificate",
    "check_spade",
    "paper_split_certificate",
    "verdict",
]

Pair = tuple[int, int]


def pairs(k: int) -> list[Pair]:
    return [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]


@dataclass(frozen=True)
class SplitCertificate:
    pair: Pair
    part1: frozenset[Edge]
    part2: frozenset[Edge]
    ordering: Ordering

    @classmethod
    def make(cls, pair, part1, part2, ordering) -> "SplitCertificate":
        canon = lambda part: frozenset(tuple(sorted(e)) for e in part)  # noqa: E731
        return cls(tuple(pair), canon(part1), canon(part2), tuple(ordering))


def check_club(F: Hypergraph, prune: bool = False, budget: int | None = None) -> bool:
    """True iff ``F`` has no vanishing ordering."""
    return find_vanishing_ordering(F, prune=prune, budget=budget) is None


def _check_well_formed(F: Hypergraph, cert: SplitCertificate) -> None:
    i, j = cert.pair
    if not 1 <= i < j <= F.k:
        raise ValueError(f"pair {cert.pair} is not 1 <= i < j <= {F.k}")
    if cert.part1 & cert.part2:
        raise ValueError("the two parts share an edge")
    if cert.part1 | cert.part2 != F.edge_set():
        raise ValueError("the two parts do not cover E(F) exactly")
    check_ordering(cert.ordering, F.n)


def verify_split(F: Hypergraph, cert: SplitCertificate, star: bool = False, strict: bool = False) -> bool:
    """Re-check a split certificate from scratch.

    Raises ValueError for a malformed certificate (wrong pair, parts that
    are not a partition of ``E(F)``, not an ordering).  ``strict`` also
    demands both parts be non-empty.
    """
    _check_well_formed(F, cert)
    if strict and not (cert.part1 and cert.part2):
        return False
    i, j = cert.pair
    F1 = F.with_edges(cert.part1)
    F2 = F.with_edges(cert.part2)
    if not (is_vanishing(F1, cert.ordering) and is_vanishing(F2, cert.ordering)):
        return False
    types1 = {S: next(iter(ts)) for S, ts in type_assignment(F1, cert.ordering).items()}
    types2 = {S: next(iter(ts)) for S, ts in type_assignment(F2, cert.ordering).items()}
    for S in types1.keys() & types2.keys():
        a, b = types1[S], types2[S]
        if (a, b) == (i, j):
            continue
        if star and a == b:
            continue
        return False
    return True


class _SplitSearch:
    """Ordering-outer backtracking with a part-assignment check inside.

    Once the vertex ``v`` of edge ``e`` is placed, the type ``e`` gives to
    ``e - v`` is fixed.  Two edges through the same window then either have
    to share a part (equal types), must sit in the two prescribed parts
    (types ``(i, j)``), or are incompatible.  Equal types are free in star
    mode.  Feasibility is a union-find over edges with forced parts.
    """

    def __init__(self, F: Hypergraph, pair: Pair, star: bool, strict: bool, budget: int | None):
        self.F, self.pair, self.star, self.strict = F, pair, star, strict
        self.budget = budget
        self.nodes = 0
        self.edges = list(F.edges)
        self.eid = {e: x for x, e in enumerate(self.edges)}
        self.edges_of: list[list[int]] = [[] for _ in F.vertices]
        for x, e in enumerate(self.edges):
            for v in e:
                self.edges_of[v].append(x)
        self.through: dict[Edge, list[tuple[int, int]]] = {}
        for x, e in enumerate(self.edges):
            for v in e:
                self.through.setdefault(tuple(u for u in e if u != v), []).append((x, v))
        self.isolated = [not self.edges_of[v] for v in F.vertices]
        self.placed_in = [0] * len(self.edges)
        self.wtype: dict[tuple[int, int], int] = {}  # (edge, omitted vertex) -> type
        self.pos = [-1] * F.n
        self.prefix: list[int] = []
        # constraints: ("eq", a, b) or ("fix", a, part)
        self.constraints: list[tuple] = []

    def _tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExceeded(self.budget)

    def _pair_constraints(self, x: int, a: int, y: int, b: int):
        i, j = self.pair
        if a == b:
            return [] if self.star else [("eq", x, y)]
        if (a, b) == (i, j):
            return [("fix", x, 1), ("fix", y, 2)]
        if (a, b) == (j, i):
            return [("fix", x, 2), ("fix", y, 1)]
        return None

    def _solve(self):
        m = len(self.edges)
        parent = list(range(m))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in self.constraints:
            if c[0] == "eq":
                ra, rb = find(c[1]), find(c[2])
                if ra != rb:
                    parent[ra] = rb
        forced: dict[int, int] = {}
        for c in self.constraints:
            if c[0] == "fix":
                r = find(c[1])
                if forced.setdefault(r, c[2]) != c[2]:
                    return None
        return find, forced

    def _assignment(self):
        solved = self._solve()
        if solved is None:
            return None
        find, forced = solved
        m = len(self.edges)
        roots = sorted({find(x) for x in range(m)}, key=lambda r: min(x for x in range(m) if find(x) == r))
        part = {r: forced.get(r, 2) for r in roots}
        if self.strict and m:
            free = [r for r in roots if r not in forced]
            for want in (1, 2):
                if all(p != want for p in part.values()):
                    if not free:
                        return None
                    part[free.pop(0)] = want
            if len(set(part.values())) < 2:
                return None
        p1 = [self.edges[x] for x in range(m) if part[find(x)] == 1]
        p2 = [self.edges[x] for x in range(m) if part[find(x)] == 2]
        return p1, p2

    def _max_partner_type(self, a: int) -> int:
        # largest type an edge may give a window that another edge typed a
        i, j = self.pair
        return j if a == i else a

    def place(self, v: int) -> tuple[bool, int]:
        self.pos[v] = len(self.prefix)
        self.prefix.append(v)
        added = 0
        ok = True
        for x in self.edges_of[v]:
            self.placed_in[x] += 1
            self.wtype[(x, v)] = self.placed_in[x]
        for x in self.edges_of[v]:
            e = self.edges[x]
            for u in e:
                S = tuple(w for w in e if w != u)
                mine = self.wtype.get((x, u))
                for y, w in self.through[S]:
                    if y == x:
                        continue
                    theirs = self.wtype.get((y, w))
                    if mine is not None and theirs is not None:
                        if u != v:
                            continue
                        cs = self._pair_constraints(x, mine, y, theirs)
                        if cs is None:
                            ok = False
                            break
                        self.constraints.extend(cs)
                        added += len(cs)
                    elif mine is None and theirs is not None:
                        # u comes after everything placed so far
                        if self.placed_in[x] + 1 > self._max_partner_type(theirs):
                            ok = False
                            break
                    elif mine is not None and u == v:
                        if self.placed_in[y] + 1 > self._max_partner_type(mine):
                            ok = False
                            break
                if not ok:
                    break
            if not ok:
                break
        if ok and added and self._solve() is None:
            ok = False
        return ok, added

    def unplace(self, v: int, added: int):
        if added:
            del self.constraints[-added:]
        for x in self.edges_of[v]:
            self.placed_in[x] -= 1
            del self.wtype[(x, v)]
        self.prefix.pop()
        self.pos[v] = -1

    def run(self) -> SplitCertificate | None:
        found = self._dfs(self.F.n)
        if found is None:
            return None
        p1, p2 = found
        return SplitCertificate.make(self.pair, p1, p2, self.prefix)

    def _dfs(self, n: int):
        if len(self.prefix) == n:
            return self._assignment()
        for v in range(n):
            if self.pos[v] >= 0:
                continue
            self._tick()
            ok, added = self.place(v)
            if ok:
                got = self._dfs(n)
                if got is not None:
                    return got
            self.unplace(v, added)
            if self.isolated[v]:
                return None
        return None


def find_split_certificate(
    F: Hypergraph,
    pair: Pair,
    star: bool = False,
    strict: bool = False,
    budget: int | None = None,
) -> SplitCertificate | None:
    """Search for a split certificate for one pair.

    Returns the certificate with the lexicographically least ordering that
    admits one; within that ordering unconstrained edges go to part 2.
    The result is re-verified before it is returned.
    """
    i, j = pair
    if not 1 <= i < j <= F.k:
        raise ValueError(f"pair {pair} is not 1 <= i < j <= {F.k}")
    cert = _SplitSearch(F, (i, j), star, strict, budget).run()
    if cert is not None and not verify_split(F, cert, star=star, strict=strict):
        raise AssertionError(f"search produced an invalid certificate for pair {pair}")
    return cert


def _pair_job(args):
    F, pair, star, strict, budget = args
    return find_split_certificate(F, pair, star=star, strict=strict, budget=budget)


def check_spade(
    F: Hypergraph,
    star: bool = False,
    pairs_: Sequence[Pair] | None = None,
    strict: bool = False,
    budget: int | None = None,
    workers: int = 1,
) -> dict[Pair, SplitCertificate | None]:
    """Certificate (or None) for every pair, in pair order.

    ``budget`` applies per pair; :class:`BudgetExceeded` propagates.
    """
    todo = list(pairs_) if pairs_ is not None else pairs(F.k)
    jobs = [(F, p, star, strict, budget) for p in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_pair_job, jobs))
    else:
        results = [_pair_job(job) for job in jobs]
    return dict(zip(todo, results))


# ---------------------------------------------------------------------------
# explicit certificates for the three-path family


def paper_split_certificate(k: int, t: int, i: int, j: int) -> SplitCertificate:
    """The hand-made certificate for ``family_F(k, t)`` and pair ``(i, j)``.

    Part 1 is the single wrap edge ``d_{t-k+2} .. d_t b_t``.  Vertices are
    grouped by the residue of their path index (``a_l`` sits at index
    ``l - k``): ``X_l`` collects the ``x_r`` with ``r = t + l (mod k)``, and
    ``Y_l`` is ``X_l`` without ``b_{t-k+l}`` and ``d_{t-k+l}``.  Blocks are
    then concatenated in the order the three cases prescribe; inside a block
    vertices appear in increasing label.
    """
    if k < 3 or t < k - 2:
        raise ValueError(f"need t >= k-2 >= 1, got k={k}, t={t}")
    if not 1 <= i < j <= k:
        raise ValueError(f"pair ({i}, {j}) is not 1 <= i < j <= {k}")
    lab = family_labels(k, t)
    X: dict[int, list[int]] = {ell: [] for ell in range(1, k + 1)}
    for name, v in lab.items():
        r = int(name[1:]) - k if name[0] == "a" else int(name[1:])
        ell = (r - t) % k or k
        X[ell].append(v)
    for ell in X:
        X[ell].sort()

    def b(r):
        return lab[f"b{r}"]

    def d(r):
        return lab[f"d{r}"]

    # Y_1 is never used, and b_{t-k+1} need not exist
    Y = {ell: [v for v in X[ell] if v not in (b(t - k + ell), d(t - k + ell))] for ell in range(2, k + 1)}

    def xs(lo, hi):
        return [v for ell in range(lo, hi + 1) for v in X[ell]]

    def ys(lo, hi):
        return [v for ell in range(lo, hi + 1) for v in Y[ell]]

    if i > 1 and j - i >= 2:
        middle = [b(r) for r in range(t - k + i + 1, t - k + j)] + [b(t)]
        middle += [d(r) for r in range(t - k + i + 1, t - k + j)]
        tau = xs(2, i) + middle + ys(i + 1, j - 1) + Y[k] + [d(t)] + X[1] + xs(j, k - 1)
    elif i == 1 and j >= 3:
        middle = [b(r) for r in range(t - k + 2, t - k + j)] + [b(t)]
        middle += [d(r) for r in range(t - k + 2, t - k + j)]
        tau = middle + ys(2, j - 1) + Y[k] + [d(t)] + X[1] + xs(j, k - 1)
    elif i == 1 and j == 2:
        tau = [b(t)] + Y[k] + [d(t)] + xs(1, k - 1)
    else:  # i > 1 and j == i + 1
        tau = xs(2, i) + [b(t)] + Y[k] + [d(t)] + X[1] + xs(i + 1, k - 1)

    e1 = tuple(sorted([d(r) for r in range(t - k + 2, t + 1)] + [b(t)]))
    F = family_F(k, t)
    part2 = [e for e in F.edges if e != e1]
    return SplitCertificate.make((i, j), [e1], part2, tau)


# ---------------------------------------------------------------------------
# verdict


@dataclass
class Verdict:
    """Everything the conditions say about one k-graph.

    ``club`` is None when the ordering search ran out of budget; pairs that
    ran out are listed in ``unknown_pairs`` / ``unknown_star_pairs`` and map
    to None.  Densities are exact.
    """

    k: int
    club: bool | None
    vanishing_ordering: Ordering | None
    spade: dict[Pair, SplitCertificate | None]
    spade_star: dict[Pair, SplitCertificate | None]
    unknown_pairs: list[Pair] = field(default_factory=list)
    unknown_star_pairs: list[Pair] = field(default_factory=list)
    claimed_density: Fraction | None = None
    claim_note: str = ""
    lower_bound: Fraction | None = None
    lower_bound_note: str = ""

    @property
    def spade_holds(self) -> bool | None:
        if self.unknown_pairs:
            return None
        return all(c is not None for c in self.spade.values())

    @property
    def spade_star_holds(self) -> bool | None:
        if any(c is None for p, c in self.spade_star.items() if p not in self.unknown_star_pairs):
            return False
        if self.unknown_star_pairs:
            return None
        return True


def verdict(
    F: Hypergraph,
    budget: int | None = None,
    hints: dict[Pair, SplitCertificate] | None = None,
    workers: int = 1,
) -> Verdict:
    """Decide the club and spade conditions and report what they imply.

    ``hints`` are candidate certificates tried (after verification) before
    any search; an invalid hint is ignored.  The ordering search always runs
    with pairwise pruning.  A (non-star) certificate is also a star
    certificate and is reused as such.
    """
    k = F.k
    try:
        tau = find_vanishing_ordering(F, prune=True, budget=budget)
        club: bool | None = tau is None
    except BudgetExceeded:
        tau, club = None, None

    spade: dict[Pair, SplitCertificate | None] = {}
    unknown: list[Pair] = []
    hints = hints or {}
    todo = []
    for p in pairs(k):
        h = hints.get(p)
        if h is not None and h.pair == p and verify_split(F, h):
            spade[p] = h
        else:
            todo.append(p)
    if todo:
        spade.update(_search_pairs(F, todo, False, budget, workers, unknown))
    spade = {p: spade[p] for p in pairs(k)}

    star: dict[Pair, SplitCertificate | None] = {}
    unknown_star: list[Pair] = []
    missing = [p for p in pairs(k) if spade[p] is None]
    star.update({p: c for p, c in spade.items() if c is not None})
    if missing:
        star.update(_search_pairs(F, missing, True, budget, workers, unknown_star))
    star = {p: star[p] for p in pairs(k)}

    v = Verdict(k, club, tau, spade, star, unknown, unknown_star)
    kk = Fraction(1, k**k)
    if club is False:
        v.claim_note = "vanishing ordering exists: uniform Turan density 0"
    if club and v.spade_holds:
        v.claimed_density = kk
        v.claim_note = "no vanishing ordering and every pair has a split certificate"
    if club:
        v.lower_bound = kk
        v.lower_bound_note = "no vanishing ordering"
    if club is not False and v.spade_star_holds is False:
        v.lower_bound = Fraction(3, (k + 1) ** k)
        bad = [p for p, c in star.items() if c is None and p not in unknown_star]
        v.lower_bound_note = f"no star certificate for pair {bad[0]}"
    return v


def _search_pairs(F, todo, star, budget, workers, unknown):
    out = {}
    if budget is None:
        out.update(check_spade(F, star=star, pairs_=todo, workers=workers))
        return out
    for p in todo:
        try:
            out[p] = find_split_certificate(F, p, star=star, budget=budget)
        except BudgetExceeded:
            out[p] = None
            unknown.append(p)
    return out
