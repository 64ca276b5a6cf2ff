"""File formats for hypergraphs and certificates.

Text format: the first non-blank, non-comment line is ``k n``; every further
line lists one edge as whitespace-separated vertex ids in ``0..n-1``.
``#`` starts a comment.  JSON format: ``{"k": 3, "n": 5, "edges": [[0, 1, 2]]}``.

Certificates are JSON objects tagged by ``"kind"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .conditions import SplitCertificate, Verdict, verify_split
from .hypergraph import Hypergraph
from .palette import Palette
from .reduced import AnchorFamily, ReducedGraph, ReducedMap, verify_anchors, verify_reduced_map
from .vanishing import ColoredDigraph, digraph_to_ordering, is_vanishing

__all__ = [
    "FormatError",
    "parse_hypergraph",
    "format_hypergraph",
    "read_hypergraph",
    "write_hypergraph",
    "hypergraph_to_dict",
    "hypergraph_from_dict",
    "certificate_to_dict",
    "certificate_from_dict",
    "verify_certificate",
    "dumps",
]


class FormatError(ValueError):
    """Malformed input; the message names the offending line or field."""


def parse_hypergraph(text: str, source: str = "<input>") -> Hypergraph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{source}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
        return hypergraph_from_dict(data, source)
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise FormatError(f"{source}: line {lineno}: expected integers, got {raw.strip()!r}") from None
        if header is None:
            if len(nums) != 2:
                raise FormatError(f"{source}: line {lineno}: header must be 'k n'")
            header = nums
            continue
        k, n = header
        if len(nums) != k or len(set(nums)) != k:
            raise FormatError(f"{source}: line {lineno}: edge must list {k} distinct vertices")
        if not all(0 <= v < n for v in nums):
            raise FormatError(f"{source}: line {lineno}: vertex outside 0..{n - 1}")
        edges.append(tuple(nums))
    if header is None:
        raise FormatError(f"{source}: missing 'k n' header")
    try:
        return Hypergraph(header[0], header[1], tuple(edges))
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


def format_hypergraph(H: Hypergraph) -> str:
    lines = [f"{H.k} {H.n}"]
    lines.extend(" ".join(map(str, e)) for e in H.edges)
    return "\n".join(lines) + "\n"


def hypergraph_to_dict(H: Hypergraph) -> dict:
    return {"k": H.k, "n": H.n, "edges": [list(e) for e in H.edges]}


def hypergraph_from_dict(data: dict, source: str = "<input>") -> Hypergraph:
    for key in ("k", "n", "edges"):
        if key not in data:
            raise FormatError(f"{source}: missing field {key!r}")
    try:
        return Hypergraph(int(data["k"]), int(data["n"]), tuple(tuple(e) for e in data["edges"]))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{source}: field 'edges': {exc}") from None


def read_hypergraph(path) -> Hypergraph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    return parse_hypergraph(text, str(path))


def write_hypergraph(H: Hypergraph, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(dumps(hypergraph_to_dict(H)))
    else:
        path.write_text(format_hypergraph(H))


def dumps(data) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n"


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------------------
# certificates


def _split_to_dict(cert: SplitCertificate, star: bool = False) -> dict:
    return {
        "kind": "split",
        "star": star,
        "pair": list(cert.pair),
        "ordering": list(cert.ordering),
        "part1": sorted(list(e) for e in cert.part1),
        "part2": sorted(list(e) for e in cert.part2),
    }


def certificate_to_dict(obj, **extra) -> dict:
    """JSON form of an ordering, digraph, split certificate, verdict or reduced object."""
    if isinstance(obj, SplitCertificate):
        out = _split_to_dict(obj, extra.pop("star", False))
    elif isinstance(obj, ColoredDigraph):
        out = {
            "kind": "digraph",
            "k": obj.k,
            "n": obj.n,
            "beta": extra.pop("beta", 0),
            "cyclic": extra.pop("cyclic", True),
            "arcs": sorted([list(tup), c] for tup, c in obj.arcs),
        }
    elif isinstance(obj, Verdict):
        out = {
            "kind": "verdict",
            "k": obj.k,
            "club": obj.club,
            "vanishing_ordering": None if obj.vanishing_ordering is None else list(obj.vanishing_ordering),
            "spade": {f"{i},{j}": None if c is None else _split_to_dict(c) for (i, j), c in obj.spade.items()},
            "spade_star": {
                f"{i},{j}": None if c is None else _split_to_dict(c, True) for (i, j), c in obj.spade_star.items()
            },
            "unknown_pairs": [list(p) for p in obj.unknown_pairs],
            "unknown_star_pairs": [list(p) for p in obj.unknown_star_pairs],
            "claimed_density": None if obj.claimed_density is None else str(obj.claimed_density),
            "claim_note": obj.claim_note,
            "lower_bound": None if obj.lower_bound is None else str(obj.lower_bound),
            "lower_bound_note": obj.lower_bound_note,
        }
    elif isinstance(obj, ReducedGraph):
        out = {"kind": "reduced", **obj.to_dict()}
    elif isinstance(obj, ReducedMap):
        out = {"kind": "reduced_map", **obj.to_dict()}
    elif isinstance(obj, AnchorFamily):
        out = {"kind": "anchors", **obj.to_dict()}
    elif isinstance(obj, Palette):
        out = {"kind": "palette", "k": obj.k, "r": obj.r, "tuples": [list(t) for t in obj.sorted_tuples()]}
    elif isinstance(obj, (tuple, list)):
        out = {"kind": "ordering", "ordering": [int(v) for v in obj]}
    else:
        raise TypeError(f"no certificate format for {type(obj).__name__}")
    out.update(extra)
    return out


def certificate_from_dict(data: dict, source: str = "<input>"):
    kind = data.get("kind")
    try:
        if kind == "ordering":
            return tuple(int(v) for v in data["ordering"])
        if kind == "split":
            return SplitCertificate.make(
                tuple(data["pair"]),
                [tuple(e) for e in data["part1"]],
                [tuple(e) for e in data["part2"]],
                data["ordering"],
            )
        if kind == "digraph":
            arcs = frozenset((tuple(tup), int(c)) for tup, c in data["arcs"])
            return ColoredDigraph(int(data["k"]), int(data["n"]), arcs)
        if kind == "reduced":
            return ReducedGraph.from_dict(data)
        if kind == "reduced_map":
            return ReducedMap.from_dict(data)
        if kind == "anchors":
            return AnchorFamily.from_dict(data)
        if kind == "palette":
            return Palette(int(data["k"]), int(data["r"]), frozenset(tuple(t) for t in data["tuples"]))
    except KeyError as exc:
        raise FormatError(f"{source}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{source}: {exc}") from None
    raise FormatError(f"{source}: field 'kind': unknown certificate kind {kind!r}")


def verify_certificate(F: Hypergraph, data: dict, reduced: ReducedGraph | None = None) -> bool:
    """Re-check a certificate produced by any command.

    Orderings must be vanishing; digraphs must yield a vanishing ordering;
    split certificates must verify for their pair; verdict files are
    checked certificate by certificate; reduced maps need ``reduced``.
    """
    kind = data.get("kind")
    if kind == "ordering":
        return is_vanishing(F, certificate_from_dict(data))
    if kind == "digraph":
        D = certificate_from_dict(data)
        return digraph_to_ordering(F, D, int(data.get("beta", 0)), bool(data.get("cyclic", True))) is not None
    if kind == "split":
        return verify_split(F, certificate_from_dict(data), star=bool(data.get("star", False)))
    if kind == "verdict":
        ok = True
        tau = data.get("vanishing_ordering")
        if tau is not None:
            ok &= is_vanishing(F, tau)
        for section in ("spade", "spade_star"):
            for cert in data.get(section, {}).values():
                if cert is not None:
                    ok &= verify_certificate(F, cert)
        return bool(ok)
    if kind == "reduced_map":
        if reduced is None:
            raise FormatError("a reduced map can only be checked against a reduced graph")
        return verify_reduced_map(F, reduced, certificate_from_dict(data))
    if kind == "anchors":
        if reduced is None:
            raise FormatError("anchors can only be checked against a reduced graph")
        return verify_anchors(reduced, certificate_from_dict(data))
    raise FormatError(f"field 'kind': cannot verify certificate kind {kind!r}")
