"""Command-line front end.

Exit status: 0 the property holds or the requested witness was found,
1 refuted (a witness artifact is written when ``--out`` is given),
2 unknown because a budget ran out, 3 a precondition failed,
64 usage error, 65 malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .conditions import check_spade, find_split_certificate, pairs, paper_split_certificate, verdict
from .density import (
    DensitySpec,
    check_j_dense,
    check_kj_dense,
    concentration_experiment,
    edge_density,
)
from .hypergraph import BudgetExceeded, Hypergraph, family_F, tight_cycle, tight_path
from .io import (
    FormatError,
    certificate_from_dict,
    certificate_to_dict,
    dumps,
    format_hypergraph,
    hypergraph_to_dict,
    read_hypergraph,
    verify_certificate,
)
from .palette import Palette, build_H, conj_palette, lower_bound, sample_psi, vanishing_palette, verify_palette_avoids
from .reduced import (
    PreconditionError,
    ReducedGraph,
    algorithm1_color,
    anchor_certified_graph,
    build_reduced_map_from_anchors,
    find_reduced_map,
    is_d_dense,
    lemma5_bound_check,
    verify_anchors,
    verify_reduced_map,
)
from .vanishing import build_type_digraph, digraph_to_ordering, find_vanishing_ordering, is_vanishing

HOLDS, REFUTED, UNKNOWN, PRECONDITION, USAGE, DATAERR = 0, 1, 2, 3, 64, 65


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a number or fraction, got {text!r}") from None


# ---------------------------------------------------------------------------
# artifacts


class Session:
    """Collects artifacts under ``--out`` and writes the manifest last."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out = Path(args.out) if getattr(args, "out", None) else None
        self.artifacts: list[str] = []
        self.inputs: dict[str, str] = {}

    def note_input(self, path) -> None:
        p = Path(path)
        if p.exists():
            self.inputs[str(path)] = hashlib.sha256(p.read_bytes()).hexdigest()

    def emit(self, name: str, data) -> None:
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        text = data if isinstance(data, str) else dumps(data)
        (self.out / name).write_text(text)
        self.artifacts.append(name)

    def finish(self, status: int) -> int:
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
            manifest = {
                "argv": self.argv,
                "seed": getattr(self.args, "seed", None),
                "threads": getattr(self.args, "threads", None),
                "inputs": self.inputs,
                "artifacts": sorted(self.artifacts),
                "exit_status": status,
                "version": __version__,
            }
            (self.out / "manifest.json").write_text(dumps(manifest))
        return status


def load_graph(args, session: Session) -> Hypergraph:
    picked = [x for x in (args.graph, args.family, args.path, args.cycle) if x is not None]
    if len(picked) != 1:
        raise UsageError("give exactly one of a graph file, --family, --path or --cycle")
    if args.family is not None:
        return _pair_call(family_F, args.family, "--family k,t")
    if args.path is not None:
        return _pair_call(tight_path, args.path, "--path k,length")
    if args.cycle is not None:
        return _pair_call(tight_cycle, args.cycle, "--cycle k,length")
    session.note_input(args.graph)
    return read_hypergraph(args.graph)


def _pair_call(fn, values, flag):
    if len(values) != 2:
        raise UsageError(f"{flag} takes two integers")
    try:
        return fn(*values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def load_json(path, session: Session) -> dict:
    import json

    session.note_input(path)
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None


def load_palette(args, session: Session) -> Palette:
    picked = [x for x in (args.vanishing_palette, args.conj_palette, args.palette) if x is not None]
    if len(picked) != 1:
        raise UsageError("give exactly one of --vanishing-palette, --conj-palette or --palette")
    try:
        if args.vanishing_palette is not None:
            return vanishing_palette(args.vanishing_palette)
        if args.conj_palette is not None:
            if len(args.conj_palette) != 3:
                raise UsageError("--conj-palette takes k,i,j")
            return conj_palette(*args.conj_palette)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    P = certificate_from_dict({"kind": "palette", **load_json(args.palette, session)}, args.palette)
    return P


def load_reduced(path, session: Session) -> ReducedGraph:
    data = load_json(path, session)
    try:
        return ReducedGraph.from_dict(data)
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def show_ordering(tau) -> str:
    return " ".join(map(str, tau))


# ---------------------------------------------------------------------------
# commands


def cmd_vanish(args, s: Session) -> int:
    F = load_graph(args, s)
    if args.action == "verify":
        if args.cert is None:
            raise UsageError("vanish verify needs --cert")
        ok = verify_certificate(F, load_json(args.cert, s))
        print("valid" if ok else "invalid")
        return HOLDS if ok else REFUTED
    try:
        tau = find_vanishing_ordering(F, prune=not args.no_prune, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"unknown: {exc}")
        return UNKNOWN
    if tau is None:
        print("no vanishing ordering")
        s.emit("refutation.json", {"kind": "no_vanishing_ordering", "graph": hypergraph_to_dict(F)})
        return REFUTED
    print(f"ordering: {show_ordering(tau)}")
    s.emit("ordering.json", certificate_to_dict(tau))
    if args.action == "digraph":
        D = build_type_digraph(F, tau)
        back = digraph_to_ordering(F, D, args.beta, cyclic=not args.non_cyclic)
        print(f"digraph: {len(D.arcs)} arcs, beta={args.beta}")
        if back is None:
            print("transitive digraph has a cycle")
            return REFUTED
        print(f"recovered ordering: {show_ordering(back)}")
        s.emit("digraph.json", certificate_to_dict(D, beta=args.beta, cyclic=not args.non_cyclic))
    return HOLDS


def cmd_club(args, s: Session) -> int:
    F = load_graph(args, s)
    try:
        tau = find_vanishing_ordering(F, prune=True, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"club=unknown ({exc})")
        return UNKNOWN
    if tau is None:
        print("club=true (no vanishing ordering)")
        return HOLDS
    print(f"club=false, vanishing ordering: {show_ordering(tau)}")
    s.emit("ordering.json", certificate_to_dict(tau))
    return REFUTED


def cmd_spade(args, s: Session) -> int:
    F = load_graph(args, s)
    todo = pairs(F.k)
    if args.pair is not None:
        if len(args.pair) != 2 or tuple(args.pair) not in todo:
            raise UsageError(f"--pair must be i,j with 1 <= i < j <= {F.k}")
        todo = [tuple(args.pair)]
    found, unknown = {}, []
    if args.budget is None:
        found = check_spade(F, star=args.star, pairs_=todo, workers=args.threads)
    else:
        for p in todo:
            try:
                found[p] = find_split_certificate(F, p, star=args.star, budget=args.budget)
            except BudgetExceeded:
                found[p] = None
                unknown.append(p)
    name = "spade*" if args.star else "spade"
    for (i, j), cert in found.items():
        status = "unknown" if (i, j) in unknown else ("certificate" if cert else "none")
        print(f"{name} pair ({i},{j}): {status}")
        if cert is not None:
            s.emit(f"split_{i}_{j}{'_star' if args.star else ''}.json", certificate_to_dict(cert, star=args.star))
    good = sum(c is not None for c in found.values())
    print(f"{name}={good}/{len(found)} pairs")
    if good == len(found):
        return HOLDS
    return UNKNOWN if unknown and good + len(unknown) == len(found) else REFUTED


def cmd_verify(args, s: Session) -> int:
    F = load_graph(args, s)
    reduced = load_reduced(args.reduced, s) if args.reduced else None
    ok = verify_certificate(F, load_json(args.cert, s), reduced)
    print("valid" if ok else "invalid")
    return HOLDS if ok else REFUTED


def cmd_verdict(args, s: Session) -> int:
    F = load_graph(args, s)
    hints = None
    if args.family is not None:
        k, t = args.family
        hints = {p: paper_split_certificate(k, t, *p) for p in pairs(k)}
    v = verdict(F, budget=args.budget, hints=hints, workers=args.threads)
    club = "unknown" if v.club is None else str(v.club).lower()
    print(f"club={club}")
    good = sum(c is not None for c in v.spade.values())
    print(f"spade={good}/{len(v.spade)} pairs")
    good_star = sum(c is not None for c in v.spade_star.values())
    print(f"spade*={good_star}/{len(v.spade_star)} pairs")
    print(f"claimed density: {v.claimed_density if v.claimed_density is not None else 'none'}")
    if v.claim_note:
        print(f"  ({v.claim_note})")
    if v.lower_bound is not None:
        print(f"lower bound: {v.lower_bound} ({v.lower_bound_note})")
    s.emit("verdict.json", certificate_to_dict(v))
    if v.club is None or v.unknown_pairs or v.unknown_star_pairs:
        return UNKNOWN
    return HOLDS


def cmd_gen(args, s: Session) -> int:
    fn = {"family": family_F, "path": tight_path, "cycle": tight_cycle}[args.kind]
    if len(args.params) != 2:
        raise UsageError(f"gen {args.kind} takes two integers")
    try:
        H = fn(*args.params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = dumps(hypergraph_to_dict(H)) if args.format == "json" else format_hypergraph(H)
    sys.stdout.write(text)
    s.emit(f"{args.kind}.{'json' if args.format == 'json' else 'txt'}", text)
    return HOLDS


def cmd_palette(args, s: Session) -> int:
    P = load_palette(args, s)
    if args.action == "bound":
        print(f"lower bound: {lower_bound(P)}")
        s.emit("palette.json", certificate_to_dict(P))
        return HOLDS
    if args.n is None:
        raise UsageError(f"palette {args.action} needs --n")
    if args.action == "build":
        psi = sample_psi(args.n, P.r, P.k, args.seed)
        H = build_H(args.n, psi, P)
        print(f"n={args.n} edges={H.num_edges} density={float(edge_density(H)):.6f} seed={args.seed}")
        s.emit("graph.json", hypergraph_to_dict(H))
        return HOLDS
    F = load_graph(args, s)
    rep = verify_palette_avoids(P, F, args.n, args.trials, args.seed, workers=args.threads)
    print(f"trial  edges  density   F-free")
    for t in rep.trials:
        print(f"{t.trial:5d}  {t.edges:5d}  {t.density:.6f}  {'yes' if t.f_free else 'NO'}")
    dens = rep.densities
    se = dens.std(ddof=1) / len(dens) ** 0.5 if len(dens) > 1 else float("nan")
    print(f"mean density {dens.mean():.6f} (se {se:.6f}), expected {rep.expected_density} = {float(rep.expected_density):.6f}")
    free = sum(t.f_free for t in rep.trials)
    print(f"{free}/{len(rep.trials)} F-free, seed={args.seed}")
    s.emit(
        "avoid_report.json",
        {
            "n": rep.n,
            "seed": args.seed,
            "expected_density": str(rep.expected_density),
            "palette": certificate_to_dict(P),
            "trials": [
                {"trial": t.trial, "seed": t.seed, "edges": t.edges, "density": t.density, "f_free": t.f_free}
                for t in rep.trials
            ],
        },
    )
    for t in rep.counterexamples:
        s.emit(f"counterexample_{t.trial}.json", {"trial": t.trial, "seed": t.seed, "embedding": t.embedding, "psi": t.psi})
    return HOLDS if rep.all_free else REFUTED


def _density_report(res) -> dict:
    return {
        "status": res.status,
        "mode": res.mode,
        "d": res.spec.d,
        "mu": res.spec.mu,
        "j": res.spec.j,
        "margin": res.margin,
        "tried": res.tried,
        "witness": None if res.witness is None else [list(x) for x in res.witness.sorted_sets()],
        "notes": res.notes,
    }


def cmd_density(args, s: Session) -> int:
    if args.action == "concentrate":
        P = load_palette(args, s)
        if args.n is None:
            raise UsageError("density concentrate needs --n")
        rep = concentration_experiment(P.k, args.n, P, args.trials, args.witnesses, args.mu, args.seed)
        print(f"violations: {rep.violations}/{rep.trials * rep.witnesses_per_trial} (rate {rep.violation_rate:.4g})")
        print(f"smallest margin: {rep.min_margin:.4f}")
        print(f"azuma bound: {rep.azuma:.4g} (log {rep.log_azuma:.4g}), seed={args.seed}")
        s.emit("concentration.json", vars(rep))
        return HOLDS if rep.violations == 0 else REFUTED
    H = load_graph(args, s)
    if args.action == "edge":
        print(f"edge density: {edge_density(H)}")
        return HOLDS
    if args.d is None or args.mu is None or args.j is None:
        raise UsageError(f"density {args.action} needs --d, --mu and --j")
    try:
        spec = DensitySpec(float(args.d), float(args.mu), args.j)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.action == "check":
        res = check_j_dense(H, spec, mode=args.mode, budget=args.budget or 20, seed=args.seed, samples=args.samples)
    else:
        res = check_kj_dense(H, spec, samples=args.samples, seed=args.seed)
    print(f"status: {res.status} (mode {res.mode}, {res.tried} witnesses, seed={args.seed})")
    if res.margin is not None:
        print(f"margin: {res.margin:.6f}")
    for note in res.notes[:3]:
        print(f"note: {note[:200]}")
    s.emit("density_report.json", _density_report(res))
    return {"holds": HOLDS, "violated": REFUTED}.get(res.status, UNKNOWN)


def cmd_reduced(args, s: Session) -> int:
    if args.action == "gen":
        if args.m is None or args.k is None:
            raise UsageError("reduced gen needs --k and --m")
        if args.anchors_pair is not None:
            A, anchors = anchor_certified_graph(args.k, args.m, args.size, tuple(args.anchors_pair), args.seed, args.p)
            s.emit("anchors.json", certificate_to_dict(anchors))
        else:
            A = ReducedGraph.random(args.k, args.m, args.size, args.p, args.seed)
        print(f"reduced graph: k={A.k} m={A.m} vertices={len(A.vertices)} seed={args.seed}")
        s.emit("reduced.json", certificate_to_dict(A))
        return HOLDS
    if args.action == "lemma5":
        H = load_graph(args, s)
        parts = [int_list(p) for p in (args.parts or "").split(";") if p]
        try:
            res = lemma5_bound_check(H, parts, args.tuple or (), args.rho)
        except PreconditionError as exc:
            print(f"precondition not met: {exc}")
            return PRECONDITION
        print(f"{'holds' if res.holds else 'fails'}: {res.heavy} heavy extensions, need {res.needed}")
        return HOLDS if res.holds else REFUTED
    if args.reduced is None:
        raise UsageError(f"reduced {args.action} needs --reduced")
    A = load_reduced(args.reduced, s)
    if args.action == "dense":
        ok = is_d_dense(A, args.d if args.d is not None else 0)
        print(f"{args.d}-dense: {str(ok).lower()}")
        return HOLDS if ok else REFUTED
    if args.action == "alg1":
        if args.q is None:
            raise UsageError("reduced alg1 needs --q")
        res = algorithm1_color(A, args.q, args.rho)
        print(f"color: {'none' if res is None else f'({res[0]},{res[1]})'}")
        return HOLDS if res is not None else REFUTED
    if args.action == "anchors-verify":
        anchors = certificate_from_dict({"kind": "anchors", **load_json(args.anchors, s)})
        ok = verify_anchors(A, anchors)
        print("anchors valid" if ok else "anchors invalid")
        return HOLDS if ok else REFUTED
    F = load_graph(args, s)
    if args.action == "map-find":
        try:
            rm = find_reduced_map(F, A, budget=args.budget)
        except BudgetExceeded as exc:
            print(f"unknown: {exc}")
            return UNKNOWN
        if rm is None:
            print("no reduced map")
            return REFUTED
        print("reduced map found")
        s.emit("reduced_map.json", certificate_to_dict(rm))
        return HOLDS
    if args.action == "map-verify":
        rm = certificate_from_dict({"kind": "reduced_map", **load_json(args.map, s)})
        ok = verify_reduced_map(F, A, rm)
        print("valid" if ok else "invalid")
        return HOLDS if ok else REFUTED
    # anchors-map
    if args.anchors is None or args.cert is None:
        raise UsageError("reduced anchors-map needs --anchors and --cert")
    anchors = certificate_from_dict({"kind": "anchors", **load_json(args.anchors, s)})
    cert = certificate_from_dict({"kind": "split", **load_json(args.cert, s)})
    try:
        rm = build_reduced_map_from_anchors(F, A, anchors, cert)
    except PreconditionError as exc:
        print(f"precondition not met: {exc}")
        return PRECONDITION
    print("reduced map built and verified")
    s.emit("reduced_map.json", certificate_to_dict(rm))
    return HOLDS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> Parser:
    common = Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on it)")
    common.add_argument("--out", help="directory for JSON artifacts and manifest")
    common.add_argument("--budget", type=int, help="node budget for searches")

    def add_source(parser):
        parser.add_argument("graph", nargs="?", help="hypergraph file (text or JSON)")
        parser.add_argument("--family", type=int_list, help="the three-path family, as k,t")
        parser.add_argument("--path", type=int_list, help="tight path, as k,length")
        parser.add_argument("--cycle", type=int_list, help="tight cycle, as k,length")

    pal = Parser(add_help=False)
    pal.add_argument("--vanishing-palette", type=int, metavar="K")
    pal.add_argument("--conj-palette", type=int_list, metavar="K,I,J")
    pal.add_argument("--palette", help="palette JSON file")

    p = Parser(prog="unituran", description="Uniform Turan density toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    v = sub.add_parser("vanish", parents=[common], help="vanishing orderings")
    v.add_argument("action", choices=["find", "verify", "digraph"])
    add_source(v)
    v.add_argument("--cert", help="certificate JSON to verify")
    v.add_argument("--no-prune", action="store_true", help="plain search without order constraints")
    v.add_argument("--beta", type=int, default=0)
    v.add_argument("--non-cyclic", action="store_true", help="only non-wrapping color pairs")
    v.set_defaults(func=cmd_vanish)

    c = sub.add_parser("club", parents=[common], help="no vanishing ordering exists")
    add_source(c)
    c.set_defaults(func=cmd_club)

    sp = sub.add_parser("spade", parents=[common], help="split certificates per pair")
    add_source(sp)
    sp.add_argument("--star", action="store_true", help="also accept equal types on shared sets")
    sp.add_argument("--pair", type=int_list, metavar="I,J")
    sp.set_defaults(func=cmd_spade)

    vf = sub.add_parser("verify", parents=[common], help="re-check any certificate")
    add_source(vf)
    vf.add_argument("--cert", required=True)
    vf.add_argument("--reduced", help="reduced graph JSON, for maps and anchors")
    vf.set_defaults(func=cmd_verify)

    vd = sub.add_parser("verdict", parents=[common], help="combined conditions and density claim")
    add_source(vd)
    vd.set_defaults(func=cmd_verdict)

    g = sub.add_parser("gen", parents=[common], help="write a standard hypergraph")
    g.add_argument("kind", choices=["family", "path", "cycle"])
    g.add_argument("params", type=int_list, metavar="A,B")
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.set_defaults(func=cmd_gen)

    pa = sub.add_parser("palette", parents=[common, pal], help="palette constructions")
    pa.add_argument("action", choices=["bound", "build", "avoid"])
    add_source(pa)
    pa.add_argument("--n", type=int)
    pa.add_argument("--trials", type=int, default=20)
    pa.set_defaults(func=cmd_palette)

    de = sub.add_parser("density", parents=[common, pal], help="uniform density checks")
    de.add_argument("action", choices=["check", "kj", "concentrate", "edge"])
    add_source(de)
    de.add_argument("--d", type=fraction)
    de.add_argument("--mu", type=float)
    de.add_argument("--j", type=int)
    de.add_argument("--mode", choices=["exact", "sampled"], default="sampled")
    de.add_argument("--samples", type=int, default=200)
    de.add_argument("--n", type=int)
    de.add_argument("--trials", type=int, default=100)
    de.add_argument("--witnesses", type=int, default=50)
    de.set_defaults(func=cmd_density)

    r = sub.add_parser("reduced", parents=[common], help="reduced k-graphs and maps")
    r.add_argument(
        "action",
        choices=["gen", "dense", "map-find", "map-verify", "anchors-verify", "anchors-map", "alg1", "lemma5"],
    )
    add_source(r)
    r.add_argument("--reduced", help="reduced graph JSON")
    r.add_argument("--map", help="reduced map JSON")
    r.add_argument("--anchors", help="anchor family JSON")
    r.add_argument("--cert", help="split certificate JSON")
    r.add_argument("--d", type=fraction)
    r.add_argument("--rho", type=fraction, default=Fraction(1, 2))
    r.add_argument("--q", type=int_list, help="the (2k-1) indices for alg1")
    r.add_argument("--parts", help="parts for lemma5, e.g. '0,1;2,3;4,5'")
    r.add_argument("--tuple", type=int_list, help="prefix vertices for lemma5")
    r.add_argument("--k", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--size", type=int, default=2)
    r.add_argument("--p", type=float, default=0.5, help="edge probability for gen")
    r.add_argument("--anchors-pair", type=int_list, metavar="I,J", help="gen an anchor-certified graph")
    r.set_defaults(func=cmd_reduced)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    session = Session(args, argv)
    try:
        status = args.func(args, session)
    except UsageError as exc:
        print(f"unituran: error: {exc}", file=sys.stderr)
        return USAGE
    except FormatError as exc:
        print(f"unituran: {exc}", file=sys.stderr)
        return DATAERR
    return session.finish(status)


if __name__ == "__main__":
    sys.exit(main())
