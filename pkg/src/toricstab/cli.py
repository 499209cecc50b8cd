"""Command-line front end.

Every input comes from a file.  A path of the form `builtin:NAME` reads a data
file shipped with the package (e.g. `builtin:polytopes/x224.txt`,
`builtin:surface29.json`).  Exit codes: 0 ok, 1 computation error, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import fixtures
from .kstab import (
    FlagConfig,
    KStabError,
    SurfaceModel,
    ValuationSpec,
    beta,
    dp_plurianticanonical_dim,
    flag_refine,
    local_volume_bound,
    s_invariant,
    valuation_from_json,
    volume_fn,
    walls,
)
from .laurent import LaurentError, LaurentPolynomial
from .mutation import (
    MutationError,
    SearchEdge,
    mutation_search,
    newton_polytope,
    verify_chain,
)
from .polytope import (
    FanoPolytope,
    NotFanoError,
    PolytopeError,
    PolytopeInputError,
    anticanonical_degree,
    barycentre,
    kps_toric_check,
    parse_polytope_text,
    polar,
)
from .toric import Dossier, ToricError, class_group, dossier, wps_embedding


class InputError(Exception):
    pass


def fs(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(v) -> str:
    return "(" + ", ".join(fs(x) for x in v) + ")"


# ---------------------------------------------------------------- input helpers


def read_input(path: str) -> str:
    try:
        if path.startswith("builtin:"):
            return fixtures.read_text(path[len("builtin:"):])
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def read_json_input(path: str):
    text = read_input(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def load_polytope(path: str, rational: bool = False):
    try:
        return parse_polytope_text(read_input(path), rational=rational)
    except PolytopeInputError as exc:
        raise InputError(f"{path}: {exc}") from None
    except NotFanoError as exc:
        # well-formed file, but the polytope fails the Fano conditions
        raise NotFanoError(f"{path}: {exc}") from None
    except PolytopeError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_laurent(path: str, names: str = "xyz") -> LaurentPolynomial:
    text = read_input(path)
    try:
        if text.lstrip().startswith(("[", "{")):
            return LaurentPolynomial.from_json(json.loads(text))
        lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
        body = " ".join(l for l in lines if l)
        return LaurentPolynomial.parse(body, names)
    except (LaurentError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_surface(path: str) -> SurfaceModel:
    obj = read_json_input(path)
    try:
        return SurfaceModel.from_json(obj)
    except KStabError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_flag(path: str) -> FlagConfig:
    obj = read_json_input(path)
    try:
        return FlagConfig.from_json(obj)
    except KStabError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


# ---------------------------------------------------------------- reports


@dataclass
class Report:
    data: Dict[str, Any]
    lines: List[str] = field(default_factory=list)

    def emit(self, as_json: bool, out=None) -> None:
        out = out or sys.stdout
        if as_json:
            out.write(json.dumps(self.data, indent=2, sort_keys=False) + "\n")
        else:
            out.write("\n".join(self.lines) + "\n")


def dossier_text(d: Dossier) -> List[str]:
    lines = [
        "vertices: " + " ".join(vec(v) for v in d.polytope.vertices),
        f"K-polystable (barycentre test): {'yes' if d.kps else 'no'}",
        "barycentre of polar: " + vec(d.barycentre),
        "anticanonical degree: " + fs(d.degree),
        "polar vertices: " + " ".join(vec(v) for v in d.polar_vertices),
        f"class group: {d.class_group}",
        "torus-invariant curves:",
    ]
    verts = d.polytope.vertices
    for c in d.curves:
        lines.append(f"  {vec(verts[c.cone[0]])} {vec(verts[c.cone[1]])}: {c.label}")
    if d.points:
        lines.append("torus-fixed points:")
        for c in d.points:
            extra = ""
            if c.witness is not None:
                extra = f", witness {vec(c.witness)} at height {fs(c.witness_height)}"
            lines.append(f"  cone {list(c.cone)}: {c.label}{extra}")
    if d.quotient is not None and d.quotient.orders:
        for o, w in zip(d.quotient.orders, d.quotient.weights):
            lines.append(f"quotient by Z/{o} with weights {tuple(w)}")
    e = d.embedding
    if e is None:
        lines.append("embedding: not computed (polar denominators too large)")
    else:
        degs = e.degrees
        lines.append("weighted embedding: P(" + ",".join(str(x) for x in degs) + ")")
        for n, g in zip(e.names(), e.generators):
            lines.append(f"  {n} = {vec(g)}")
        if not e.relations_searched:
            lines.append("  relations: not searched (too many generators)")
        else:
            lines.append(f"  complete intersection degrees: {tuple(e.complete_intersection_degrees)}")
            lines.append(f"  binomial relations up to degree bound ({len(e.binomials)}):")
            for b in e.binomials:
                lines.append(f"    {e.format_binomial(b)}")
    return lines


def cmd_dossier(path: str, degree_bound: int = 4) -> Report:
    p = load_polytope(path)
    d = dossier(p, degree_bound)
    return Report(d.to_json(), dossier_text(d))


def cmd_walls(surface_path: Optional[str], specs_path: str, lo=None, hi=None) -> Report:
    model = load_surface(surface_path) if surface_path else None
    obj = read_json_input(specs_path)
    raw = obj.get("valuations", obj) if isinstance(obj, dict) else obj
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{specs_path}: no valuation data given")
    slope = parse_fraction(str(obj.get("coeff_slope", 4))) if isinstance(obj, dict) else Fraction(4)
    rng = obj.get("range", [None, None]) if isinstance(obj, dict) else [None, None]
    lo = parse_fraction(str(lo if lo is not None else (rng[0] if rng[0] is not None else 0)))
    hi_raw = hi if hi is not None else rng[1]
    hi = None if hi_raw is None else parse_fraction(str(hi_raw))
    specs: List[ValuationSpec] = []
    for i, r in enumerate(raw):
        try:
            specs.append(valuation_from_json(model, r))
        except KStabError as exc:
            raise InputError(f"{specs_path}: valuation {i}: {exc}") from None
    found = walls(specs, slope, lo, hi)
    lines = [f"walls in ({fs(lo)}, {'inf' if hi is None else fs(hi)}]: {len(found)}"]
    for w in found:
        src = "; ".join(f"{v.name or 'valuation'} (A={fs(v.A)}, ord={fs(v.ord_delta)}, S={fs(v.S)})" for v in w.sources)
        lines.append(f"  c = {fs(w.c)}  from {src}")
    data = {
        "range": [fs(lo), None if hi is None else fs(hi)],
        "coeff_slope": fs(slope),
        "walls": [w.to_json() for w in found],
    }
    return Report(data, lines)


# ---------------------------------------------------------------- fixture verification


@dataclass
class Check:
    group: str
    name: str
    expected: Any
    actual: Any

    @property
    def ok(self) -> bool:
        return self.expected == self.actual

    def to_json(self) -> dict:
        return {"group": self.group, "name": self.name, "ok": self.ok, "expected": self.expected, "actual": self.actual}


def _binomial_set(texts) -> set:
    return {frozenset(s.replace(" ", "").split("-")) for s in texts}


def _verify_polytope(entry: dict) -> List[Check]:
    name = entry["name"]
    p = fixtures.polytope(name)
    d = dossier(p)
    out = []

    def add(field_name, expected, actual):
        out.append(Check("polytope", f"{name}.{field_name}", expected, actual))

    if "kps" in entry:
        add("kps", entry["kps"], d.kps)
    if "barycentre" in entry:
        add("barycentre", entry["barycentre"], [fs(x) for x in d.barycentre])
    if "degree" in entry:
        add("degree", entry["degree"], fs(d.degree))
    if "polar_vertices" in entry:
        add("polar_vertices", sorted(entry["polar_vertices"]), sorted([fs(x) for x in v] for v in d.polar_vertices))
    if "class_group" in entry:
        cg = d.class_group
        add("class_group", entry["class_group"], {"free_rank": cg.free_rank, "torsion": list(cg.torsion)})
    if "curve_labels" in entry:
        add("curve_labels", sorted(entry["curve_labels"]), sorted(c.label for c in d.curves))
    if "point_labels" in entry:
        add("point_labels", sorted(entry["point_labels"]), sorted(c.label for c in d.points))
    if "index2_points" in entry:
        add("index2_points", entry["index2_points"], sum(1 for c in d.points if c.gorenstein_index == 2))
    e = d.embedding
    if "generators" in entry:
        add("generators", sorted(entry["generators"]), sorted(list(g) for g in e.generators) if e else None)
    if "generator_degrees" in entry:
        add("generator_degrees", entry["generator_degrees"], list(e.degrees) if e else None)
    if "complete_intersection_degrees" in entry:
        add("complete_intersection_degrees", entry["complete_intersection_degrees"],
            list(e.complete_intersection_degrees) if e else None)
    if "binomials" in entry:
        have = _binomial_set(e.format_binomial(b) for b in e.binomials) if e else set()
        add("binomials", sorted(entry["binomials"]),
            sorted(t for t in entry["binomials"] if _binomial_set([t]) <= have))
    return out


def _verify_kstab(golden: dict) -> List[Check]:
    out = []
    models: Dict[str, SurfaceModel] = {}

    def model(n):
        if n not in models:
            models[n] = fixtures.surface(n)
        return models[n]

    for e in golden.get("s_invariants", []):
        m = model(e["surface"])
        out.append(Check("surface", f"{e['surface']}: S({e['F']})", e["S"], fs(s_invariant(m, e["L"], e["F"]))))
    for e in golden.get("betas", []):
        m = model(e["surface"])
        v = valuation_from_json(m, e["valuation"])
        out.append(Check("surface", f"{e['surface']}: beta at c={e['c']} for {json.dumps(e['valuation'])}",
                         e["beta"], fs(beta(Fraction(e["c"]), 4, v))))
    for e in golden.get("walls", []):
        r = cmd_walls(f"builtin:{e['surface']}.json", f"builtin:{e['specs']}.json")
        out.append(Check("walls", e["specs"], e["walls"], [w["c"] for w in r.data["walls"]]))
    for e in golden.get("flags", []):
        res = flag_refine(fixtures.flag(e["config"])).to_json()
        for k, v in e.items():
            if k != "config":
                out.append(Check("flag", f"{e['config']}.{k}", v, res[k]))
    loc = golden.get("local", {})
    for c, expected in loc.get("local_volume_bound", []):
        out.append(Check("local", f"local_volume_bound({c})", expected, local_volume_bound(Fraction(c))))
    for d, m, expected in loc.get("dp_plurianticanonical_dim", []):
        out.append(Check("local", f"dp_plurianticanonical_dim({d},{m})", expected, dp_plurianticanonical_dim(d, m)))
    return out


def _verify_mutation(spec: dict) -> List[Check]:
    out = []
    seed_name, edges = fixtures.mutation_chain()
    seed = getattr(fixtures, seed_name)()
    checks = verify_chain(seed, edges, spec.get("period_order", 8))
    bad = [i for i, c in enumerate(checks) if not c.ok]
    out.append(Check("mutation", "periods preserved on every edge", [], bad))
    chain = fixtures.read_json("mutation_chain.json")
    reached = {e.child for e in edges} | {edges[0].parent}
    for name, key in sorted(chain["targets"].items()):
        out.append(Check("mutation", f"{name} reached", True, tuple(map(tuple, key)) in reached))
    if spec.get("targets_kps"):
        from .mutation import replay

        polys = replay(seed, edges)
        for name, key in sorted(chain["targets"].items()):
            k = tuple(map(tuple, key))
            flag = k in polys and kps_toric_check(newton_polytope(polys[k])).polystable
            out.append(Check("mutation", f"{name} barycentre zero", True, flag))
        out.append(Check("mutation", "seed barycentre zero", True,
                         kps_toric_check(newton_polytope(seed)).polystable))
    return out


def cmd_verify_references(golden_path: Optional[str] = None) -> Report:
    golden = read_json_input(golden_path) if golden_path else fixtures.read_json("golden.json")
    checks: List[Check] = []
    for entry in golden.get("polytopes", []):
        checks.extend(_verify_polytope(entry))
    checks.extend(_verify_kstab(golden))
    if "mutation" in golden:
        checks.extend(_verify_mutation(golden["mutation"]))
    failed = [c for c in checks if not c.ok]
    lines = []
    for c in checks:
        if c.ok:
            lines.append(f"PASS {c.group}: {c.name}")
        else:
            lines.append(f"FAIL {c.group}: {c.name}: expected {json.dumps(c.expected)} got {json.dumps(c.actual)}")
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    data = {"passed": len(checks) - len(failed), "total": len(checks), "checks": [c.to_json() for c in checks]}
    return Report(data, lines)


# ---------------------------------------------------------------- subcommands


def _polytope_cmd(args) -> Report:
    if args.action == "barycentre":
        p = load_polytope(args.file, rational=True)
        q = polar(p) if args.polar else p
        b = barycentre(q)
        return Report({"barycentre": [fs(x) for x in b]}, ["barycentre: " + vec(b)])
    p = load_polytope(args.file)
    if args.action == "polar":
        q = polar(p)
        return Report({"vertices": [[fs(x) for x in v] for v in q.vertices]}, [vec(v) for v in q.vertices])
    if args.action == "check":
        k = kps_toric_check(p)
        return Report(
            {"kps": k.polystable, "barycentre": [fs(x) for x in k.barycentre]},
            [f"K-polystable (barycentre test): {'yes' if k.polystable else 'no'}",
             "barycentre of polar: " + vec(k.barycentre)],
        )
    d = anticanonical_degree(p)
    return Report({"degree": fs(d)}, [f"anticanonical degree: {fs(d)}"])


def _toric_cmd(args) -> Report:
    if args.action == "dossier":
        return cmd_dossier(args.file, args.degree_bound)
    p = load_polytope(args.file)
    if args.action == "classgroup":
        cg = class_group(p)
        return Report({"free_rank": cg.free_rank, "torsion": list(cg.torsion), "text": str(cg)}, [str(cg)])
    if args.action == "cones":
        d = dossier(p, args.degree_bound)
        data = {"cones": [c.to_json() for c in d.curves + d.points]}
        lines = []
        for c in d.curves + d.points:
            rays = " ".join(vec(p.vertices[i]) for i in c.cone)
            lines.append(f"{rays}: {c.label}")
        return Report(data, lines)
    e = wps_embedding(p, args.degree_bound)
    lines = ["P(" + ",".join(str(x) for x in e.degrees) + ")"]
    lines += [f"{n} = {vec(g)}" for n, g in zip(e.names(), e.generators)]
    lines += [e.format_binomial(b) for b in e.binomials]
    return Report(e.to_json(), lines)


def _mutation_cmd(args) -> Report:
    if args.action == "search":
        f = load_laurent(args.file, args.variables)
        r = mutation_search(f, args.depth, args.budget)
        data = {
            "complete": r.complete,
            "candidates_tried": r.candidates_tried,
            "nodes": [
                {"key": [list(v) for v in n.key], "depth": n.depth, "barycentre_zero": n.barycentre_zero}
                for n in r.nodes
            ],
            "edges": [e.to_json() for e in r.edges],
        }
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"seed": None, "edges": data["edges"]}, fh, indent=1)
        lines = [f"{len(r.nodes)} normal forms, {len(r.edges)} edges, {r.candidates_tried} candidates tried"
                 + ("" if r.complete else " (budget exhausted)")]
        for n in r.nodes:
            lines.append(f"  depth {n.depth}: {len(n.key)} vertices, barycentre zero: {'yes' if n.barycentre_zero else 'no'}  "
                         + " ".join(vec(v) for v in n.key))
        return Report(data, lines)
    # replay
    if args.file:
        obj = read_json_input(args.file)
    else:
        obj = fixtures.read_json("mutation_chain.json")
    try:
        edges = [SearchEdge.from_json(e) for e in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed chain: {exc}") from None
    if args.seed:
        seed = load_laurent(args.seed, args.variables)
    elif obj.get("seed") and hasattr(fixtures, obj["seed"]):
        seed = getattr(fixtures, obj["seed"])()
    else:
        raise InputError("chain names no built-in seed; pass --seed")
    checks = verify_chain(seed, edges, args.periods)
    from .mutation import replay

    polys = replay(seed, edges)
    lines = []
    nodes = []
    for key, g in polys.items():
        kps = kps_toric_check(newton_polytope(g)).polystable
        nodes.append({"key": [list(v) for v in key], "barycentre_zero": kps})
        lines.append(f"reached {len(key)}-vertex polytope, barycentre zero: {'yes' if kps else 'no'}  "
                     + " ".join(vec(v) for v in key))
    periods = [fs(x) for x in checks[0].periods_parent] if checks else []
    ok = all(c.ok for c in checks)
    lines.append(f"period coefficients c_0..c_{args.periods}: " + ", ".join(periods))
    lines.append(f"{len(checks)} edges, periods preserved on all: {'yes' if ok else 'no'}")
    data = {"nodes": nodes, "periods": periods, "edges": len(checks), "periods_preserved": ok}
    return Report(data, lines)


def _kstab_cmd(args) -> Report:
    if args.action == "s-inv":
        m = load_surface(args.surface)
        try:
            l, f = m.as_class(args.L), m.as_class(args.F)
        except KStabError as exc:
            raise InputError(str(exc)) from None
        vf = volume_fn(m, l, f)
        s = s_invariant(m, l, f)
        lines = [f"S({args.F}) = {fs(s)}", "vol(L - tF):"] + ["  " + x for x in vf.describe("t")]
        return Report({"S": fs(s), "volume": vf.to_json()}, lines)
    if args.action == "beta":
        if args.surface and args.divisor:
            m = load_surface(args.surface)
            s = s_invariant(m, m.antik, args.divisor)
        elif args.S is not None:
            s = parse_fraction(args.S)
        else:
            raise InputError("give --S or --surface with --divisor")
        v = ValuationSpec(parse_fraction(args.A), parse_fraction(args.ord), s)
        b = beta(parse_fraction(args.c), parse_fraction(args.slope), v)
        return Report({"beta": fs(b), "S": fs(s)}, [f"beta = {fs(b)}  (S = {fs(s)})"])
    if args.action == "walls":
        return cmd_walls(args.surface, args.specs, args.lo, args.hi)
    cfg = load_flag(args.config)
    r = flag_refine(cfg)
    data = r.to_json()
    data["cells"] = [c.to_json() for c in r.cells]
    vol = " + ".join(f"{fs(c)}*u^{k}" for k, c in enumerate(r.volume) if c)
    lines = [
        f"vol(P(u)) = {vol}",
        f"S_L({cfg.divisor}) = {fs(r.S_divisor)}",
        f"beta({cfg.divisor}) = {fs(r.beta_divisor)}",
        f"S(W;{cfg.flag_curve}) = {fs(r.S_curve)}",
    ]
    if r.S_point is not None:
        lines += [f"F_x = {fs(r.F_point)}", f"S(W;x) = {fs(r.S_point)}"]
    lines.append(f"delta lower bound = {fs(r.delta_lower_bound)}")
    lines.append("cells:")
    for c in r.cells:
        lines.append(f"  u in [{fs(c.u_lo)}, {fs(c.u_hi)}], v in [{c.v_lo}, {c.v_hi}]: vol = {c.volume}"
                     + (f"; negative part on {', '.join(c.support)}" if c.support else ""))
    return Report(data, lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricstab", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="group", required=True)

    p = sub.add_parser("polytope", help="polar, barycentre, K-polystability check, degree")
    p.add_argument("action", choices=["polar", "barycentre", "check", "degree"])
    p.add_argument("file")
    p.add_argument("--polar", action="store_true", help="barycentre of the polar instead")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    t = sub.add_parser("toric", help="class group, cone singularities, embedding, full dossier")
    t.add_argument("action", choices=["classgroup", "cones", "embed", "dossier"])
    t.add_argument("file")
    t.add_argument("--degree-bound", type=int, default=4)
    t.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    m = sub.add_parser("mutation", help="mutation search and chain replay")
    m.add_argument("action", choices=["search", "replay"])
    m.add_argument("file", nargs="?", help="seed polynomial (search) or chain JSON (replay)")
    m.add_argument("--depth", type=int, default=2)
    m.add_argument("--budget", type=int, default=10 ** 6)
    m.add_argument("--seed", help="seed polynomial file for replay")
    m.add_argument("--periods", type=int, default=8)
    m.add_argument("--variables", default="xyz")
    m.add_argument("--out", help="write the search edges as a chain file")
    m.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    k = sub.add_parser("kstab", help="S-invariants, beta, walls, flag refinement")
    k.add_argument("action", choices=["s-inv", "beta", "walls", "flag"])
    k.add_argument("inputs", nargs="*", help="s-inv: SURFACE; walls: SURFACE SPECS; flag: CONFIG")
    k.add_argument("--L", default="-K")
    k.add_argument("--F")
    k.add_argument("--A", default="1")
    k.add_argument("--ord", default="0")
    k.add_argument("--S")
    k.add_argument("--c", default="0")
    k.add_argument("--slope", default="4")
    k.add_argument("--divisor")
    k.add_argument("--surface")
    k.add_argument("--range", nargs=2, metavar=("LO", "HI"))
    k.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    v = sub.add_parser("verify-paper", help="re-run every shipped reference fixture")
    v.add_argument("--golden", help="alternative expectations file")
    v.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return ap


def _dispatch(args) -> Report:
    if args.group == "polytope":
        return _polytope_cmd(args)
    if args.group == "toric":
        return _toric_cmd(args)
    if args.group == "mutation":
        if args.action == "search" and not args.file:
            raise InputError("search needs a seed polynomial file")
        return _mutation_cmd(args)
    if args.group == "kstab":
        ins = list(args.inputs)
        if args.action == "s-inv":
            if len(ins) != 1 or not args.F:
                raise InputError("usage: kstab s-inv SURFACE --F CLASS [--L CLASS]")
            args.surface = ins[0]
        elif args.action == "walls":
            if len(ins) == 1:
                args.surface, args.specs = None, ins[0]
            elif len(ins) == 2:
                args.surface, args.specs = ins
            else:
                raise InputError("usage: kstab walls [SURFACE] SPECS [--range LO HI]")
            args.lo, args.hi = args.range if args.range else (None, None)
        elif args.action == "flag":
            if len(ins) != 1:
                raise InputError("usage: kstab flag CONFIG")
            args.config = ins[0]
        return _kstab_cmd(args)
    return cmd_verify_references(args.golden)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        report = _dispatch(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PolytopeError, ToricError, MutationError, KStabError, LaurentError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report.emit(args.json)
    if args.group == "verify-paper" and report.data["passed"] != report.data["total"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
