"""Command-line front end.

Every subcommand reads the JSON interchange formats, runs the exact
machinery, and emits a deterministic report — to stdout as text, as JSON
with ``--json``, and to a file with ``--out`` (files always hold JSON).

Exit codes: 0 success, 1 a verified identity failed to hold, 2 malformed
input, 3 a mathematical precondition was violated.

The ``--convention`` flag switches every primed/unprimed output at once;
the two sign conventions are never mixed within one run.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog, io
from .coincidence import (
    coincidence_report,
    lefschetz_number,
    multi_coincidence_report,
)
from .complexes import SimplicialMap, Subcomplex, build_complex
from .duality import DualityContext, shared_context, thom_class
from .homology import homology
from .errors import InputError, PreconditionError
from .plmaps import PLMap, coincidence_set
from .products import (
    alexander_square_check,
    duality_suite,
    intersect,
    residue_theorem_check,
)


@dataclass
class RunConfig:
    """Everything one invocation needs, parsed and defaulted."""

    command: str
    inputs: tuple = ()
    subdiv_bound: int = 3
    convention: str = "primary"
    out: str | None = None
    json_out: bool = False
    list_only: bool = False
    name: str | None = None
    params: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# input plumbing


def _load_inputs(paths):
    """Read and classify input files: complexes, maps, classes, in order."""
    complexes, maps, classes = {}, [], []
    for path in paths:
        doc = io.read_json(path)
        if not isinstance(doc, dict):
            raise InputError(f"{path}: expected a JSON object")
        if "vertex_map" in doc:
            maps.append((path, doc))
        elif "top_simplices" in doc:
            cx = io.complex_from_dict(doc)
            if cx.name in complexes:
                raise InputError(f"{path}: duplicate complex name {cx.name!r}")
            complexes[cx.name] = cx
        elif "coordinates" in doc:
            classes.append((path, doc))
        else:
            raise InputError(
                f"{path}: not a complex, map, or class file (no recognized "
                "keys)"
            )
    resolved = [io.map_from_dict(d, complexes) for _, d in maps]
    return complexes, resolved, classes


def _one_complex(complexes, what):
    if len(complexes) != 1:
        raise InputError(f"{what} needs exactly one complex file "
                         f"(got {len(complexes)})")
    return next(iter(complexes.values()))


def _class_chain(ctx, doc, path, kind):
    """Rebuild a (co)homology class from its file coordinates."""
    p = doc.get("degree")
    if not isinstance(p, int) or not 0 <= p <= ctx.m:
        raise InputError(f"{path}: class degree must be in 0..{ctx.m}")
    group = ctx.cohomology(p) if kind == "cohomology" else ctx.homology(p)
    free = doc.get("coordinates", [])
    tors = doc.get("torsion_coordinates", [])
    if len(free) != group.rank or len(tors) != len(group.torsion):
        raise InputError(
            f"{path}: expected {group.rank} free and {len(group.torsion)} "
            f"torsion coordinates in degree {p}"
        )
    return p, group.chain_from_coordinates(free, tors)


_GEOMETRY_FACTORIES = (
    lambda: catalog.circle_geometry(3),
    lambda: catalog.circle_geometry(6),
    lambda: catalog.suspension_geometry(3),
    lambda: catalog.suspension_geometry(6),
)
_geometry_cache: list = []


def _known_geometries():
    # one shared instance per codomain, so two maps read from files end up
    # on the same realization object (coincidence solving requires that)
    if not _geometry_cache:
        _geometry_cache.extend(f() for f in _GEOMETRY_FACTORIES)
    return _geometry_cache


def _shape(cx):
    tops = sorted(tuple(cx.labels(t)) for t in cx.top_simplices)
    if cx.orientation is None:
        ori = None
    else:
        ori = {tuple(cx.labels(t)): s for t, s in cx.orientation.items()}
    return cx.verts, tops, ori


def _attach_geometry(sm: SimplicialMap) -> PLMap:
    """Give a file-loaded map the standard realized atlas of its codomain.

    There is no file format for realizations, so coincidence-set commands
    only run against codomains this package realizes itself: the catalog
    circles and suspension spheres, recognized by structure (vertex order,
    top simplices, and orientation must match exactly).
    """
    want = _shape(sm.codomain)
    for geo in _known_geometries():
        if _shape(geo.complex) == want:
            moved = SimplicialMap(sm.domain, geo.complex, sm.vertex_map,
                                  check=False)
            return PLMap(moved, geo)
    raise PreconditionError(
        f"no realized atlas is known for codomain {sm.codomain.name!r}; "
        "coincidence sets need piecewise-linear data. Recognized codomains: "
        "the catalog circles (3 or 6 vertices) and suspension spheres"
    )


def _emit(cfg: RunConfig, doc: dict, lines) -> None:
    if cfg.out:
        io.write_json(doc, cfg.out)
    if cfg.json_out:
        sys.stdout.write(io.dumps(doc))
    else:
        for line in lines:
            print(line)
        if cfg.out:
            print(f"report written to {cfg.out}")


def _verdict_exit(verdicts: dict) -> int:
    return 1 if any(v is False for v in verdicts.values()) else 0


# ---------------------------------------------------------------------------
# subcommands


def _cmd_homology(cfg):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    if maps or classes:
        raise InputError("homology takes complex files only")
    lines = []
    groups = []
    for cx in complexes.values():
        lines.append(f"{cx.name} (dim {cx.dim}):")
        for p in range(cx.dim + 1):
            H = homology(cx, p)
            rep = {
                "complex": cx.name,
                "degree": p,
                "description": H.describe(),
                "rank": H.rank,
                "torsion": list(H.torsion),
                "basis": io.group_report(cx, H, {})["basis"],
            }
            groups.append(rep)
            lines.append(f"  H_{p} = {H.describe()}")
            for b in rep["basis"]:
                lines.append(f"      {b}")
    _emit(cfg, {"groups": groups}, lines)
    return 0


def _cmd_dualize(cfg):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    cx = _one_complex(complexes, "dualize")
    if maps or len(classes) != 1:
        raise InputError("dualize needs one complex file and one class file")
    ctx = shared_context(cx)
    path, doc = classes[0]
    q, u = _class_chain(ctx, doc, path, "cohomology")
    dual = ctx.poincare_chain(u, q)
    sign = 1
    if cfg.convention == "primed" and (q * (ctx.m - q)) % 2:
        sign = -1
        dual = {k: -v for k, v in dual.items()}
    report = io.homology_class_report(ctx, ctx.m - q, dual)
    out = {
        "complex": cx.name,
        "convention": cfg.convention,
        "input_degree": q,
        "dual": report,
        "sign": sign,
    }
    lines = [
        f"P{'~' if cfg.convention == 'primed' else ''}: "
        f"H^{q}({cx.name}) -> H_{ctx.m - q}({cx.name})",
        f"  coordinates: {report['coordinates']} "
        f"torsion: {report['torsion_coordinates']}",
    ] + [f"  basis: {b}" for b in report["basis"]]
    _emit(cfg, out, lines)
    return 0


def _cmd_thom(cfg):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    if maps or classes or len(complexes) != 2:
        raise InputError(
            "thom needs two complex files: the ambient manifold and the "
            "closed subcomplex (as a complex file over the same labels)"
        )
    names = list(complexes)
    ambient, sub = complexes[names[0]], complexes[names[1]]
    tops = [list(sub.labels(t)) for t in sub.top_simplices]
    X = Subcomplex.from_tops(ambient, tops, name=sub.name)
    ctx = shared_context(ambient)
    th = thom_class(ctx, X, convention=cfg.convention)
    cells = {
        "[" + ",".join(str(x) for x in ambient.labels(t)) + "]": v
        for t, v in th.cell_values.items()
    }
    out = {
        "complex": ambient.name,
        "support": sub.name,
        "convention": cfg.convention,
        "degree": th.degree,
        "cell_values": cells,
    }
    lines = [
        f"Thom class of {sub.name} in {ambient.name}: relative degree "
        f"{th.degree} cocycle on dual cells",
    ] + [f"  {k}* -> {v}" for k, v in sorted(cells.items())]
    _emit(cfg, out, lines)
    return 0


def _cmd_intersect(cfg):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    cx = _one_complex(complexes, "intersect")
    if maps or len(classes) != 2:
        raise InputError("intersect needs one complex file and two class "
                         "files (homology classes)")
    ctx = shared_context(cx)
    (pa, a), (pb, b) = (
        _class_chain(ctx, doc, path, "homology") for path, doc in classes
    )
    chain = intersect(ctx, a, pa, b, pb)
    m = ctx.m
    if cfg.convention == "primed":
        t = (m - pa) + (m - pb)
        exp = t * (m - t) + (m - pa) * pa + (m - pb) * pb
        if exp % 2:
            chain = {k: -v for k, v in chain.items()}
    d = pa + pb - m
    if d < 0:
        out = {"complex": cx.name, "degree": d, "zero": True}
        _emit(cfg, out, [f"degrees {pa}+{pb} < {m}: empty intersection"])
        return 0
    report = io.homology_class_report(ctx, d, chain)
    out = {"complex": cx.name, "convention": cfg.convention,
           "degrees": [pa, pb], "product": report}
    lines = [f"H_{pa} . H_{pb} -> H_{d}({cx.name})",
             f"  coordinates: {report['coordinates']} "
             f"torsion: {report['torsion_coordinates']}"]
    _emit(cfg, out, lines)
    return 0


def _pair_from_inputs(cfg, what, count=2):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    if classes:
        raise InputError(f"{what} takes complexes and maps, not class files")
    if count == 2 and len(maps) != 2:
        raise InputError(f"{what} needs exactly two map files")
    if count > 2 and len(maps) < 3:
        raise InputError(f"{what} needs three or more map files")
    first = maps[0]
    for sm in maps[1:]:
        if sm.domain is not first.domain or sm.codomain is not first.codomain:
            raise InputError("all maps must share one domain complex and "
                             "one codomain complex")
    return [_attach_geometry(sm) for sm in maps]


def _cmd_lefschetz(cfg):
    complexes, maps, classes = _load_inputs(cfg.inputs)
    if classes or len(maps) != 2:
        raise InputError("lefschetz needs complex files and two map files")
    f, g = maps
    lef = lefschetz_number(f, g)
    lines = [f"Lef(f, g) = {lef}"]
    out = {"lefschetz": str(lef), "components": None}
    try:
        plf, plg = (_attach_geometry(sm) for sm in maps)
        cs = coincidence_set(plf, plg, subdiv_bound=cfg.subdiv_bound)
    except PreconditionError as e:
        lines.append(f"(coincidence breakdown skipped: {e})")
    else:
        comps = []
        if cs.is_empty:
            lines.append("coincidence set: empty")
        for i in range(0 if cs.is_empty else len(cs.components)):
            kind = cs.component_kind(i)
            entry = {"id": i, "type": kind}
            if kind != "unsupported":
                from .coincidence import local_class

                try:
                    lc = local_class(cs, i)
                except PreconditionError as e:
                    entry["type"] = "unsupported"
                    entry["error"] = str(e)
                else:
                    entry["degrees"] = list(lc.degrees)
                    lines.append(
                        f"  component {i}: {kind}, local degrees "
                        f"{lc.degrees} (sum {sum(lc.degrees)})"
                    )
            if entry["type"] == "unsupported":
                lines.append(f"  component {i}: unsupported"
                             + (f" ({entry.get('error')})" if entry.get("error") else ""))
            comps.append(entry)
        out["components"] = comps
    _emit(cfg, out, lines)
    return 0


def _cmd_coincidence(cfg):
    plf, plg = _pair_from_inputs(cfg, "coincidence")
    rep = coincidence_report(plf, plg, subdiv_bound=cfg.subdiv_bound)
    doc = io.coincidence_report_to_dict(rep)
    lines = []
    if rep.lefschetz is not None:
        lines.append(f"Lef(f, g) = {rep.lefschetz}")
    lines.append(f"global class Lambda(f, g): degree "
                 f"{doc['global_class']['degree']}, coordinates "
                 f"{doc['global_class']['coordinates']}")
    for c in doc["components"]:
        if c["type"] == "unsupported":
            lines.append(f"  component {c['id']}: unsupported — {c['error']}")
        else:
            lines.append(f"  component {c['id']}: {c['type']}, integers "
                         f"{c['local_class']['integers']} at "
                         f"{c['local_class']['localized_at']}")
    for k in sorted(doc["verdicts"]):
        lines.append(f"verdict {k}: {doc['verdicts'][k]}")
    _emit(cfg, doc, lines)
    return _verdict_exit(doc["verdicts"])


def _cmd_multi(cfg):
    pl_maps = _pair_from_inputs(cfg, "multi", count=3)
    rep = multi_coincidence_report(pl_maps, subdiv_bound=cfg.subdiv_bound)
    M = pl_maps[0].map.domain
    ctx = shared_context(M)
    m, n = rep["dims"]
    q = (rep["count"] - 1) * n
    doc = {
        "count": rep["count"],
        "global_class": io.homology_class_report(ctx, m - q,
                                                 rep["global_chain"]),
        "cohomology_class": io.cohomology_class_report(
            ctx, q, rep["cohomology_chain"]),
        "verdicts": rep["verdicts"],
    }
    if rep["locmult"] is not None:
        doc["pairwise_degrees"] = rep["locmult"]["pairwise_degrees"]
    lines = [f"{rep['count']} maps, Lambda degree {m - q}: coordinates "
             f"{doc['global_class']['coordinates']}"]
    for k in sorted(rep["verdicts"]):
        lines.append(f"verdict {k}: {rep['verdicts'][k]}")
    _emit(cfg, doc, lines)
    return _verdict_exit(rep["verdicts"])


# ---------------------------------------------------------------------------
# verify


def _row_circle(T2):
    edges = [
        [T2.verts[i] for i in e]
        for e in T2.simplices[1]
        if len({T2.verts[i][1] for i in e}) == 1
        and T2.verts[next(iter(e))][1] == 0
    ]
    return Subcomplex.from_tops(T2, edges, name="row0")


def _verify_cases():
    """The whole catalog's theorem checks, in a fixed order."""
    cases = []
    for make in (lambda: catalog.circle(6), catalog.tetra_sphere,
                 lambda: catalog.torus(3), catalog.circle_cross_sphere):
        cx = make()
        cases.append((f"duality:{cx.name}",
                      lambda cx=cx: {"ok": duality_suite(
                          shared_context(cx))["ok"]}))
    def alexander_sphere():
        S2 = catalog.tetra_sphere()
        pt = Subcomplex.from_tops(S2, [[0]], name="pt")
        return {"ok": alexander_square_check(shared_context(S2), pt)["ok"]}
    cases.append(("alexander:pt_in_S2", alexander_sphere))

    def alexander_torus():
        T2 = catalog.torus(3)
        return {"ok": alexander_square_check(shared_context(T2),
                                             _row_circle(T2))["ok"]}
    cases.append(("alexander:circle_in_T2", alexander_torus))

    def residue_case():
        T = catalog.torus(6)
        S = catalog.circle(6)
        F = SimplicialMap(T, S, {v: v[0] for v in T.verts})
        C = {S.index[0][(0,)]: 1, S.index[0][(3,)]: 1}
        out = residue_theorem_check(shared_context(T), shared_context(S),
                                    F, C, 0)
        return {"ok": out["ok"], "pieces": len(out["pieces"]),
                "global": list(out["global_coords"][0])}
    cases.append(("residue:torus_over_circle", residue_case))

    pair_makers = [
        lambda: catalog.circle_pair(1, 2),
        lambda: catalog.circle_pair(0, 3),
        lambda: catalog.circle_pair(2, 5),
        lambda: catalog.sphere_pair(2, 1),
        lambda: catalog.sphere_pair(3, 2),
        catalog.antipodal_pair,
        catalog.winding_pair,
        catalog.torus_pair,
    ]
    for make in pair_makers:
        ex = make()

        def pair_case(ex=ex):
            from .coincidence import general_coincidence_theorem_check

            chk = general_coincidence_theorem_check(ex.f, ex.g)
            rep = coincidence_report(ex.f, ex.g)
            return {
                "ok": bool(chk["ok"]) and rep.ok,
                "verdicts": dict(rep.verdicts),
                "lefschetz": None if rep.lefschetz is None
                else str(rep.lefschetz),
            }
        cases.append((f"pair:{ex.name}", pair_case))

    def triple_case():
        ex = catalog.torus_triple()
        rep = multi_coincidence_report(ex.maps)
        return {"ok": rep["ok"], "verdicts": dict(rep["verdicts"])}
    cases.append(("multi:torus_triple", triple_case))
    return cases


def _cmd_verify(cfg):
    results = {}
    lines = []
    all_ok = True
    for name, runner in _verify_cases():
        res = runner()
        results[name] = res
        ok = res.get("ok")
        all_ok = all_ok and bool(ok)
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
    doc = {"ok": all_ok, "cases": results}
    lines.append(f"verify: {'all checks passed' if all_ok else 'FAILURES'} "
                 f"({len(results)} cases)")
    _emit(cfg, doc, lines)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# examples


def _example_registry():
    return {
        "circle": ("complex", {"n": 6}, lambda n: catalog.circle(n)),
        "tetra_sphere": ("complex", {}, catalog.tetra_sphere),
        "octa_sphere": ("complex", {}, catalog.octa_sphere),
        "torus": ("complex", {"n": 3}, lambda n: catalog.torus(n)),
        "projective_plane": ("complex", {}, catalog.projective_plane),
        "circle_cross_sphere": ("complex", {}, catalog.circle_cross_sphere),
        "circle_map": ("map", {"d": 2}, catalog.circle_map),
        "circle_pair": ("maps", {"a": 1, "b": 2},
                        lambda a, b: catalog.circle_pair(a, b)),
        "sphere_pair": ("maps", {"a": 2, "b": 1},
                        lambda a, b: catalog.sphere_pair(a, b)),
        "antipodal_pair": ("maps", {}, catalog.antipodal_pair),
        "winding_pair": ("maps", {}, catalog.winding_pair),
        "torus_pair": ("maps", {}, catalog.torus_pair),
        "torus_triple": ("maps", {}, catalog.torus_triple),
    }


def generate_example(name: str, out_dir=".", **params) -> list:
    """Write the files for one catalog entry; returns the paths written.

    Regeneration is bit-identical: the catalog constructions are
    deterministic and so is the serialization.
    """
    registry = _example_registry()
    if name not in registry:
        known = ", ".join(sorted(registry))
        raise InputError(f"unknown example {name!r}; known: {known}")
    kind, defaults, make = registry[name]
    bad = set(params) - set(defaults)
    if bad:
        raise InputError(f"example {name!r} does not take parameters "
                         f"{sorted(bad)}")
    args = {**defaults, **params}
    obj = make(**args)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(path, writer):
        writer(out / path)
        written.append(str(out / path))

    if kind == "complex":
        put(f"{obj.name}.json", lambda p: io.write_complex(obj, p))
    elif kind == "map":
        put(f"{obj.domain.name}.json",
            lambda p: io.write_complex(obj.domain, p))
        put(f"{obj.codomain.name}.json",
            lambda p: io.write_complex(obj.codomain, p))
        suffix = "_".join(f"{k}{v}" for k, v in sorted(args.items()))
        put(f"{name}_{suffix}.json" if suffix else f"{name}.json",
            lambda p: io.write_map(obj, p))
    else:
        put(f"{obj.domain.name}.json",
            lambda p: io.write_complex(obj.domain, p))
        put(f"{obj.codomain.name}.json",
            lambda p: io.write_complex(obj.codomain, p))
        for i, pl in enumerate(obj.maps, start=1):
            put(f"{obj.name}_f{i}.json", lambda p, pl=pl: io.write_map(pl, p))
    return written


def _cmd_examples(cfg):
    registry = _example_registry()
    if cfg.list_only or cfg.name is None:
        print("available examples (name: defaults):")
        for name in sorted(registry):
            kind, defaults, _ = registry[name]
            args = ", ".join(f"{k}={v}" for k, v in sorted(defaults.items()))
            print(f"  {name} ({kind}{', ' + args if args else ''})")
        return 0
    params = {}
    for item in cfg.params:
        if "=" not in item:
            raise InputError(f"parameters look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            params[k] = int(v)
        except ValueError:
            raise InputError(f"parameter {k!r} must be an integer") from None
    written = generate_example(cfg.name, out_dir=cfg.out or ".", **params)
    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# wiring


_COMMANDS = {
    "homology": _cmd_homology,
    "dualize": _cmd_dualize,
    "thom": _cmd_thom,
    "intersect": _cmd_intersect,
    "lefschetz": _cmd_lefschetz,
    "coincidence": _cmd_coincidence,
    "multi": _cmd_multi,
    "verify": _cmd_verify,
    "examples": _cmd_examples,
}


def run(config: RunConfig) -> int:
    """Dispatch one parsed invocation; returns the exit code."""
    try:
        return _COMMANDS[config.command](config)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PreconditionError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--subdiv-bound", type=int, default=3,
                        metavar="N", help="refinement rounds allowed when "
                        "solving for coincidence sets (default 3)")
    common.add_argument("--convention", choices=("primary", "primed"),
                        default="primary",
                        help="sign convention for all duality outputs")
    common.add_argument("--out", metavar="PATH",
                        help="write the JSON report to this file")
    common.add_argument("--json", action="store_true", dest="json_out",
                        help="print the JSON report instead of text")

    parser = argparse.ArgumentParser(
        prog="plcoin",
        description="Exact coincidence theory on triangulated manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, nargs, blurb in (
        ("homology", "+", "integral homology of complex files"),
        ("dualize", "+", "Poincare dual of a cohomology class"),
        ("thom", "+", "Thom class of a closed subcomplex"),
        ("intersect", "+", "intersection product of two homology classes"),
        ("lefschetz", "+", "Lefschetz coincidence number of two maps"),
        ("coincidence", "+", "full coincidence report for a pair of maps"),
        ("multi", "+", "coincidence report for three or more maps"),
    ):
        p = sub.add_parser(name, parents=[common], help=blurb)
        p.add_argument("inputs", nargs=nargs, metavar="FILE")
    sub.add_parser("verify", parents=[common],
                   help="run every theorem check on the example catalog")
    ex = sub.add_parser("examples", parents=[common],
                        help="list or generate the example catalog")
    ex.add_argument("name", nargs="?", help="example to generate")
    ex.add_argument("params", nargs="*", metavar="KEY=VALUE",
                    help="integer parameters, e.g. n=6")
    ex.add_argument("--list", action="store_true", dest="list_only",
                    help="list the catalog")
    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    config = RunConfig(
        command=ns.command,
        inputs=tuple(getattr(ns, "inputs", ())),
        subdiv_bound=ns.subdiv_bound,
        convention=ns.convention,
        out=ns.out,
        json_out=ns.json_out,
        list_only=getattr(ns, "list_only", False),
        name=getattr(ns, "name", None),
        params=list(getattr(ns, "params", ())),
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
