"""Reading and writing the JSON interchange formats.

Four kinds of objects travel through files: complexes, simplicial maps,
homology/cohomology class reports, and coincidence reports.  Serialization
is deterministic — sorted keys, two-space indent, a trailing newline — so
regenerating a file always yields the same bytes.

Vertex labels on disk are strings or integers only.  Complexes built by
product or refinement constructions carry tuple labels in memory; those are
flattened to their repr strings on export, which keeps the relabeling
injective and reproducible.
"""

import json
from fractions import Fraction
from pathlib import Path

from .complexes import (
    OrientedComplex,
    SimplicialMap,
    build_complex,
    pseudo_manifold_report,
)
from .errors import InputError
from .plmaps import PLMap

# ---------------------------------------------------------------------------
# labels


def _plain_label(v):
    """A JSON-safe vertex label: strings and ints pass, tuples flatten."""
    if isinstance(v, bool):
        raise InputError(f"boolean vertex label {v!r} is not supported")
    if isinstance(v, (str, int)):
        return v
    return repr(v)


def _label_resolver(cx):
    """Map the string form of each vertex label back to the label."""
    table = {}
    for v in cx.verts:
        table[str(v)] = v
        table[v] = v
    return table


def _resolve(table, key, cx):
    if key in table:
        return table[key]
    raise InputError(f"{key!r} is not a vertex of {cx.name}")


# ---------------------------------------------------------------------------
# deterministic JSON


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(obj, path) -> str:
    text = dumps(obj)
    Path(path).write_text(text, encoding="utf-8")
    return text


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: not valid JSON ({e})") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None


def _require(d, key, kinds, where):
    if not isinstance(d, dict) or key not in d:
        raise InputError(f"{where}: missing key {key!r}")
    v = d[key]
    if kinds is not None and not isinstance(v, kinds):
        raise InputError(f"{where}: key {key!r} has the wrong type")
    return v


# ---------------------------------------------------------------------------
# complexes


def complex_to_dict(cx: OrientedComplex, manifold=None) -> dict:
    """The on-disk form of a complex.

    `manifold` fills the flag directly; when omitted it records whether the
    complex is a closed pseudo-manifold (the property this package can
    certify — vertex-link tests are out of scope).
    """
    verts = [_plain_label(v) for v in cx.verts]
    if len(set(map(str, verts))) != len(verts):
        raise InputError("vertex labels collide after flattening")
    tops = [
        [_plain_label(x) for x in cx.labels(t)] for t in cx.top_simplices
    ]
    if cx.orientation is None:
        orientation = None
    else:
        orientation = [cx.orientation[t] for t in cx.top_simplices]
    if manifold is None:
        manifold = pseudo_manifold_report(cx).is_closed_pseudo_manifold
    return {
        "name": cx.name,
        "dim": cx.dim,
        "vertex_order": verts,
        "top_simplices": tops,
        "orientation": orientation,
        "flags": {"manifold": bool(manifold)},
    }


def complex_from_dict(d: dict) -> OrientedComplex:
    name = _require(d, "name", str, "complex")
    dim = _require(d, "dim", int, "complex")
    order = _require(d, "vertex_order", list, "complex")
    tops = _require(d, "top_simplices", list, "complex")
    orientation = _require(d, "orientation", (list, type(None)), "complex")
    _require(d, "flags", dict, "complex")
    for v in order:
        if isinstance(v, bool) or not isinstance(v, (str, int)):
            raise InputError(
                f"complex {name}: vertex label {v!r} must be a string or an "
                "integer"
            )
    if orientation is not None:
        if len(orientation) != len(tops):
            raise InputError(
                f"complex {name}: orientation has {len(orientation)} entries "
                f"for {len(tops)} top simplices"
            )
        if any(o not in (1, -1) for o in orientation):
            raise InputError(f"complex {name}: orientation entries must be +-1")
    cx = build_complex(name, [tuple(t) for t in tops], vertex_order=order,
                       orientation=orientation)
    if cx.dim != dim:
        raise InputError(
            f"complex {name}: declared dim {dim}, simplices give {cx.dim}"
        )
    return cx


def write_complex(cx, path, manifold=None) -> str:
    return write_json(complex_to_dict(cx, manifold=manifold), path)


def read_complex(path) -> OrientedComplex:
    return complex_from_dict(read_json(path))


# ---------------------------------------------------------------------------
# maps


def map_to_dict(f) -> dict:
    sm = f.map if isinstance(f, PLMap) else f
    return {
        "domain": sm.domain.name,
        "codomain": sm.codomain.name,
        "vertex_map": {
            str(_plain_label(v)): _plain_label(w)
            for v, w in sm.vertex_map.items()
        },
    }


def map_from_dict(d: dict, complexes: dict) -> SimplicialMap:
    """Rebuild a map; `complexes` resolves the domain/codomain names."""
    dom_name = _require(d, "domain", str, "map")
    cod_name = _require(d, "codomain", str, "map")
    vm = _require(d, "vertex_map", dict, "map")
    for side, nm in (("domain", dom_name), ("codomain", cod_name)):
        if nm not in complexes:
            raise InputError(f"map {side} {nm!r}: no such complex was given")
    dom, cod = complexes[dom_name], complexes[cod_name]
    keys, values = _label_resolver(dom), _label_resolver(cod)
    vertex_map = {
        _resolve(keys, k, dom): _resolve(values, w, cod)
        for k, w in vm.items()
    }
    return SimplicialMap(dom, cod, vertex_map)


def write_map(f, path) -> str:
    return write_json(map_to_dict(f), path)


def read_map(path, complexes: dict) -> SimplicialMap:
    return map_from_dict(read_json(path), complexes)


# ---------------------------------------------------------------------------
# class reports


def chain_string(cx, p: int, chain: dict) -> str:
    """An exact, human-readable form of a (co)chain: '[a,b] - 2*[b,c]'."""
    if not chain:
        return "0"
    parts = []
    for k in sorted(chain):
        c = chain[k]
        labels = ",".join(
            str(_plain_label(x)) for x in cx.labels(cx.simplices[p][k])
        )
        term = f"[{labels}]" if abs(c) == 1 else f"{abs(c)}*[{labels}]"
        parts.append(("-" if c < 0 else "+", term))
    sign, term = parts[0]
    out = ("-" if sign == "-" else "") + term
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def group_report(cx, group, chain: dict) -> dict:
    """Class report for a chain against any GradedGroup on `cx`."""
    free, tors = group.coordinates(chain)
    basis = []
    for i, g in enumerate(group.generators):
        s = chain_string(cx, group.degree, g)
        if i >= group.rank:
            s += f" (order {group.torsion[i - group.rank]})"
        basis.append(s)
    return {
        "degree": group.degree,
        "coordinates": list(free),
        "torsion_coordinates": list(tors),
        "basis": basis,
    }


def homology_class_report(ctx, p: int, chain: dict) -> dict:
    return group_report(ctx.complex, ctx.homology(p), chain)


def cohomology_class_report(ctx, p: int, cochain: dict) -> dict:
    return group_report(ctx.complex, ctx.cohomology(p), cochain)


def local_class_report(cxr, lc) -> dict:
    """The component-local form of a coincidence class.

    The class is a multiple of the fundamental class on each irreducible
    piece, so it is determined by the list of pieces and one integer per
    piece; isolated points are the degree-zero case of the same shape.
    """
    localized_at = []
    integers = []
    for j, (lam, fund) in enumerate(lc.irreducible):
        if lc.degree == 0:
            (k,) = fund
            point = cxr.labels(cxr.simplices[0][k])[0]
            localized_at.append(str(_plain_label(point)))
        else:
            localized_at.append(f"piece {j} ({len(fund)} simplices)")
        integers.append(lam)
    return {
        "degree": lc.degree,
        "localized_at": localized_at,
        "integers": integers,
        "chain": chain_string(cxr, lc.degree, lc.chain),
    }


def coincidence_report_to_dict(rep) -> dict:
    """Serialize a CoincidenceReport; the shape is stable across runs."""
    from .duality import shared_context

    ctx = shared_context(rep.complex)
    m, n = rep.dims
    d = m - n
    components = []
    for entry in rep.components:
        if entry["type"] == "unsupported":
            components.append({
                "id": entry["id"],
                "type": "unsupported",
                "error": entry["error"],
            })
            continue
        lc = entry["local"]
        components.append({
            "id": entry["id"],
            "type": entry["type"],
            "degrees": list(entry["degrees"]),
            "local_class": local_class_report(entry["chain_on"], lc),
        })
    lef = rep.lefschetz
    return {
        "lefschetz": None if lef is None else str(Fraction(lef)),
        "global_class": homology_class_report(ctx, d, rep.global_chain),
        "cohomology_class": cohomology_class_report(
            ctx, n, rep.cohomology_chain
        ),
        "components": components,
        "verdicts": dict(rep.verdicts),
    }
