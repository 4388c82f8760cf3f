"""PL geometry over exact rationals: realizations, charts, coincidence sets,
and ray-crossing local degrees.

A simplicial map only sees vertices; deciding where two maps AGREE is a
question about their affine realizations, so the codomain gets rational
coordinates (`Realization`) and an atlas of affine charts.  All solving is
exact: small Gaussian elimination over `Fraction`, polytope questions decided
by enumerating basic solutions (the polytopes here never have more vertices
than a simplex has faces), and mapping degrees counted by shooting a
deterministic rational ray and summing signed crossings.

The coincidence set of a tuple of maps is computed per top simplex.  When
some solution set is not a face, the offending simplices are stellarly
subdivided (bounded rounds) and the images of the new barycenters are tracked
exactly, so the refined complex carries the *same* PL maps.  The result is a
full subcomplex, which is what the relative-duality machinery requires.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .complexes import SimplicialMap, StellarRound, Subcomplex
from .duality import DualityContext
from .errors import InputError, PreconditionError

Point = tuple  # tuple of Fractions


# ---------------------------------------------------------------------------
# exact linear algebra, small and dense


def rat_solve(rows, rhs):
    """Solve A x = b over Fraction. Returns (particular, nullspace) or None.

    `rows` is a list of coefficient lists; the nullspace is a basis of the
    homogeneous solutions.  None means inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if aug[i][c]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n]:
            return None
    particular = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        particular[c] = aug[i][n]
    free = [c for c in range(n) if c not in pivots]
    nullspace = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -aug[i][fc]
        nullspace.append(vec)
    return particular, nullspace


def rat_det(rows):
    """Determinant over Fraction (fraction-free not needed at these sizes)."""
    a = [list(map(Fraction, row)) for row in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        inv = a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def _vec_sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def _vec_avg(points):
    k = len(points)
    return tuple(sum(col, Fraction(0)) / k for col in zip(*points))


# ---------------------------------------------------------------------------
# polytope questions, by basic-solution enumeration


def simplex_zero_polytope_vertices(points):
    """Vertices of {λ ≥ 0, Σλ = 1, Σ λ_i p_i = 0} for points in Q^d.

    Returned as a list of (support, λ-dict).  The polytope is a slice of a
    simplex, so every vertex is the unique solution on its own support;
    enumerating supports is exhaustive at these sizes.
    """
    k = len(points)
    out = []
    for size in range(1, k + 1):
        for S in combinations(range(k), size):
            rows = [[points[i][c] for i in S] for c in range(len(points[0]))]
            rows.append([1] * size)
            sol = rat_solve(rows, [0] * len(points[0]) + [1])
            if sol is None:
                continue
            particular, nullspace = sol
            if nullspace:
                continue  # not basic; its face's vertices are found separately
            if all(x > 0 for x in particular):
                out.append((S, dict(zip(S, particular))))
    return out


def simplex_hits_zero(points) -> bool:
    return bool(simplex_zero_polytope_vertices(points))


# ---------------------------------------------------------------------------
# ray-crossing degree


def _ray_cross(points, d):
    """Crossing of ray {t·d : t>0} with the affine simplex on `points`.

    Returns +1/-1 for a transverse interior crossing, 0 for a clean miss,
    and None when the configuration is degenerate for this direction.
    """
    n = len(d)
    rows = [[p[c] for p in points] + [-d[c]] for c in range(n)]
    rows.append([1] * len(points) + [0])
    sol = rat_solve(rows, [0] * n + [1])
    if sol is None:
        return 0
    particular, nullspace = sol
    if nullspace:
        return None
    lambdas, t = particular[:-1], particular[-1]
    if any(x == 0 for x in lambdas) or t == 0:
        return None
    if any(x < 0 for x in lambdas) or t < 0:
        return 0
    # outward-normal-first orientation of the sphere: the ray direction is
    # the leading column of the crossing frame
    frame = [list(d)]
    frame.extend(list(_vec_sub(p, points[0])) for p in points[1:])
    det = rat_det([[frame[j][c] for j in range(n)] for c in range(n)])
    if det == 0:
        return None
    return 1 if det > 0 else -1


def winding_degree(facets, n, tries=60):
    """Degree of a PL (n-1)-cycle in Q^n - 0 about the origin.

    `facets` is a list of (coefficient, [n points]); the cycle is the signed
    sum of the affine simplices.  The first deterministically generated
    direction that is generic for every facet wins.
    """
    for j in range(1, tries + 1):
        d = tuple(Fraction(j) ** i for i in range(n))
        total = 0
        for coeff, pts in facets:
            c = _ray_cross(pts, d)
            if c is None:
                break
            total += coeff * c
        else:
            return total
    raise PreconditionError(
        "no generic ray direction found; the boundary data is degenerate"
    )


# ---------------------------------------------------------------------------
# realizations and charts


class Realization:
    """Exact rational coordinates for a complex's vertices."""

    def __init__(self, cx, coords):
        self.complex = cx
        self.coords = {v: tuple(Fraction(x) for x in pt) for v, pt in coords.items()}
        missing = [v for v in cx.verts if v not in self.coords]
        if missing:
            raise InputError(f"realization misses vertices {missing[:4]!r}")
        self.ambient = len(next(iter(self.coords.values())))
        if any(len(p) != self.ambient for p in self.coords.values()):
            raise InputError("realization points have mixed dimensions")
        for t in cx.top_simplices:
            pts = self.simplex_points(t)
            frame = [list(_vec_sub(p, pts[0])) for p in pts[1:]]
            rank = _rank(frame)
            if rank != len(t) - 1:
                raise InputError(
                    f"simplex {cx.labels(t)!r} is affinely degenerate in the realization"
                )

    def vertex_point(self, position) -> Point:
        return self.coords[self.complex.verts[position]]

    def simplex_points(self, t):
        return [self.vertex_point(i) for i in t]

    def barycenter(self, t) -> Point:
        return _vec_avg(self.simplex_points(t))

    def carrier(self, point):
        """The unique simplex whose relative interior contains `point`."""
        cx = self.complex
        for t in cx.top_simplices:
            pts = self.simplex_points(t)
            rows = [[p[c] for p in pts] for c in range(self.ambient)]
            rows.append([1] * len(pts))
            sol = rat_solve(rows, list(point) + [1])
            if sol is None:
                continue
            particular, nullspace = sol
            if nullspace or any(x < 0 for x in particular):
                continue
            return tuple(i for i, lam in zip(t, particular) if lam > 0)
        raise InputError(f"point {point!r} lies outside the realization")


def _rank(rows):
    if not rows:
        return 0
    sol = rat_solve(
        [[row[c] for row in rows] for c in range(len(rows[0]))],
        [0] * len(rows[0]),
    )
    _, nullspace = sol
    return len(rows) - len(nullspace)


class Chart:
    """An affine projection of the realization to Q^n, valid on covered stars."""

    def __init__(self, name, matrix, offset, covered):
        self.name = name
        self.matrix = [tuple(Fraction(x) for x in row) for row in matrix]
        self.offset = tuple(Fraction(x) for x in offset)
        self.covered = frozenset(covered)  # top simplices (position tuples)
        self.n = len(self.matrix)

    def apply(self, point) -> Point:
        return tuple(
            sum(a * x for a, x in zip(row, point)) + o
            for row, o in zip(self.matrix, self.offset)
        )

    def covers_star(self, cx, simplex) -> bool:
        return all(t in self.covered for t in cx.star_tops(simplex))


class CodomainGeometry:
    """Realization plus an orientation-consistent chart atlas."""

    def __init__(self, realization: Realization, charts):
        self.realization = realization
        self.complex = realization.complex
        self.charts = list(charts)
        self.orientation = self.complex.orient()
        for chart in self.charts:
            self._validate(chart)

    def _validate(self, chart):
        cx = self.complex
        n = cx.dim
        if chart.n != n:
            raise InputError(
                f"chart {chart.name!r} maps to Q^{chart.n}, want Q^{n}"
            )
        for t in chart.covered:
            pts = [chart.apply(p) for p in self.realization.simplex_points(t)]
            frame = [[pts[i + 1][c] - pts[0][c] for i in range(n)] for c in range(n)]
            det = rat_det(frame)
            if det == 0:
                raise InputError(
                    f"chart {chart.name!r} is degenerate on {cx.labels(t)!r}"
                )
            if (1 if det > 0 else -1) != self.orientation[t]:
                raise InputError(
                    f"chart {chart.name!r} reverses orientation on {cx.labels(t)!r}"
                )
        # injectivity around interior vertices: the covered stars must wind
        # exactly once about the vertex image
        for (v,) in cx.simplices[0]:
            star = cx.star_tops((v,))
            if not all(t in chart.covered for t in star):
                continue
            center = chart.apply(self.realization.vertex_point(v))
            facets = []
            for t in star:
                link = tuple(i for i in t if i != v)
                pts = [
                    _vec_sub(chart.apply(self.realization.vertex_point(i)), center)
                    for i in link
                ]
                coeff = self.orientation[t]
                # incidence of the link facet in the oriented boundary of t
                pos = t.index(v)
                coeff *= -1 if pos % 2 else 1
                facets.append((coeff, pts))
            if winding_degree(facets, n) != 1:
                raise InputError(
                    f"chart {chart.name!r} does not wind once around vertex "
                    f"{cx.verts[v]!r}"
                )

    def chart_covering_star(self, simplex) -> Chart:
        for chart in self.charts:
            if chart.covers_star(self.complex, simplex):
                return chart
        raise PreconditionError(
            f"no chart covers the star of {self.complex.labels(simplex)!r}; "
            "extend the atlas of the codomain geometry"
        )


class PLMap:
    """A simplicial map with realized codomain — enough data to solve f=g."""

    def __init__(self, map: SimplicialMap, geometry: CodomainGeometry):
        if map.codomain is not geometry.complex:
            raise InputError("geometry belongs to a different codomain")
        self.map = map
        self.geometry = geometry

    @property
    def domain(self):
        return self.map.domain

    def vertex_image_point(self, label) -> Point:
        target = self.map.vertex_map[label]
        return self.geometry.realization.coords[target]


# ---------------------------------------------------------------------------
# coincidence sets


class CoincidenceSet:
    """Where a tuple of PL maps all agree, as a full subcomplex.

    Attributes:
        complex: the (possibly stellarly refined) domain the set lives on.
        rounds: the refinement rounds applied (empty if none were needed).
        subcomplex: C as a full subcomplex of `complex` (None when empty).
        components: connected components of C.
        reports: per-component PseudoManifoldReport.
        points: per input map, the exact image point of every domain vertex.
        pairwise: for >2 maps, the consecutive Coin(f_i, f_{i+1}) subcomplexes.
    """

    def __init__(self, maps, complex, rounds, points, subcomplex, pairwise):
        self.maps = maps
        self.complex = complex
        self.rounds = rounds
        self.points = points
        self.subcomplex = subcomplex
        self.pairwise = pairwise
        self.components = subcomplex.components() if subcomplex else []
        from .complexes import pseudo_manifold_report

        self.reports = []
        for comp in self.components:
            comp_cx, _ = comp.as_complex()
            self.reports.append(pseudo_manifold_report(comp_cx))

    @property
    def is_empty(self):
        return self.subcomplex is None

    def component_kind(self, idx) -> str:
        comp = self.components[idx]
        if comp.simps[0] and len(comp.simps) == 1 and len(comp.simps[0]) == 1:
            return "isolated"
        report = self.reports[idx]
        if report.is_closed_pseudo_manifold and report.orientable:
            return "pseudo-manifold"
        return "unsupported"

    def collapse_chain(self, p, chain):
        """Transport a p-chain on `complex` back to the original domain."""
        for rnd in reversed(self.rounds):
            chain = rnd.collapse.push_chain(p, chain)
        return chain


def _offending_faces(cx, diffs):
    """Faces whose open interior contains a coincidence-polytope vertex.

    Keys are the label tuples of the faces to subdivide; values are the
    barycentric weights of the (unique) solution point in that open face, so
    the refinement can drop the new vertex exactly onto the coincidence set.
    When two difference maps vanish at distinct points of the same open face
    one of them wins; the other is picked up again on the next round.
    """
    faces = {}
    for t in cx.top_simplices:
        verts = cx.labels(t)
        for q in diffs:
            pts = [q[v] for v in verts]
            J = {idx for idx, p in enumerate(pts) if not any(p)}
            for support, lam in simplex_zero_polytope_vertices(pts):
                if set(support) <= J:
                    continue  # already spanned by coincident vertices
                key = tuple(verts[i] for i in support)
                faces.setdefault(key, {verts[i]: w for i, w in lam.items()})
    return faces


def coincidence_set(*pl_maps, subdiv_bound: int = 3) -> CoincidenceSet:
    """Coin(f_1, ..., f_p) with exact affine solves and bounded refinement."""
    if len(pl_maps) < 2:
        raise InputError("need at least two maps")
    first = pl_maps[0]
    for pl in pl_maps[1:]:
        if pl.domain is not first.domain:
            raise InputError("maps must share one domain triangulation")
        if pl.geometry.realization is not first.geometry.realization:
            raise InputError(
                "maps must share one codomain realization (g - f needs it)"
            )
    cx = first.domain
    points = [
        {v: pl.vertex_image_point(v) for v in cx.verts} for pl in pl_maps
    ]
    rounds = []
    for round_no in range(subdiv_bound + 1):
        diffs = [
            {v: _vec_sub(points[i + 1][v], points[i][v]) for v in cx.verts}
            for i in range(len(points) - 1)
        ]
        offenders = _offending_faces(cx, diffs)
        if not offenders:
            break
        if round_no == subdiv_bound:
            labels = sorted(offenders)[:3]
            raise PreconditionError(
                f"coincidence set still not simplicial after {subdiv_bound} "
                f"refinement rounds; offending faces include {labels!r} — "
                "refine the input triangulation near them"
            )
        rnd = StellarRound(
            cx, [cx.simplex_of_labels(key) for key in offenders]
        )
        rounds.append(rnd)
        new_points = []
        for pdict in points:
            out = {}
            for v in rnd.complex.verts:
                if v in pdict:
                    out[v] = pdict[v]
                else:
                    # a cone label ('c', parent labels); the new vertex sits
                    # at the solution point of its face, where the map's
                    # affine value is this weighted combination
                    weights = offenders[v[1]]
                    out[v] = tuple(
                        sum(w * x for (u, w), x in zip(weights.items(), col))
                        for col in zip(*[pdict[u] for u in weights])
                    )
            new_points.append(out)
        cx = rnd.complex
        points = new_points

    coincident = [
        v
        for v in cx.verts
        if all(points[0][v] == pdict[v] for pdict in points[1:])
    ]
    sub = _full_subcomplex_on(cx, coincident, name="Coin")
    pairwise = []
    if len(pl_maps) > 2:
        for i in range(len(pl_maps) - 1):
            vs = [v for v in cx.verts if points[i][v] == points[i + 1][v]]
            pairwise.append(
                _full_subcomplex_on(cx, vs, name=f"Coin_{i}{i + 1}")
            )
    return CoincidenceSet(pl_maps, cx, rounds, points, sub, pairwise)


def _full_subcomplex_on(cx, vertex_labels, name):
    if not vertex_labels:
        return None
    keep = {cx.position[v] for v in vertex_labels}
    levels = []
    for level in cx.simplices:
        kept = [t for t in level if all(i in keep for i in t)]
        levels.append(kept)
    while levels and not levels[-1]:
        levels.pop()
    return Subcomplex(cx, levels, name=name)


# ---------------------------------------------------------------------------
# local degrees


def local_degree(
    ctx: DualityContext,
    f: PLMap,
    g: PLMap,
    s,
    points_f=None,
    points_g=None,
) -> int:
    """deg((g-f) restricted to the dual cell of s), by signed ray crossings.

    `s` is a simplex (position tuple) of ctx.complex of dimension m-n; its
    dual cell is an n-ball whose boundary sphere must avoid the coincidence
    set.  `points_f`/`points_g` supply exact vertex image points when the
    context complex is a refinement of the maps' original domain.
    """
    cx = ctx.complex
    geometry = f.geometry
    N = geometry.complex
    n = N.dim
    if len(s) - 1 != ctx.m - n:
        raise InputError(
            f"dual cell of a {len(s) - 1}-simplex has dimension "
            f"{ctx.m - len(s) + 1}, want the chart dimension {n}"
        )
    if points_f is None:
        points_f = {v: f.vertex_image_point(v) for v in cx.verts}
    if points_g is None:
        points_g = {v: g.vertex_image_point(v) for v in cx.verts}

    def image_point(points, t):
        return _vec_avg([points[cx.verts[i]] for i in t])

    center = image_point(points_f, s)
    if center != image_point(points_g, s):
        raise PreconditionError(
            f"{cx.labels(s)!r} is not inside the coincidence set"
        )
    carrier = geometry.realization.carrier(center)
    chart = geometry.chart_covering_star(carrier)

    facets = []
    for F in ctx.complete_flags_from(s):
        coeff = ctx.flag_sign(F)
        pts = []
        for t in F[1:]:
            h = _vec_sub(
                chart.apply(image_point(points_g, t)),
                chart.apply(image_point(points_f, t)),
            )
            pts.append(h)
        if simplex_hits_zero(pts):
            raise PreconditionError(
                f"the boundary of the dual cell of {cx.labels(s)!r} touches "
                "the coincidence set; refine the triangulation around it"
            )
        facets.append((coeff, pts))
    # flag_sign orients dual cells by the cap-product normalization (what
    # Poincare duality pins down); the transverse degree is classically taken
    # against the product convention or(cell) ^ or(simplex) = or(M), and the
    # two differ by the block swap (-1)^{d n}.  Invisible for isolated
    # points, where d = 0.
    d = len(s) - 1
    sign = -1 if (d * n) % 2 else 1
    return sign * winding_degree(facets, n)
