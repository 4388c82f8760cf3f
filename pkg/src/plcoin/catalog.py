"""A small zoo of concrete triangulated manifolds, maps, and charts.

Everything here is hand-sized and exact: circles with n vertices, the
tetrahedral and octahedral spheres, suspensions of circles, the 9-vertex
torus, the 6-vertex projective plane, and staircase products of these.  The
map constructors further down produce the simplicial self/pair maps whose
coincidence theory the test-suite and the `examples` CLI subcommand exercise,
together with rational coordinate realizations of the codomains and the
charts that local degree computations need.

Conventions: the torus uses the "anti-diagonal" triangulation — vertices
(i, j) in Z_3 x Z_3 and, for each grid cell, the two triangles

    {(i,j), (i+1,j), (i,j+1)}   and   {(i+1,j), (i,j+1), (i+1,j+1)}

(indices mod 3).  With this choice the coordinate sums x and x+y are both
monotone along every edge after a suitable reordering, which is what makes
the projection maps of the torus examples simplicial on the nose.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import OrientedComplex, SimplicialMap, build_complex, staircase_product
from .errors import InputError
from .plmaps import Chart, CodomainGeometry, PLMap, Realization, rat_det


def point(name="pt") -> OrientedComplex:
    cx = build_complex(name, [(0,)])
    cx.orientation = {(0,): 1}
    return cx


def segment(name="I") -> OrientedComplex:
    return build_complex(name, [(0, 1)])


def circle(n: int, name=None) -> OrientedComplex:
    """The cycle with vertices 0..n-1 and edges (i, i+1 mod n)."""
    if n < 3:
        raise InputError("a simplicial circle needs at least 3 vertices")
    cx = build_complex(name or f"C{n}", [(i, (i + 1) % n) for i in range(n)])
    cx.orient()
    return cx


def tetra_sphere(name="S2_tetra") -> OrientedComplex:
    """The boundary of the 3-simplex: the smallest sphere."""
    cx = build_complex(name, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    cx.orient()
    return cx


def octa_sphere(name="S2_octa") -> OrientedComplex:
    """The octahedron: vertices +-e_i, eight faces."""
    cx = build_complex(
        name,
        [
            (0, 2, 4), (0, 4, 3), (0, 3, 5), (0, 5, 2),
            (1, 2, 4), (1, 4, 3), (1, 3, 5), (1, 5, 2),
        ],
    )
    cx.orient()
    return cx


def suspension_sphere(k: int, name=None) -> OrientedComplex:
    """The suspension of a k-gon: a sphere with two poles 'N', 'S'.

    Vertex order puts the ring first (0..k-1), then the poles.
    """
    tris = []
    for i in range(k):
        j = (i + 1) % k
        tris.append((i, j, "N"))
        tris.append((i, j, "S"))
    order = list(range(k)) + ["N", "S"]
    cx = build_complex(name or f"S2_susp{k}", tris, vertex_order=order)
    cx.orient()
    return cx


def torus(n: int = 3, name=None) -> OrientedComplex:
    """The n x n anti-diagonal torus (see module docstring); n >= 3."""
    if n < 3:
        raise InputError("an n x n torus grid needs n >= 3")
    tris = []
    for i in range(n):
        for j in range(n):
            a = (i, j)
            b = ((i + 1) % n, j)
            c = (i, (j + 1) % n)
            d = ((i + 1) % n, (j + 1) % n)
            tris.append((a, b, c))
            tris.append((b, c, d))
    cx = build_complex(name or ("T2" if n == 3 else f"T2_{n}"), tris)
    cx.orient()
    return cx


def projective_plane(name="RP2") -> OrientedComplex:
    """The 6-vertex projective plane (antipodal icosahedron quotient)."""
    return build_complex(
        name,
        [
            (1, 2, 4), (1, 2, 6), (1, 3, 4), (1, 3, 5), (1, 5, 6),
            (2, 3, 5), (2, 3, 6), (2, 4, 5), (3, 4, 6), (4, 5, 6),
        ],
    )


def circle_cross_sphere(name="S1xS2") -> OrientedComplex:
    """S^1 x S^2 as the staircase product of a triangle circle and the
    tetrahedral sphere: 36 tetrahedra."""
    return staircase_product(circle(3, "C3"), tetra_sphere(), name=name)


# ---------------------------------------------------------------------------
# codomain geometries
#
# Realizations are exact rational convex polygons (no floating point, so
# regeneration is bit-identical everywhere); charts are linear projections,
# one per vertex star, auto-flipped to be orientation-preserving and then
# validated by CodomainGeometry (nondegeneracy + link winding).

_POLYGONS = {
    3: [(1, 0), (-1, 1), (-1, -1)],
    6: [(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)],
}


def _oriented_chart(realization, orientation, name, matrix, covered):
    """A Chart whose matrix is sign-fixed against the covered orientation."""
    pts = [realization.simplex_points(t) for t in sorted(covered)][0]
    n = len(matrix)

    def chart_det(mat):
        imgs = [
            tuple(sum(a * x for a, x in zip(row, p)) for row in mat) for p in pts
        ]
        frame = [
            [imgs[i + 1][c] - imgs[0][c] for i in range(n)] for c in range(n)
        ]
        return rat_det(frame)

    t0 = sorted(covered)[0]
    if (1 if chart_det(matrix) > 0 else -1) != orientation[t0]:
        matrix = list(matrix[:-1]) + [tuple(-x for x in matrix[-1])]
    return Chart(name, matrix, (0,) * n, covered)


def circle_geometry(n: int) -> CodomainGeometry:
    """The n-gon realization of circle(n) with one chart per vertex star."""
    if n not in _POLYGONS:
        raise InputError(
            f"no built-in realization for a {n}-gon circle; "
            f"supported: {sorted(_POLYGONS)}"
        )
    cx = circle(n)
    pts = _POLYGONS[n]
    realization = Realization(cx, {k: pts[k] for k in range(n)})
    orientation = cx.orient()
    charts = []
    for k in range(n):
        before, after = (k - 1) % n, (k + 1) % n
        tangent = tuple(
            Fraction(a) - Fraction(b) for a, b in zip(pts[after], pts[before])
        )
        covered = {
            cx.simplex_of_labels((before, k)),
            cx.simplex_of_labels((k, after)),
        }
        charts.append(
            _oriented_chart(realization, orientation, f"v{k}", [tangent], covered)
        )
    return CodomainGeometry(realization, charts)


def suspension_geometry(k: int) -> CodomainGeometry:
    """A bipyramid realization of suspension_sphere(k) with pole and ring
    vertex-star charts."""
    if k not in _POLYGONS:
        raise InputError(
            f"no built-in realization for a {k}-gon suspension; "
            f"supported: {sorted(_POLYGONS)}"
        )
    cx = suspension_sphere(k)
    ring = _POLYGONS[k]
    coords = {i: (ring[i][0], ring[i][1], 0) for i in range(k)}
    coords["N"] = (0, 0, 1)
    coords["S"] = (0, 0, -1)
    realization = Realization(cx, coords)
    orientation = cx.orient()
    charts = []
    for pole in ("N", "S"):
        covered = {
            cx.simplex_of_labels((i, (i + 1) % k, pole)) for i in range(k)
        }
        charts.append(
            _oriented_chart(
                realization, orientation, pole,
                [(1, 0, 0), (0, 1, 0)], covered,
            )
        )
    for i in range(k):
        before, after = (i - 1) % k, (i + 1) % k
        tangent = tuple(
            Fraction(a) - Fraction(b) for a, b in zip(ring[after], ring[before])
        )
        covered = {
            cx.simplex_of_labels((before, i, pole))
            for pole in ("N", "S")
        } | {
            cx.simplex_of_labels((i, after, pole))
            for pole in ("N", "S")
        }
        charts.append(
            _oriented_chart(
                realization, orientation, f"r{i}",
                [tangent + (0,), (0, 0, 1)], covered,
            )
        )
    return CodomainGeometry(realization, charts)


# ---------------------------------------------------------------------------
# map examples


class MapExample:
    """A named tuple of simplicial maps with shared domain and realized
    codomain — the raw material every coincidence computation starts from."""

    def __init__(self, name, maps, geometry, params):
        self.name = name
        self.maps = tuple(maps)
        self.geometry = geometry
        self.params = dict(params)

    @property
    def domain(self):
        return self.maps[0].domain

    @property
    def codomain(self):
        return self.geometry.complex

    @property
    def f(self) -> PLMap:
        return self.maps[0]

    @property
    def g(self) -> PLMap:
        return self.maps[1]

    def __repr__(self):
        return f"MapExample({self.name!r}, {len(self.maps)} maps)"


def induced_degree(f: SimplicialMap) -> int:
    """The degree of a map between closed oriented manifolds of equal dim."""
    from .homology import homology

    M, N = f.domain, f.codomain
    if M.dim != N.dim:
        raise InputError("degree needs equal dimensions")
    hN = homology(N, N.dim)
    sign = hN.coordinates(N.fundamental_cycle())[0][0]
    push = f.push_chain(M.dim, M.fundamental_cycle())
    return hN.coordinates(push)[0][0] * sign


def _pin_orientation(M, maps, nominal):
    """Flip or({M}) if needed so the computed degrees match the nominal ones."""
    degs = tuple(induced_degree(f) for f in maps)
    if degs == tuple(nominal):
        return
    if degs == tuple(-d for d in nominal):
        M.orientation = {t: -s for t, s in M.orientation.items()}
        return
    raise InputError(
        f"construction inconsistency: degrees {degs} vs nominal {nominal}"
    )


# frozen vertex patterns; the coincidence sets are by design isolated
# transverse points (pairs of circle/sphere maps) or a single circle (torus)
_CIRCLE_PAIRS = {
    (1, 2): (6, [0, 1, 2, 0, 1, 0], [1, 2, 0, 1, 2, 0]),
    (0, 3): (9, [0] * 9, [k % 3 for k in range(9)]),
    (2, 5): (15, [0, 0, 1, 2, 0, 1, 2] + [0] * 8, [k % 3 for k in range(15)]),
}

_SPHERE_PAIRS = {
    (2, 1): (6, [0, 0, 2, 2, 1, 1]),
    (3, 2): (9, [0, 2, 1, 0, 2, 1, 1, 1, 1]),
}


def circle_pair(a: int, b: int) -> MapExample:
    """Self-coincidence pair on the circle with degrees (a, b); Lef = b - a."""
    if (a, b) not in _CIRCLE_PAIRS:
        raise InputError(
            f"no built-in circle pair for degrees {(a, b)}; "
            f"available: {sorted(_CIRCLE_PAIRS)}"
        )
    n, fpat, gpat = _CIRCLE_PAIRS[(a, b)]
    M = circle(n, name=f"C{n}")
    geometry = circle_geometry(3)
    N = geometry.complex
    f = SimplicialMap(M, N, {k: fpat[k] for k in range(n)})
    g = SimplicialMap(M, N, {k: gpat[k] for k in range(n)})
    _pin_orientation(M, [f, g], (a, b))
    return MapExample(
        f"circle_pair_{a}_{b}",
        [PLMap(f, geometry), PLMap(g, geometry)],
        geometry,
        {"a": a, "b": b},
    )


def sphere_pair(a: int, b: int) -> MapExample:
    """Sphere pair of degrees (a, b): f suspends a degree-a circle map, g is
    a flipped suspension (poles swapped) of a degree-b one, so the
    coincidences sit transversally on the equator; Lef = a + b."""
    if (a, b) not in _SPHERE_PAIRS:
        raise InputError(
            f"no built-in sphere pair for degrees {(a, b)}; "
            f"available: {sorted(_SPHERE_PAIRS)}"
        )
    ring_n, g_ring = _SPHERE_PAIRS[(a, b)]
    M = suspension_sphere(ring_n)
    geometry = suspension_geometry(3)
    N = geometry.complex
    fm = {k: k % 3 for k in range(ring_n)} | {"N": "N", "S": "S"}
    gm = {k: g_ring[k] for k in range(ring_n)} | {"N": "S", "S": "N"}
    f = SimplicialMap(M, N, fm)
    g = SimplicialMap(M, N, gm)
    _pin_orientation(M, [f, g], (a, b))
    return MapExample(
        f"sphere_pair_{a}_{b}",
        [PLMap(f, geometry), PLMap(g, geometry)],
        geometry,
        {"a": a, "b": b},
    )


def torus_pair() -> MapExample:
    """The torus projection pair: f(x, y) = x, g(x, y) = x + y into the
    circle; the coincidence set is the circle y = 0."""
    M = torus(3)
    geometry = circle_geometry(3)
    N = geometry.complex
    f = SimplicialMap(M, N, {(i, j): i for i in range(3) for j in range(3)})
    g = SimplicialMap(
        M, N, {(i, j): (i + j) % 3 for i in range(3) for j in range(3)}
    )
    return MapExample(
        "torus_pair", [PLMap(f, geometry), PLMap(g, geometry)], geometry, {}
    )


def torus_triple() -> MapExample:
    """Three maps of the 6 x 6 torus to the circle — the forms x, y and
    x + y — whose triple coincidence is a single transverse point."""
    M = torus(6)
    geometry = circle_geometry(6)
    N = geometry.complex
    f1 = SimplicialMap(M, N, {(i, j): i for i in range(6) for j in range(6)})
    f2 = SimplicialMap(M, N, {(i, j): j for i in range(6) for j in range(6)})
    f3 = SimplicialMap(
        M, N, {(i, j): (i + j) % 6 for i in range(6) for j in range(6)}
    )
    return MapExample(
        "torus_triple",
        [PLMap(f1, geometry), PLMap(f2, geometry), PLMap(f3, geometry)],
        geometry,
        {},
    )


def antipodal_pair() -> MapExample:
    """Identity vs. the half-turn rotation on the hexagon circle: the
    coincidence set is empty."""
    geometry = circle_geometry(6)
    N = geometry.complex
    f = SimplicialMap(N, N, {k: k for k in range(6)})
    g = SimplicialMap(N, N, {k: (k + 3) % 6 for k in range(6)})
    return MapExample(
        "antipodal_pair", [PLMap(f, geometry), PLMap(g, geometry)], geometry, {}
    )


def winding_pair() -> MapExample:
    """A constant map vs. a double wrap of the hexagonal sphere around the
    north pole star: one isolated coincidence of local degree 2."""
    M = suspension_sphere(6)
    geometry = suspension_geometry(3)
    N = geometry.complex
    f = SimplicialMap(M, N, {v: "N" for v in M.verts})
    g = SimplicialMap(
        M, N, {k: k % 3 for k in range(6)} | {"N": "N", "S": "S"}
    )
    return MapExample(
        "winding_pair", [PLMap(f, geometry), PLMap(g, geometry)], geometry, {}
    )


def circle_map(d: int) -> SimplicialMap:
    """A degree-d circle map onto the triangle circle (d >= 0)."""
    if d < 0:
        raise InputError("use the reflected pair for negative degrees")
    if d == 0:
        M = circle(3, name="C3deg0")
        return SimplicialMap(M, circle(3), {k: 0 for k in range(3)})
    M = circle(3 * d, name=f"C{3 * d}")
    return SimplicialMap(M, circle(3), {k: k % 3 for k in range(3 * d)})
