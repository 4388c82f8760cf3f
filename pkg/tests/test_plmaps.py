"""PL machinery: exact solvers, winding degrees, coincidence sets."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from plcoin import catalog
from plcoin.complexes import SimplicialMap
from plcoin.errors import InputError, PreconditionError
from plcoin.plmaps import (
    Chart,
    CodomainGeometry,
    PLMap,
    coincidence_set,
    rat_det,
    rat_solve,
    simplex_hits_zero,
    simplex_zero_polytope_vertices,
    winding_degree,
)

F = Fraction


# --------------------------------------------------------------------------
# exact linear algebra


def test_rat_solve_known_system():
    rows = [[F(2), F(1)], [F(1), F(-1)]]
    particular, nullspace = rat_solve(rows, [F(3), F(0)])
    assert particular == [F(1), F(1)]
    assert nullspace == []


def test_rat_solve_inconsistent_is_none():
    assert rat_solve([[F(1), F(2)], [F(2), F(4)]], [F(1), F(1)]) is None


def test_rat_solve_underdetermined_reports_nullspace():
    particular, nullspace = rat_solve([[F(1), F(2)]], [F(4)])
    assert particular[0] + 2 * particular[1] == 4
    assert len(nullspace) == 1
    v = nullspace[0]
    assert v[0] + 2 * v[1] == 0 and any(v)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_rat_solve_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    rows = [[F(rng.randint(-5, 5)) for _ in range(n)] for _ in range(n)]
    x = [F(rng.randint(-7, 7), rng.randint(1, 4)) for _ in range(n)]
    rhs = [sum(rows[i][j] * x[j] for j in range(n)) for i in range(n)]
    out = rat_solve([r[:] for r in rows], rhs[:])
    assert out is not None  # rhs is in the image by construction
    particular, nullspace = out
    assert [
        sum(rows[i][j] * particular[j] for j in range(n)) for i in range(n)
    ] == rhs
    for v in nullspace:
        assert all(
            sum(rows[i][j] * v[j] for j in range(n)) == 0 for i in range(n)
        )
    if rat_det([r[:] for r in rows]) != 0:
        assert particular == x and nullspace == []


def test_rat_det_sign_flip():
    rows = [[F(1), F(2)], [F(3), F(4)]]
    assert rat_det([r[:] for r in rows]) == F(-2)
    assert rat_det([rows[1][:], rows[0][:]]) == F(2)


# --------------------------------------------------------------------------
# the zero polytope of a simplex of linear data


def test_segment_crossing_zero():
    # values -1 at one end, +1 at the other: zero at the midpoint
    pts = [(F(-1),), (F(1),)]
    assert simplex_hits_zero(pts)
    verts = simplex_zero_polytope_vertices(pts)
    assert len(verts) == 1
    support, lam = verts[0]
    assert set(support) == {0, 1}
    assert lam == {0: F(1, 2), 1: F(1, 2)}


def test_segment_missing_zero():
    assert not simplex_hits_zero([(F(1),), (F(2),)])
    assert simplex_zero_polytope_vertices([(F(1),), (F(2),)]) == []


def test_triangle_zero_at_vertex():
    pts = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]
    verts = simplex_zero_polytope_vertices(pts)
    assert [(s, lam) for s, lam in verts] == [((0,), {0: F(1)})]


# --------------------------------------------------------------------------
# winding degrees against hand-counted crossings


def square_facets(scale=1, flip=False, shift=(0, 0)):
    a, b = F(shift[0]), F(shift[1])
    s = F(scale)
    corners = [(-s + a, -s + b), (s + a, -s + b), (s + a, s + b),
               (-s + a, s + b)]
    sign = -1 if flip else 1
    return [
        (sign, [corners[i], corners[(i + 1) % 4]]) for i in range(4)
    ]


def test_winding_square_around_origin():
    assert winding_degree(square_facets(), 2) == 1


def test_winding_respects_orientation_and_position():
    assert winding_degree(square_facets(flip=True), 2) == -1
    assert winding_degree(square_facets(shift=(5, 5)), 2) == 0


def test_winding_doubled_cycle():
    facets = square_facets() + square_facets(scale=2)
    assert winding_degree(facets, 2) == 2


def test_winding_interval_boundary():
    # S^0 around the origin in one dimension: right point +, left point -
    facets = [(1, [(F(2),)]), (-1, [(F(-1),)])]
    assert winding_degree(facets, 1) == 1


# --------------------------------------------------------------------------
# geometries and charts


def test_chart_must_be_invertible():
    geo = catalog.circle_geometry(3)
    real = geo.realization
    covered = {real.complex.top_simplices[0]}
    bad = Chart("bad", [[F(0), F(0)]], [F(0)], covered=covered)
    with pytest.raises(InputError, match="degenerate"):
        CodomainGeometry(real, [bad])


def test_every_vertex_star_has_a_chart():
    for geo in (catalog.circle_geometry(3), catalog.suspension_geometry(3)):
        cx = geo.complex
        for t in cx.simplices[0]:
            chart = geo.chart_covering_star(t)
            assert chart.covers_star(cx, t)


# --------------------------------------------------------------------------
# coincidence sets on the catalog


def arc_pair():
    """f = g along an arc of C6, plus one transverse crossing elsewhere."""
    geo = catalog.circle_geometry(3)
    C6 = catalog.circle(6)
    f = PLMap(SimplicialMap(C6, geo.complex,
                            {0: 0, 1: 1, 2: 2, 3: 0, 4: 1, 5: 2}), geo)
    g = PLMap(SimplicialMap(C6, geo.complex,
                            {0: 0, 1: 1, 2: 2, 3: 0, 4: 2, 5: 1}), geo)
    return f, g


def test_circle_pair_point_sits_at_a_vertex():
    ex = catalog.circle_pair(1, 2)
    cs = coincidence_set(ex.f, ex.g)
    assert not cs.rounds
    assert len(cs.components) == 1
    assert cs.component_kind(0) == "isolated"


def test_antipodal_pair_is_empty():
    ex = catalog.antipodal_pair()
    cs = coincidence_set(ex.f, ex.g)
    assert cs.is_empty
    assert cs.subcomplex is None


def test_identity_pair_is_everything():
    geo = catalog.circle_geometry(3)
    ident = PLMap(SimplicialMap(geo.complex, geo.complex,
                                {0: 0, 1: 1, 2: 2}), geo)
    cs = coincidence_set(ident, ident)
    assert len(cs.components) == 1
    assert cs.subcomplex.is_full()
    assert cs.component_kind(0) == "pseudo-manifold"


def test_arc_pair_mixes_kinds():
    f, g = arc_pair()
    cs = coincidence_set(f, g)
    kinds = sorted(cs.component_kind(i) for i in range(len(cs.components)))
    assert kinds == ["isolated", "unsupported"]
    assert len(cs.rounds) == 1  # the crossing lands mid-edge


def test_subdivision_budget_is_respected():
    f, g = arc_pair()
    with pytest.raises(PreconditionError, match="refinement rounds"):
        coincidence_set(f, g, subdiv_bound=0)


def test_maps_must_share_domain():
    geo = catalog.circle_geometry(3)
    a = PLMap(SimplicialMap(catalog.circle(6), geo.complex,
                            {k: k % 3 for k in range(6)}), geo)
    b = PLMap(SimplicialMap(catalog.circle(3, name="other"), geo.complex,
                            {k: k for k in range(3)}), geo)
    with pytest.raises(InputError):
        coincidence_set(a, b)


def test_need_two_maps():
    geo = catalog.circle_geometry(3)
    ident = PLMap(SimplicialMap(geo.complex, geo.complex,
                                {0: 0, 1: 1, 2: 2}), geo)
    with pytest.raises(InputError):
        coincidence_set(ident)
