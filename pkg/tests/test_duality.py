"""Duality: the flag formula, dual cells, relative models, Thom classes."""

import pytest

from plcoin import catalog
from plcoin.complexes import Subcomplex, subdivide
from plcoin.duality import DualityContext, RelativeModel, thom_class
from plcoin.errors import PreconditionError
from plcoin.products import alexander_square_check, duality_suite

MANIFOLDS = [
    catalog.circle(3),
    catalog.circle(6),
    catalog.tetra_sphere(),
    catalog.octa_sphere(),
    catalog.suspension_sphere(4),
    catalog.torus(),
    catalog.circle_cross_sphere(),
]


def row_circle(T2, j=0):
    edges = [
        [T2.verts[i] for i in e]
        for e in T2.simplices[1]
        if len({T2.verts[i][1] for i in e}) == 1
        and T2.verts[next(iter(e))][1] == j
    ]
    return Subcomplex.from_tops(T2, edges, name=f"row{j}")


@pytest.mark.parametrize("cx", MANIFOLDS, ids=lambda c: c.name)
def test_duality_suite(cx):
    report = duality_suite(DualityContext(cx))
    assert report["ok"], report


def test_unit_cochain_dualizes_to_fundamental_cycle_exactly():
    cx = catalog.tetra_sphere()
    ctx = DualityContext(cx)
    unit = {i: 1 for i in range(cx.n_simplices(0))}
    assert ctx.poincare_chain(unit, 0) == cx.fundamental_cycle()


def test_nonorientable_complex_refused():
    with pytest.raises(PreconditionError):
        DualityContext(catalog.projective_plane())


def test_relative_groups_point_in_sphere():
    cx = catalog.tetra_sphere()
    model = RelativeModel(DualityContext(cx), Subcomplex.from_tops(cx, [[0]], name="pt"))
    assert model.cohomology_group(2).invariants() == (2, 1, ())
    assert model.cohomology_group(1).invariants() == (1, 0, ())
    assert model.cohomology_group(0).invariants() == (0, 0, ())


def test_relative_groups_circle_in_torus():
    T2 = catalog.torus()
    model = RelativeModel(DualityContext(T2), row_circle(T2))
    # H^p(T2, T2 - S) is Alexander-dual to H_{2-p}(S1)
    assert model.cohomology_group(1).invariants() == (1, 1, ())
    assert model.cohomology_group(2).invariants() == (2, 1, ())
    assert model.cohomology_group(0).invariants() == (0, 0, ())


@pytest.mark.parametrize(
    "make",
    [
        lambda: (catalog.tetra_sphere(), "pt"),
        lambda: (catalog.torus(), "row"),
    ],
    ids=["pt_in_S2", "circle_in_T2"],
)
def test_alexander_square(make):
    cx, kind = make()
    S = (
        Subcomplex.from_tops(cx, [[0]], name="pt")
        if kind == "pt"
        else row_circle(cx)
    )
    report = alexander_square_check(DualityContext(cx), S)
    assert report["ok"], report


def test_support_solver_round_trip():
    T2 = catalog.torus()
    ctx = DualityContext(T2)
    model = RelativeModel(ctx, row_circle(T2))
    for p in (1, 2):
        group = model.support_homology(2 - p)
        for z in group.generators:
            u = model.from_support_chain(z, p)
            back = model.to_support_chain(u, p)
            assert group.same_class(back, z)


def test_non_full_support_refused_with_advice():
    T2 = catalog.torus()
    ctx = DualityContext(T2)
    bad = Subcomplex.from_tops(T2, [[(0, 0)], [(1, 0)]], name="endpoints")
    assert not bad.is_full()
    with pytest.raises(PreconditionError, match="subdivid"):
        RelativeModel(ctx, bad)


def test_full_subcomplex_of_subdivision_accepted():
    T2 = catalog.torus()
    sd = subdivide(T2)
    K = sd.complex
    # barycentric images of two vertices of one edge: now far apart, full
    tops = [[("b", ((0, 0),))], [("b", ((1, 0),))]]
    S = Subcomplex.from_tops(K, tops, name="sd_endpoints")
    assert S.is_full()
    model = RelativeModel(DualityContext(K), S)
    assert model.cohomology_group(2).invariants() == (2, 2, ())


def test_thom_class_circle_in_torus():
    T2 = catalog.torus()
    ctx = DualityContext(T2)
    S = row_circle(T2)
    tc = thom_class(ctx, S)
    assert tc.degree == 1
    # defining property: evaluating the relative representative on the dual
    # cells of X recovers the fundamental class of X
    model = tc.model
    index = {t: i for i, t in enumerate(S.simps[1])}
    z = {index[t]: v for t, v in tc.cell_values.items()}
    group = model.support_homology(1)
    assert tc.support_class_coords() == group.coordinates(z)
    primed = thom_class(ctx, S, convention="primed", model=model)
    assert primed.sign == -tc.sign  # (-1)^{1*(2-1)}
    assert primed.cell_values == {t: -v for t, v in tc.cell_values.items()}


def test_thom_class_point_in_sphere_conventions_agree():
    cx = catalog.tetra_sphere()
    ctx = DualityContext(cx)
    S = Subcomplex.from_tops(cx, [[2]], name="pt")
    a = thom_class(ctx, S, convention="primary")
    b = thom_class(ctx, S, convention="primed")
    # d(m-d) = 0*(2-0) is even: the two conventions coincide
    assert a.cell_values == b.cell_values


def test_thom_class_refuses_non_pseudo_manifold():
    T2 = catalog.torus()
    ctx = DualityContext(T2)
    # a wedge-like union: two edge-circles sharing one vertex is not a
    # pseudo-manifold (the shared vertex has four incident edges)
    def aligned(e):
        labels = [T2.verts[i] for i in e]
        return (
            len({v[0] for v in labels}) == 1 or len({v[1] for v in labels}) == 1
        )

    keep = {(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)}
    edges = [
        [T2.verts[i] for i in e]
        for e in T2.simplices[1]
        if all(T2.verts[i] in keep for i in e) and aligned(e)
    ]
    wedge = Subcomplex.from_tops(T2, edges, name="wedge")
    with pytest.raises(PreconditionError, match="pseudo-manifold"):
        thom_class(ctx, wedge)
