"""Homology groups of the catalog spaces, with sympy rank oracles."""

from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from plcoin import catalog
from plcoin.complexes import SimplicialMap, build_complex, subdivide
from plcoin.errors import InputError
from plcoin.homology import (
    AbelianMorphism,
    all_homology,
    betti_numbers,
    cohomology,
    homology,
    kronecker,
)


def groups(cx):
    return [(h.rank, tuple(h.torsion)) for h in all_homology(cx)]


def test_circle_homology():
    assert groups(catalog.circle(3)) == [(1, ()), (1, ())]
    assert groups(catalog.circle(7)) == [(1, ()), (1, ())]


def test_sphere_homology():
    assert groups(catalog.tetra_sphere()) == [(1, ()), (0, ()), (1, ())]
    assert groups(catalog.octa_sphere()) == [(1, ()), (0, ()), (1, ())]
    assert groups(catalog.suspension_sphere(5)) == [(1, ()), (0, ()), (1, ())]


def test_torus_homology():
    assert groups(catalog.torus()) == [(1, ()), (2, ()), (1, ())]


def test_projective_plane_homology_and_cohomology():
    rp2 = catalog.projective_plane()
    assert groups(rp2) == [(1, ()), (0, (2,)), (0, ())]
    # universal coefficients moves the torsion up one degree
    assert cohomology(rp2, 0).invariants() == (0, 1, ())
    assert cohomology(rp2, 1).invariants() == (1, 0, ())
    assert cohomology(rp2, 2).invariants() == (2, 0, (2,))


def test_product_homology():
    s1xs2 = catalog.circle_cross_sphere()
    assert groups(s1xs2) == [(1, ()), (1, ()), (1, ()), (1, ())]


def test_coordinates_round_trip():
    t2 = catalog.torus()
    h1 = homology(t2, 1)
    assert h1.rank == 2
    for coeffs in [(1, 0), (0, 1), (2, -3)]:
        z = h1.chain_from_coordinates(coeffs)
        assert h1.coordinates(z) == (coeffs, ())
    with pytest.raises(InputError):
        h1.coordinates({0: 1})  # a single edge is not a cycle


def test_torsion_coordinates():
    rp2 = catalog.projective_plane()
    h1 = homology(rp2, 1)
    assert h1.torsion == [2]
    g = h1.generators[0]
    doubled = {k: 2 * v for k, v in g.items()}
    assert h1.coordinates(g) == ((), (1,))
    assert h1.is_zero_class(doubled)


def test_degree_k_circle_map():
    c6 = catalog.circle(6)
    c3 = catalog.circle(3)
    double = SimplicialMap(c6, c3, {i: i % 3 for i in range(6)})
    m = AbelianMorphism.from_chain_map(
        double.chain_matrix(1), homology(c6, 1), homology(c3, 1)
    )
    assert m.free_block() == [[2]]


def test_subdivision_induces_isomorphism():
    t2 = catalog.torus()
    sub = subdivide(t2)
    for p in range(3):
        hp = homology(t2, p)
        hp_sd = homology(sub.complex, p)
        refine = AbelianMorphism.from_chain_map(
            lambda c, p=p: sub.refine_chain(p, c), hp, hp_sd
        )
        collapse = AbelianMorphism.from_chain_map(
            sub.collapse.chain_matrix(p), hp_sd, hp
        )
        assert refine.is_isomorphism()
        assert collapse.is_isomorphism()
        round_trip = collapse.compose(refine)
        for j in range(hp.n_generators):
            free = [1 if i == j else 0 for i in range(hp.rank)]
            tors = [1 if hp.rank + i == j else 0 for i in range(len(hp.torsion))]
            assert round_trip.apply(free, tors) == (tuple(free), tuple(tors))


def test_morphism_solve_and_inverse():
    c6, c3 = catalog.circle(6), catalog.circle(3)
    double = SimplicialMap(c6, c3, {i: i % 3 for i in range(6)})
    m = AbelianMorphism.from_chain_map(
        double.chain_matrix(1), homology(c6, 1), homology(c3, 1)
    )
    assert m.solve((2,)) == ((1,), ())
    assert m.solve((1,)) is None  # degree 2 map misses odd classes
    ident = SimplicialMap(c3, c3, {i: i for i in range(3)})
    im = AbelianMorphism.from_chain_map(ident.chain_matrix(1),
                                        homology(c3, 1), homology(c3, 1))
    assert im.is_isomorphism()
    inv = im.inverse()
    assert inv.apply((5,)) == ((5,), ())


def test_kronecker_pairing_is_perfect_on_torus_free_part():
    t2 = catalog.torus()
    h1 = homology(t2, 1)
    h1_co = cohomology(t2, 1)
    pairing = [
        [kronecker(u, z) for z in h1.generators] for u in h1_co.generators
    ]
    det = (
        pairing[0][0] * pairing[1][1] - pairing[0][1] * pairing[1][0]
    )
    assert det in (1, -1)


simple_complexes = st.lists(
    st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)),
    min_size=1,
    max_size=7,
)


@settings(max_examples=30, deadline=None)
@given(simple_complexes)
def test_random_betti_against_rank_oracle(raw):
    tops = [tuple(sorted({a, b, c})) for a, b, c in raw]
    cx = build_complex("rand", tops)
    betti = betti_numbers(cx)
    for p in range(cx.dim + 1):
        dp = sympy.Matrix(cx.boundary_matrix(p).to_dense()) if cx.n_simplices(p - 1) else None
        rank_p = dp.rank() if dp is not None and dp.rows else 0
        dq = cx.boundary_matrix(p + 1)
        rank_q = sympy.Matrix(dq.to_dense()).rank() if dq.nrows and dq.ncols else 0
        assert betti[p] == cx.n_simplices(p) - rank_p - rank_q
    assert cx.euler_characteristic() == sum(
        (-1) ** p * b for p, b in enumerate(betti)
    )
