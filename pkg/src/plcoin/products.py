"""Cup, cap, and intersection products — global, localized, and along maps.

The cup product is Alexander–Whitney on ascending vertex tuples: front face
times back face.  Capping against the fundamental cycle realizes Poincare
duality as an explicit chain, and `duality_suite` cross-checks that the flag
formula of `DualityContext` computes the same classes (this is the package's
main internal consistency gate, used by tests and the CLI `verify` command).

Intersection products are defined through duality,

    a . b = P(P^{-1} a  cup  P^{-1} b),

with three refinements: localized products for classes supported on full
subcomplexes (computed in the relative flag models, landing in the homology
of the intersection of the supports), products along a map (M ._F c pulls a
dual cohomology class back along F before dualizing again), and the localized
combination of both.  A residue decomposition splits a localized product into
contributions of the connected components of the support and checks that the
pieces add up to the global product.
"""

from __future__ import annotations

from .complexes import Subcomplex, SimplicialMap
from .duality import DualityContext, RelativeModel
from .errors import InputError, PreconditionError
from .homology import kronecker
from .snf import vec_add


# ---------------------------------------------------------------------------
# cup and cap


def cup(cx, p: int, q: int, u: dict, w: dict) -> dict:
    """(u cup w)(sigma) = u(front p-face) * w(back q-face), on p+q simplices."""
    n = p + q
    if n > cx.dim:
        return {}
    front_index = cx.index[p]
    back_index = cx.index[q]
    out = {}
    for i, t in enumerate(cx.simplices[n]):
        a = u.get(front_index[t[: p + 1]], 0)
        if not a:
            continue
        b = w.get(back_index[t[p:]], 0)
        if b:
            out[i] = a * b
    return out


def cap(cx, p: int, u: dict, chain: dict, n: int) -> dict:
    """u cap (n-chain): evaluate u on front faces, keep back (n-p)-faces."""
    assert 0 <= p <= n <= cx.dim
    out: dict = {}
    back_index = cx.index[n - p]
    front_index = cx.index[p]
    for i, c in chain.items():
        t = cx.simplices[n][i]
        a = u.get(front_index[t[: p + 1]], 0)
        if not a:
            continue
        j = back_index[t[p:]]
        v = out.get(j, 0) + c * a
        if v:
            out[j] = v
        else:
            del out[j]
    return out


def cup_on_flags(model_target: RelativeModel, p: int, q: int,
                 u_by_flag: dict, v_by_flag: dict) -> dict:
    """Front/back cup product in the flag models.

    u and v are flag-keyed cochains (supported on the stars of S1 and S2);
    the result is indexed by the (p+q)-flags of the target model, whose
    support is S1 & S2 — front faces of its flags automatically lie in the
    star of S1 and back faces are looked up with zero-extension.
    """
    out = {}
    for i, F in enumerate(model_target.flags[p + q]):
        a = u_by_flag.get(F[: p + 1], 0)
        if not a:
            continue
        b = v_by_flag.get(F[p:], 0)
        if b:
            out[i] = a * b
    return out


# ---------------------------------------------------------------------------
# intersection products


def intersect(ctx: DualityContext, a: dict, r: int, b: dict, s: int) -> dict:
    """The intersection product of an r-cycle and an s-cycle on K.

    Returns an (r+s-m)-chain; zero when r+s < m (nothing to intersect in).
    """
    m = ctx.m
    if r + s < m:
        return {}
    p, q = m - r, m - s
    ua = ctx.cohomology(p).chain_from_coordinates(
        *ctx.poincare_inverse_coords(a, p)
    )
    ub = ctx.cohomology(q).chain_from_coordinates(
        *ctx.poincare_inverse_coords(b, q)
    )
    return ctx.poincare_chain(cup(ctx.complex, p, q, ua, ub), p + q)


def intersect_with_map(ctx_dom: DualityContext, ctx_cod: DualityContext,
                       F: SimplicialMap, c: dict, c_dim: int) -> dict:
    """M ._F c = P_M(F^*(P_W^{-1} c)) for F: M -> W and an c_dim-cycle c on W."""
    p = ctx_cod.m - c_dim
    if p > ctx_dom.m:
        return {}
    u = ctx_cod.cohomology(p).chain_from_coordinates(
        *ctx_cod.poincare_inverse_coords(c, p)
    )
    return ctx_dom.poincare_chain(F.pull_cochain(p, u), p)


class LocalizedProduct:
    """A localized intersection: a class on the support, plus bookkeeping."""

    def __init__(self, support, model, degree, cocycle_by_flag, chain_on_support):
        self.support = support
        self.model = model
        self.degree = degree  # homological degree of the localized class
        self.cocycle_by_flag = cocycle_by_flag
        self.chain_on_support = chain_on_support

    def included_chain(self) -> dict:
        return self.support.include_chain(self.degree, self.chain_on_support)

    def support_coords(self):
        return self.model.support_homology(self.degree).coordinates(
            self.chain_on_support
        )


def _flag_keyed(model: RelativeModel, u: dict, p: int) -> dict:
    return {model.flags[p][j]: c for j, c in u.items()}


def localized_intersection(ctx: DualityContext,
                           model1: RelativeModel, a: dict, r: int,
                           model2: RelativeModel, b: dict, s: int,
                           target_model: RelativeModel | None = None
                           ) -> LocalizedProduct:
    """(a . b)_S for cycles a on S1, b on S2, landing on S = S1 & S2.

    `a` and `b` are chains in the supports' own indexing (Subcomplex.simps).
    """
    m = ctx.m
    p, q = m - r, m - s
    u = model1.from_support_chain(a, p)
    v = model2.from_support_chain(b, q)
    S = model1.support.intersection(model2.support)
    model = target_model or RelativeModel(ctx, S)
    w = cup_on_flags(model, p, q,
                     _flag_keyed(model1, u, p), _flag_keyed(model2, v, q))
    assert model.delta(p + q).matvec(w) == {}, "localized cup is not a cocycle"
    z = model.to_support_chain(w, p + q)
    return LocalizedProduct(model.support, model, m - p - q,
                            _flag_keyed(model, w, p + q), z)


def localized_intersection_with_map(
    ctx_dom: DualityContext, F: SimplicialMap,
    model_cod: RelativeModel, c: dict, c_dim: int,
    target_model: RelativeModel | None = None,
) -> LocalizedProduct:
    """M ._{F, S} c for c supported on a full S~ in the codomain of F.

    The support of the result is S = F^{-1}(S~), always full; the cochain is
    pulled back along the subdivision of F (flags map to image flags, with
    degenerate images dropping out).
    """
    p = model_cod.ctx.m - c_dim
    u = model_cod.from_support_chain(c, p)
    u_by_flag = _flag_keyed(model_cod, u, p)
    S = preimage_subcomplex(F, model_cod.support)
    model = target_model or RelativeModel(ctx_dom, S)
    pulled = {}
    for j, G in enumerate(model.flags[p]):
        image = []
        degenerate = False
        for t in G:
            ft = tuple(sorted(set(F.vertex_image(t))))
            if image and len(ft) == len(image[-1]):
                degenerate = True
                break
            image.append(ft)
        if degenerate:
            continue
        val = u_by_flag.get(tuple(image), 0)
        if val:
            pulled[j] = val
    assert model.delta(p).matvec(pulled) == {}, "pulled cocycle is not a cocycle"
    z = model.to_support_chain(pulled, p)
    return LocalizedProduct(model.support, model, ctx_dom.m - p,
                            _flag_keyed(model, pulled, p), z)


def preimage_subcomplex(F: SimplicialMap, S: Subcomplex) -> Subcomplex:
    """F^{-1}(S) as a subcomplex of the domain of F."""
    assert S.parent is F.codomain
    dom = F.domain
    levels = []
    for level in dom.simplices:
        kept = []
        for t in level:
            img = tuple(sorted(set(F.vertex_image(t))))
            if S.contains(img):
                kept.append(t)
        levels.append(kept)
    while levels and not levels[-1]:
        levels.pop()
    if not levels or not levels[0]:
        raise PreconditionError(
            f"the preimage of {S.name} under the map is empty"
        )
    return Subcomplex(dom, levels, name=f"preimage({S.name})")


def support_of_chain(cx, chain: dict, dim: int) -> Subcomplex:
    """|c|: the subcomplex generated by the simplices a chain touches."""
    if not chain:
        raise InputError("an empty chain has no support")
    tops = [cx.labels(cx.simplices[dim][k]) for k in sorted(chain)]
    return Subcomplex.from_tops(cx, tops, name="|c|")


def residue_theorem_check(ctx_dom: DualityContext, ctx_cod: DualityContext,
                          F: SimplicialMap, C: dict, c_dim: int) -> dict:
    """Verify M ._F [C] = sum of the residues on the components of F^{-1}|C|.

    Computes the global intersection along F and, independently, the
    localized one on the preimage of the support of C, split over connected
    components.  An empty preimage counts as zero residues.  Returns the
    verdict with both sides' coordinates and the per-component pieces.
    """
    S_tilde = support_of_chain(ctx_cod.complex, C, c_dim)
    model_cod = RelativeModel(ctx_cod, S_tilde)
    pos = {t: i for i, t in enumerate(S_tilde.simps[c_dim])}
    c_sup = {pos[ctx_cod.complex.simplices[c_dim][k]]: v for k, v in C.items()}
    d = ctx_dom.m - (ctx_cod.m - c_dim)
    glob = intersect_with_map(ctx_dom, ctx_cod, F, C, c_dim)
    try:
        loc = localized_intersection_with_map(
            ctx_dom, F, model_cod, c_sup, c_dim
        )
    except PreconditionError:
        pieces, total = [], {}
    else:
        pieces, total = residue_decomposition(ctx_dom, loc)
    H = ctx_dom.homology(d)
    return {
        "ok": H.same_class(total, glob),
        "degree": d,
        "global_coords": H.coordinates(glob),
        "residue_sum_coords": H.coordinates(total),
        "pieces": pieces,
        "global_chain": glob,
        "residue_sum_chain": total,
    }


def residue_decomposition(ctx: DualityContext, loc: LocalizedProduct):
    """Split a localized product over the components of its support.

    Returns (pieces, sum_chain): one LocalizedProduct per connected
    component, and the sum of their included chains, which the residue
    theorem says must be homologous to the globally included class.
    """
    comps = loc.support.components()
    pieces = []
    total: dict = {}
    k = loc.degree
    for S_l in comps:
        model_l = RelativeModel(ctx, S_l)
        w_l = {}
        for j, Fl in enumerate(model_l.flags[ctx.m - k]):
            val = loc.cocycle_by_flag.get(Fl, 0)
            if val:
                w_l[j] = val
        w_by_flag = {model_l.flags[ctx.m - k][j]: c for j, c in w_l.items()}
        z_l = model_l.to_support_chain(w_l, ctx.m - k)
        piece = LocalizedProduct(S_l, model_l, k, w_by_flag, z_l)
        pieces.append(piece)
        total = vec_add(total, piece.included_chain())
    return pieces, total


# ---------------------------------------------------------------------------
# verification suites


def duality_suite(ctx: DualityContext) -> dict:
    """Cross-check the duality machinery on one manifold.

    Checks, per degree p:
      * the flag map P: H^p -> H_{m-p} is an isomorphism (unimodular);
      * P agrees with capping against the fundamental cycle on classes;
      * the pairing identity <c cup a, [M]> = <a, P(c)> on all generator
        pairs (c, a);
    plus, once: P(unit 0-cochain) is exactly the fundamental cycle, and the
    boundary of every dual cell matches the transposed incidence relation.
    """
    K = ctx.complex
    m = ctx.m
    fundamental = K.fundamental_cycle()
    report = {"complex": K.name, "degrees": {}, "unit_is_fundamental": None,
              "dual_boundary_transposed": None, "ok": True}

    unit = {i: 1 for i in range(K.n_simplices(0))}
    report["unit_is_fundamental"] = ctx.poincare_chain(unit, 0) == fundamental

    transposed = True
    for q in range(m):
        for s in K.simplices[q]:
            boundary = ctx.dual_cell_boundary(s)
            expected: dict = {}
            for t in K.coface_tuples(s):
                inc = 0
                for i, v in enumerate(t):
                    if t[:i] + t[i + 1 :] == s:
                        inc = -1 if i % 2 else 1
                        break
                for Fl, c in ctx.dual_cell(t).items():
                    v2 = expected.get(Fl, 0) + inc * c
                    if v2:
                        expected[Fl] = v2
                    else:
                        expected.pop(Fl, None)
            if boundary != expected and boundary != {
                k2: -v2 for k2, v2 in expected.items()
            }:
                transposed = False
    report["dual_boundary_transposed"] = transposed

    for p in range(m + 1):
        P = ctx.poincare_morphism(p)
        hco = ctx.cohomology(p)
        hho = ctx.homology(m - p)
        entry = {
            "unimodular": P.is_isomorphism(),
            "cap_agreement": True,
            "pairing": True,
        }
        for u in hco.generators:
            flag_class = hho.coordinates(ctx.poincare_chain(u, p))
            cap_class = hho.coordinates(cap(K, p, u, fundamental, m))
            if flag_class != cap_class:
                entry["cap_agreement"] = False
        partner = ctx.cohomology(m - p)
        for u in hco.generators:
            Pu = ctx.poincare_chain(u, p)
            for a in partner.generators:
                lhs = kronecker(cup(K, p, m - p, u, a), fundamental)
                rhs = kronecker(a, Pu)
                if lhs != rhs:
                    entry["pairing"] = False
        report["degrees"][p] = entry
        if not all(entry.values()):
            report["ok"] = False
    if not (report["unit_is_fundamental"] and transposed):
        report["ok"] = False
    return report


def alexander_square_check(ctx: DualityContext, S: Subcomplex) -> dict:
    """The compatibility square of relative and absolute duality.

    For every degree p and every generator u of H^p(M, M - S):

        P(j^* u)  =  include(A(u))    in H_{m-p}(M),

    where j^* forgets the support and A evaluates on dual cells.  Also
    records whether A is an isomorphism onto H_{m-p}(S) in each degree.
    """
    from .homology import AbelianMorphism

    model = RelativeModel(ctx, S)
    m = ctx.m
    report = {"support": S.name, "degrees": {}, "ok": True}
    for p in range(m + 1):
        rel = model.cohomology_group(p)
        down = model.support_homology(m - p)
        square = True
        for u in rel.generators:
            j_u = model.restrict_to_K_cochain(u, p)
            left = ctx.homology(m - p).coordinates(ctx.poincare_chain(j_u, p))
            z = model.to_support_chain(u, p)
            right = ctx.homology(m - p).coordinates(
                S.include_chain(m - p, z)
            )
            if left != right:
                square = False
        alex = AbelianMorphism.from_chain_map(
            lambda u, p=p: model.to_support_chain(u, p), rel, down
        )
        entry = {"square_commutes": square, "alexander_iso": alex.is_isomorphism()}
        report["degrees"][p] = entry
        if not all(entry.values()):
            report["ok"] = False
    return report
