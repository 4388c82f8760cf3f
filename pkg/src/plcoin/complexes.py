"""Finite oriented simplicial complexes and simplicial maps.

A complex is stored combinatorially: an ordered vertex list and, for each
dimension, the sorted list of simplices, each simplex a strictly increasing
tuple of vertex positions.  The vertex order is part of the structure — it
fixes the sign conventions of every boundary matrix, cup product and
subdivision operator downstream, which is why reordering vertices is an
explicit operation returning an isomorphism rather than something done on
the fly.

Simplices are oriented by their ascending vertex tuple.  A closed manifold
(or, more generally, a closed pseudo-manifold) additionally carries a
coherent system of signs on its top simplices; `orient()` computes one by
propagating across shared ridges and fails loudly on non-orientable input.

The module also provides the two subdivision operators used elsewhere
(barycentric, and stellar at a chosen set of simplices), both with chain maps
in the refining direction and a simplicial collapse back to the base, and the
staircase triangulation of a product of two complexes, together with graphs
and diagonals as full subcomplexes of such products.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import InputError, PreconditionError
from .snf import IntMatrix


def sort_with_sign(seq):
    """Sort a sequence, returning (tuple, permutation sign); sign 0 on repeats.

    >>> sort_with_sign((3, 1, 2))
    ((1, 2, 3), 1)
    >>> sort_with_sign((2, 1))
    ((1, 2), -1)
    >>> sort_with_sign((1, 1))
    ((1, 1), 0)
    """
    items = list(seq)
    sign = 1
    # insertion sort; the inputs are tiny (simplex dimension + 1)
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return tuple(items), 0
    return tuple(items), sign


def incidence_sign(t, s) -> int:
    """Sign of the facet s in the boundary of t, both ascending tuples."""
    assert len(t) == len(s) + 1
    for i, v in enumerate(t):
        if i >= len(s) or s[i] != v:
            assert s == t[:i] + t[i + 1 :], f"{s} is not a facet of {t}"
            return -1 if i % 2 else 1
    raise AssertionError(f"{s} is not a facet of {t}")


class OrientedComplex:
    """A finite simplicial complex with an ordered vertex set.

    Do not call the constructor directly; use `build_complex`.
    """

    def __init__(self, name, verts, simplices, top_simplices, orientation=None):
        self.name = name
        self.verts = tuple(verts)  # labels, in order
        self.position = {v: i for i, v in enumerate(self.verts)}
        self.simplices = simplices  # [dim] -> sorted list of position tuples
        self.index = [
            {s: i for i, s in enumerate(level)} for level in simplices
        ]
        self.top_simplices = top_simplices  # maximal simplices, position tuples
        self.orientation = orientation  # dict top tuple -> +-1, or None
        self._boundary = {}
        self._cofaces = {}

    # -- basic queries ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def f_vector(self):
        return tuple(len(level) for level in self.simplices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * n for p, n in enumerate(self.f_vector()))

    def n_simplices(self, p: int) -> int:
        if 0 <= p < len(self.simplices):
            return len(self.simplices[p])
        return 0

    def has_simplex(self, t) -> bool:
        p = len(t) - 1
        return 0 <= p < len(self.simplices) and t in self.index[p]

    def labels(self, t):
        """Vertex labels of a position tuple."""
        return tuple(self.verts[i] for i in t)

    def simplex_of_labels(self, labels):
        """Ascending position tuple for a collection of vertex labels."""
        try:
            pos = tuple(self.position[v] for v in labels)
        except KeyError as e:
            raise InputError(f"unknown vertex {e.args[0]!r} in {self.name}") from None
        t, sign = sort_with_sign(pos)
        if sign == 0 and len(t) > 1:
            raise InputError(f"repeated vertex in simplex {labels!r}")
        if not self.has_simplex(t):
            raise InputError(f"{labels!r} is not a simplex of {self.name}")
        return t

    # -- boundary structure --------------------------------------------------

    def boundary_matrix(self, p: int) -> IntMatrix:
        """The boundary map C_p -> C_{p-1} in the ascending-tuple bases."""
        if p in self._boundary:
            return self._boundary[p]
        if p <= 0 or p > self.dim:
            mat = IntMatrix(self.n_simplices(p - 1), self.n_simplices(p))
        else:
            entries = {}
            lower = self.index[p - 1]
            for j, t in enumerate(self.simplices[p]):
                for i in range(len(t)):
                    face = t[:i] + t[i + 1 :]
                    entries[(lower[face], j)] = -1 if i % 2 else 1
            mat = IntMatrix.from_entries(
                self.n_simplices(p - 1), self.n_simplices(p), entries
            )
        self._boundary[p] = mat
        return mat

    def coface_tuples(self, t):
        """All simplices of one dimension more containing t."""
        p = len(t) - 1
        if p not in self._cofaces:
            table = {s: [] for s in self.simplices[p]}
            if p + 1 <= self.dim:
                for big in self.simplices[p + 1]:
                    for i in range(len(big)):
                        table[big[:i] + big[i + 1 :]].append(big)
            self._cofaces[p] = table
        return self._cofaces[p][t]

    def star_tops(self, t):
        """Maximal simplices containing t."""
        out = []
        for big in self.top_simplices:
            if set(t) <= set(big):
                out.append(big)
        return out

    def link_of_vertex(self, v_label):
        """The link of a vertex, as a list of position tuples of all dims."""
        vpos = self.position[v_label]
        out = []
        for level in self.simplices:
            for t in level:
                if vpos not in t:
                    joined, _ = sort_with_sign(t + (vpos,))
                    if self.has_simplex(joined):
                        out.append(t)
        return out

    def components(self):
        """Connected components, each a sorted tuple of vertex positions."""
        parent = list(range(len(self.verts)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        if len(self.simplices) > 1:
            for a, b in self.simplices[1]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups = {}
        for i in range(len(self.verts)):
            groups.setdefault(find(i), []).append(i)
        return [tuple(sorted(g)) for g in sorted(groups.values())]

    # -- chains ---------------------------------------------------------------

    def chain_of(self, labeled_terms, p=None):
        """Sparse chain {index: coeff} from (labels, coefficient) pairs."""
        out = {}
        for labels, coeff in labeled_terms:
            pos = tuple(self.position[v] for v in labels)
            t, sign = sort_with_sign(pos)
            if sign == 0:
                raise InputError(f"degenerate simplex {labels!r}")
            if p is None:
                p = len(t) - 1
            if len(t) - 1 != p:
                raise InputError("mixed dimensions in chain")
            i = self.index[p][t]
            out[i] = out.get(i, 0) + sign * coeff
        return {i: c for i, c in out.items() if c}

    def chain_terms(self, chain, p):
        """Inverse of chain_of: list of (labels, coefficient), sorted."""
        return [
            (self.labels(self.simplices[p][i]), c)
            for i, c in sorted(chain.items())
        ]

    # -- orientation -----------------------------------------------------------

    def is_pure(self) -> bool:
        return all(len(t) - 1 == self.dim for t in self.top_simplices)

    def orient(self):
        """Compute (and cache) coherent signs on the top simplices.

        Works for any closed pseudo-manifold: each ridge must lie in exactly
        two top simplices, and the propagated signs must be consistent.
        Raises PreconditionError for non-pure, non-closed or non-orientable
        complexes.  The first top simplex of each connected piece (in sorted
        order) receives +1, which makes the result deterministic.
        """
        if self.orientation is not None:
            return self.orientation
        report = pseudo_manifold_report(self)
        if not report.is_closed_pseudo_manifold:
            raise PreconditionError(
                f"{self.name} is not a closed pseudo-manifold: "
                + "; ".join(report.failures)
            )
        if not report.orientable:
            raise PreconditionError(f"{self.name} is not orientable")
        self.orientation = report.orientation
        return self.orientation

    def fundamental_cycle(self):
        """The fundamental cycle, as a chain over the top simplices."""
        orientation = self.orient()
        idx = self.index[self.dim]
        return {idx[t]: s for t, s in orientation.items()}

    def __repr__(self):
        return f"OrientedComplex({self.name!r}, f={self.f_vector()})"


def build_complex(name, tops, vertex_order=None, orientation=None):
    """Build a complex from its maximal simplices (given as label tuples).

    `vertex_order` fixes the order of the vertex set; if omitted the labels
    must be sortable and the sorted order is used.  `orientation`, if given,
    is a list of +-1 aligned with `tops` and is stored for the top simplices
    (the tops must then all have the top dimension).
    """
    tops = [tuple(t) for t in tops]
    if not tops:
        raise InputError("a complex needs at least one simplex")
    seen = set()
    for t in tops:
        if len(set(t)) != len(t):
            raise InputError(f"simplex {t!r} repeats a vertex")
        seen.update(t)
    if vertex_order is None:
        try:
            vertex_order = sorted(seen)
        except TypeError:
            raise InputError(
                "vertex labels are not sortable; pass an explicit vertex_order"
            ) from None
    else:
        vertex_order = list(vertex_order)
        missing = seen - set(vertex_order)
        if missing:
            raise InputError(f"vertex_order is missing {sorted(map(repr, missing))}")
    position = {v: i for i, v in enumerate(vertex_order)}
    if len(position) != len(vertex_order):
        raise InputError("vertex_order repeats a label")

    top_tuples = []
    for t in tops:
        tt, sign = sort_with_sign(tuple(position[v] for v in t))
        top_tuples.append((tt, sign))

    levels: list[set] = [set() for _ in range(max(len(t) for t in tops))]
    for tt, _ in top_tuples:
        for k in range(1, len(tt) + 1):
            for face in combinations(tt, k):
                levels[k - 1].add(face)
    simplices = [sorted(level) for level in levels]

    # A simplex is maximal iff it is nobody's facet (closure fills the gaps).
    non_maximal = [set() for _ in simplices]
    for p in range(1, len(simplices)):
        for big in simplices[p]:
            for i in range(len(big)):
                non_maximal[p - 1].add(big[:i] + big[i + 1 :])
    maximal = sorted(
        (t for p, level in enumerate(simplices) for t in level
         if t not in non_maximal[p]),
        key=lambda t: (len(t), t),
    )

    orient_dict = None
    if orientation is not None:
        if len(orientation) != len(top_tuples):
            raise InputError("orientation list does not match the top simplices")
        orient_dict = {}
        for (tt, sign), s in zip(top_tuples, orientation):
            if s not in (1, -1):
                raise InputError("orientation entries must be +1 or -1")
            if len(tt) != len(simplices):
                raise InputError("oriented top simplices must all have top dimension")
            orient_dict[tt] = sign * s
    return OrientedComplex(name, vertex_order, simplices, maximal, orient_dict)


# ---------------------------------------------------------------------------
# subcomplexes


class Subcomplex:
    """A face-closed set of simplices of a parent complex."""

    def __init__(self, parent, simplices, name=None):
        self.parent = parent
        self.name = name or f"sub({parent.name})"
        self.simps = [sorted(level) for level in simplices]
        self.sets = [set(level) for level in self.simps]
        for p, level in enumerate(self.simps):
            for t in level:
                assert len(t) == p + 1, "simplex filed under the wrong dimension"
                if not parent.has_simplex(t):
                    raise InputError(
                        f"{self.name}: {parent.labels(t)!r} is not in {parent.name}"
                    )
        # face-closedness
        for p in range(1, len(self.simps)):
            for t in self.simps[p]:
                for i in range(len(t)):
                    if t[:i] + t[i + 1 :] not in self.sets[p - 1]:
                        raise InputError(f"{self.name} is not closed under faces")

    @classmethod
    def from_tops(cls, parent, tops_labels, name=None):
        """Subcomplex generated by the given simplices (label tuples)."""
        levels: list[set] = []
        for labels in tops_labels:
            t = parent.simplex_of_labels(labels)
            while len(levels) < len(t):
                levels.append(set())
            for k in range(1, len(t) + 1):
                for face in combinations(t, k):
                    levels[k - 1].add(face)
        return cls(parent, [sorted(l) for l in levels], name=name)

    @classmethod
    def whole(cls, parent):
        return cls(parent, parent.simplices, name=parent.name)

    @property
    def dim(self):
        return len(self.simps) - 1

    def contains(self, t) -> bool:
        p = len(t) - 1
        return p < len(self.sets) and t in self.sets[p]

    def contains_all(self, verts) -> bool:
        return all((v,) in self.sets[0] for v in verts)

    def vertex_positions(self):
        return [t[0] for t in self.simps[0]]

    def is_full(self) -> bool:
        """Is every parent simplex spanned by our vertices already ours?"""
        vs = set(self.vertex_positions())
        for p, level in enumerate(self.parent.simplices):
            for t in level:
                if set(t) <= vs and not self.contains(t):
                    return False
        return True

    def intersection(self, other) -> "Subcomplex":
        assert self.parent is other.parent
        levels = []
        for p in range(min(len(self.simps), len(other.simps))):
            levels.append(sorted(self.sets[p] & other.sets[p]))
        while levels and not levels[-1]:
            levels.pop()
        if not levels:
            raise PreconditionError(
                f"{self.name} and {other.name} have empty intersection"
            )
        return Subcomplex(self.parent, levels, name=f"({self.name}&{other.name})")

    def components(self):
        """Split into connected pieces, each again a Subcomplex."""
        parent_positions = self.vertex_positions()
        rank = {v: v for v in parent_positions}

        def find(x):
            while rank[x] != x:
                rank[x] = rank[rank[x]]
                x = rank[x]
            return x

        if len(self.simps) > 1:
            for a, b in self.simps[1]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    rank[max(ra, rb)] = min(ra, rb)
        buckets = {}
        for v in parent_positions:
            buckets.setdefault(find(v), set()).add(v)
        pieces = []
        for root in sorted(buckets):
            verts = buckets[root]
            levels = [
                [t for t in level if set(t) <= verts] for level in self.simps
            ]
            while levels and not levels[-1]:
                levels.pop()
            pieces.append(
                Subcomplex(self.parent, levels, name=f"{self.name}[{len(pieces)}]")
            )
        return pieces

    def as_complex(self, name=None):
        """Re-index as a standalone complex plus the inclusion map.

        The vertex order is inherited from the parent.
        """
        labels = [self.parent.verts[i] for i in self.vertex_positions()]
        tops = []
        covered = set()
        for p in range(len(self.simps) - 1, -1, -1):
            for t in self.simps[p]:
                if t not in covered:
                    tops.append(tuple(self.parent.verts[i] for i in t))
                    for k in range(1, len(t) + 1):
                        covered.update(combinations(t, k))
        cx = build_complex(name or self.name, tops, vertex_order=labels)
        incl = SimplicialMap(cx, self.parent, {v: v for v in labels})
        return cx, incl

    def include_chain(self, p, chain):
        """Translate a chain indexed by our p-simplices to parent indices."""
        out = {}
        for i, c in chain.items():
            out[self.parent.index[p][self.simps[p][i]]] = c
        return out

    def __repr__(self):
        return f"Subcomplex({self.name!r} < {self.parent.name!r})"


# ---------------------------------------------------------------------------
# pseudo-manifold analysis


class PseudoManifoldReport:
    """What `pseudo_manifold_report` found out about a complex.

    Attributes:
        dim: top dimension examined.
        pure: every maximal simplex has that dimension.
        is_closed_pseudo_manifold: pure, and every ridge lies in exactly two
            top simplices.
        orientable / orientation: a coherent sign system, when one exists.
        irreducible_pieces: partition of the top simplices into classes
            connected through shared ridges.
        failures: human-readable reasons for any False above.
    """

    def __init__(self, dim, pure, ridge_ok, orientable, orientation, pieces, failures):
        self.dim = dim
        self.pure = pure
        self.is_closed_pseudo_manifold = pure and ridge_ok
        self.orientable = orientable
        self.orientation = orientation
        self.irreducible_pieces = pieces
        self.failures = failures


def pseudo_manifold_report(cx) -> PseudoManifoldReport:
    """Analyze a complex (or subcomplex re-indexed via as_complex)."""
    d = cx.dim
    failures = []
    pure = cx.is_pure()
    if not pure:
        small = [cx.labels(t) for t in cx.top_simplices if len(t) - 1 != d]
        failures.append(
            f"not pure of dimension {d}: maximal simplices {small[:4]!r} have lower dimension"
        )

    ridge_ok = True
    tops = [t for t in cx.top_simplices if len(t) - 1 == d]
    cofaces = {}
    if d >= 1:
        for t in tops:
            for i in range(len(t)):
                cofaces.setdefault(t[:i] + t[i + 1 :], []).append((t, -1 if i % 2 else 1))
        for r, hits in sorted(cofaces.items()):
            if len(hits) != 2:
                ridge_ok = False
                failures.append(
                    f"ridge {cx.labels(r)!r} lies in {len(hits)} top simplices (want 2)"
                )
                if len(failures) > 6:
                    break
    # connected pieces through ridges, and orientation propagation
    pieces = []
    orientation = {}
    orientable = pure and ridge_ok
    assigned = {}
    for seed in tops:
        if seed in assigned:
            continue
        piece = []
        stack = [seed]
        assigned[seed] = 1
        while stack:
            t = stack.pop()
            piece.append(t)
            if d == 0:
                continue
            for i in range(len(t)):
                r = t[:i] + t[i + 1 :]
                hits = cofaces.get(r, [])
                if len(hits) != 2:
                    continue
                st = -1 if i % 2 else 1
                for other, so in hits:
                    if other == t:
                        continue
                    want = -assigned[t] * st * so
                    if other in assigned:
                        if assigned[other] != want and orientable:
                            orientable = False
                            failures.append(
                                f"orientation conflict at ridge {cx.labels(r)!r}"
                            )
                    else:
                        assigned[other] = want
                        stack.append(other)
        pieces.append(sorted(piece))
    if orientable:
        orientation = dict(assigned)
    return PseudoManifoldReport(
        d, pure, ridge_ok, orientable, orientation or None, pieces, failures
    )


# ---------------------------------------------------------------------------
# simplicial maps


class SimplicialMap:
    """A simplicial map, given by its effect on vertex labels."""

    def __init__(self, domain, codomain, vertex_map, check=True):
        self.domain = domain
        self.codomain = codomain
        self.vertex_map = dict(vertex_map)
        self._pos_map = {}
        for v in domain.verts:
            if v not in self.vertex_map:
                raise InputError(f"vertex map misses {v!r}")
            w = self.vertex_map[v]
            if w not in codomain.position:
                raise InputError(f"vertex map sends {v!r} to unknown vertex {w!r}")
            self._pos_map[domain.position[v]] = codomain.position[w]
        if check:
            for t in domain.top_simplices:
                image = tuple(sorted(set(self._pos_map[i] for i in t)))
                if not codomain.has_simplex(image):
                    raise InputError(
                        f"map does not send simplex {domain.labels(t)!r} to a "
                        f"simplex of {codomain.name} (image {codomain.labels(image)!r})"
                    )
        self._chain = {}

    def vertex_image(self, t):
        return tuple(self._pos_map[i] for i in t)

    def chain_matrix(self, p: int) -> IntMatrix:
        """The induced map C_p(domain) -> C_p(codomain)."""
        if p in self._chain:
            return self._chain[p]
        entries = {}
        if 0 <= p <= self.domain.dim:
            for j, t in enumerate(self.domain.simplices[p]):
                image, sign = sort_with_sign(self.vertex_image(t))
                if sign:
                    entries[(self.codomain.index[p][image], j)] = sign
        mat = IntMatrix.from_entries(
            self.codomain.n_simplices(p), self.domain.n_simplices(p), entries
        )
        self._chain[p] = mat
        return mat

    def cochain_matrix(self, p: int) -> IntMatrix:
        """The pullback C^p(codomain) -> C^p(domain)."""
        return self.chain_matrix(p).transpose()

    def push_chain(self, p, chain):
        return self.chain_matrix(p).matvec(chain)

    def pull_cochain(self, p, cochain):
        return self.cochain_matrix(p).matvec(cochain)

    def compose(self, earlier: "SimplicialMap") -> "SimplicialMap":
        """self after earlier."""
        assert earlier.codomain is self.domain
        vm = {v: self.vertex_map[w] for v, w in earlier.vertex_map.items()}
        return SimplicialMap(earlier.domain, self.codomain, vm, check=False)

    def __repr__(self):
        return f"SimplicialMap({self.domain.name} -> {self.codomain.name})"


def find_compatible_orders(maps):
    """A domain vertex order making all the given maps monotone, if one exists.

    All maps must share a domain.  Monotone means: whenever two vertices u, v
    span an edge and f(u) precedes f(v) in the codomain's vertex order, u must
    precede v in the returned order.  This is exactly the condition for the
    induced vertex maps into staircase products (graphs of maps, products of
    maps) to be simplicial.  The codomain orders are taken as given; only the
    domain is re-sorted.

    Raises PreconditionError naming an obstructing cycle when no order exists.
    """
    if not maps:
        raise InputError("need at least one map")
    domain = maps[0].domain
    assert all(f.domain is domain for f in maps)
    n = len(domain.verts)
    succ = {i: set() for i in range(n)}
    if domain.dim >= 1:
        for a, b in domain.simplices[1]:
            for f in maps:
                fa, fb = f._pos_map[a], f._pos_map[b]
                if fa < fb:
                    succ[a].add(b)
                elif fb < fa:
                    succ[b].add(a)
    indeg = {i: 0 for i in range(n)}
    for a, outs in succ.items():
        for b in outs:
            indeg[b] += 1
    import heapq

    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(domain.verts[i])
        for b in sorted(succ[i]):
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, b)
    if len(order) < n:
        # find a cycle among the unresolved vertices for the error message;
        # every stuck vertex has a stuck predecessor, so walk backwards
        stuck = {i for i in range(n) if indeg[i] > 0}
        pred = {i: set() for i in stuck}
        for a in stuck:
            for b in succ[a]:
                if b in stuck:
                    pred[b].add(a)
        start = min(stuck)
        path, seen = [start], {start}
        while True:
            nxt = min(pred[path[-1]])
            if nxt in seen:
                cycle = path[path.index(nxt) :] + [nxt]
                labels = [domain.verts[i] for i in reversed(cycle)]
                raise PreconditionError(
                    "no compatible vertex order exists; the maps force the "
                    f"cyclic precedence {labels!r}. Subdividing the domain or "
                    "choosing a different codomain order may resolve this."
                )
            path.append(nxt)
            seen.add(nxt)
    return order


def reorder_vertices(cx, new_order, name=None):
    """The same complex with a new vertex order, plus the relabeling iso.

    Orientations are transported so the identity-on-labels map preserves the
    fundamental cycle.
    """
    if sorted(map(repr, new_order)) != sorted(map(repr, cx.verts)):
        raise InputError("new_order must be a permutation of the vertex labels")
    tops = [cx.labels(t) for t in cx.top_simplices]
    out = build_complex(name or cx.name, tops, vertex_order=new_order)
    if cx.orientation is not None:
        newpos = {v: i for i, v in enumerate(new_order)}
        out.orientation = {}
        for t, s in cx.orientation.items():
            labels = cx.labels(t)
            tt, sign = sort_with_sign(tuple(newpos[v] for v in labels))
            out.orientation[tt] = s * sign
    iso = SimplicialMap(cx, out, {v: v for v in cx.verts}, check=False)
    return out, iso


# ---------------------------------------------------------------------------
# barycentric subdivision


def _sd_sign(p: int) -> int:
    return -1 if (p * (p + 1) // 2) % 2 else 1


class Subdivision:
    """The barycentric subdivision of a complex, with transport operators.

    Vertices of the subdivision are barycenters, one per simplex of the base,
    labeled ('b', base labels) and ordered by (dimension, base tuple); the
    simplices are the flags of the base's face poset.  Three operators travel
    between the two complexes:

      * `refine_chain` — the subdivision chain map C_*(K) -> C_*(Sd K);
      * `collapse` — the last-vertex simplicial map Sd K -> K (a homotopy
        inverse; collapsing after refining is the identity on the nose);
      * vertex positions — each barycenter knows its barycentric coordinates
        inside its carrier simplex, for PL evaluation.
    """

    def __init__(self, base: OrientedComplex):
        self.base = base
        blabel = lambda t: ("b", base.labels(t))
        order = []
        for level in base.simplices:
            for t in level:
                order.append(blabel(t))
        tops = []
        orientation = [] if base.orientation is not None else None
        for top, flag in self._top_flags(base):
            tops.append(tuple(blabel(t) for t in flag))
            if orientation is not None:
                sign = _sd_sign(base.dim) * base.orientation[top]
                for a, b in zip(flag, flag[1:]):
                    sign *= incidence_sign(b, a)
                orientation.append(sign)
        self.complex = build_complex(
            f"sd({base.name})", tops, vertex_order=order, orientation=orientation
        )
        self.barycenter = {}  # base tuple -> Sd vertex position
        self.carrier = {}  # Sd vertex position -> base tuple
        for level in base.simplices:
            for t in level:
                pos = self.complex.position[blabel(t)]
                self.barycenter[t] = pos
                self.carrier[pos] = t
        vm = {}
        for level in base.simplices:
            for t in level:
                vm[blabel(t)] = base.verts[max(t)]
        self.collapse = SimplicialMap(self.complex, base, vm, check=False)
        self._refine = {}

    @staticmethod
    def _top_flags(base):
        """All complete flags ending at a maximal simplex, with that simplex."""
        out = []
        for top in sorted(base.top_simplices, key=lambda t: (len(t), t)):
            stack = [(top,)]
            while stack:
                flag = stack.pop()
                if len(flag[0]) == 1:
                    out.append((top, flag))
                    continue
                t = flag[0]
                for i in range(len(t)):
                    stack.append((t[:i] + t[i + 1 :],) + flag)
        return out

    def vertex_weights(self, sd_vertex_pos):
        """Barycentric coordinates of a subdivision vertex in its carrier."""
        t = self.carrier[sd_vertex_pos]
        w = Fraction(1, len(t))
        return {v: w for v in t}

    def refine_chain(self, p, chain):
        """Push a base chain into the subdivision."""
        if p not in self._refine:
            columns = []
            sign0 = _sd_sign(p)
            for t in self.base.simplices[p]:
                col = {}
                stack = [((t,), 1)]
                while stack:
                    flag, sign = stack.pop()
                    if len(flag[0]) == 1:
                        tup = tuple(self.barycenter[s] for s in flag)
                        idx = self.complex.index[p][tup]
                        col[idx] = col.get(idx, 0) + sign0 * sign
                        continue
                    s = flag[0]
                    for i in range(len(s)):
                        face = s[:i] + s[i + 1 :]
                        stack.append(
                            ((face,) + flag, sign * incidence_sign(s, face))
                        )
                columns.append({k: v for k, v in col.items() if v})
            self._refine[p] = IntMatrix.from_columns(
                self.complex.n_simplices(p), columns
            )
        return self._refine[p].matvec(chain)

    def restrict_cochain(self, p, sd_cochain):
        """Pull a subdivision cochain back along refine_chain (its transpose)."""
        self.refine_chain(p, {})  # ensure the matrix is built
        return self._refine[p].transpose().matvec(sd_cochain)


def subdivide(base: OrientedComplex) -> Subdivision:
    return Subdivision(base)


# ---------------------------------------------------------------------------
# stellar subdivision


class StellarRound:
    """One round of stellar subdivisions at a set of simplices.

    Targets are processed in descending dimension (then lexicographic) order,
    each replaced by the cone over its boundary joined with its link.  The
    round records:

      * `complex` — the refined complex (new barycenter vertices are appended
        to the vertex order, labeled ('c', labels));
      * `collapse` — the simplicial map back to the base sending each new
        vertex to the last vertex of its simplex;
      * `vertex_weights` — barycentric coordinates of every new vertex in its
        base simplex;
      * `refine_chain` — the chain map C_*(base) -> C_*(refined) (sends each
        simplex to the sum of the pieces it was cut into).
    """

    def __init__(self, base: OrientedComplex, targets):
        self.base = base
        targets = sorted(
            {tuple(t) for t in targets}, key=lambda t: (-len(t), t)
        )
        for t in targets:
            if not base.has_simplex(t):
                raise InputError(f"stellar target {base.labels(t)!r} is not a simplex")
            if len(t) == 1:
                raise InputError("cannot stellar-subdivide a vertex")

        # Work with label tuples; positions change as vertices are added.
        tops = {base.labels(t): None for t in base.top_simplices}
        tops = list(tops)
        star_label = lambda t: ("c", t)
        self._new_weights = {}
        for t in targets:
            labels = base.labels(t)
            b = star_label(labels)
            w = Fraction(1, len(labels))
            self._new_weights[b] = {v: w for v in labels}
            replaced = []
            for top in tops:
                if set(labels) <= set(top):
                    rest = tuple(v for v in top if v not in labels)
                    for drop in labels:
                        kept = tuple(v for v in labels if v != drop)
                        replaced.append(kept + rest + (b,))
                else:
                    replaced.append(top)
            tops = replaced
        order = list(base.verts) + [
            star_label(base.labels(t)) for t in targets
        ]
        self.targets = targets
        self.complex = build_complex(f"{base.name}+", tops, vertex_order=order)
        vm = {v: v for v in base.verts}
        for t in targets:
            labels = base.labels(t)
            vm[star_label(labels)] = labels[-1]
        self.collapse = SimplicialMap(self.complex, base, vm, check=False)
        self._piece_cache = {}
        if base.orientation is not None:
            chain = self.refine_chain(base.dim, base.fundamental_cycle())
            self.complex.orientation = {
                self.complex.simplices[base.dim][i]: s for i, s in chain.items()
            }

    def vertex_weights(self, refined_vertex_pos):
        """Coordinates of a refined vertex inside a base simplex (label keyed)."""
        label = self.complex.verts[refined_vertex_pos]
        if label in self._new_weights:
            return dict(self._new_weights[label])
        return {label: Fraction(1)}

    def refine_chain(self, p, chain):
        """Push a base p-chain to the refined complex."""
        out = {}
        for i, c in chain.items():
            for idx, s in self._refine_simplex(p, i).items():
                out[idx] = out.get(idx, 0) + c * s
        return {k: v for k, v in out.items() if v}

    def _refine_simplex(self, p, i):
        key = (p, i)
        if key in self._piece_cache:
            return self._piece_cache[key]
        labels = self.base.labels(self.base.simplices[p][i])
        pieces = [(labels, 1)]
        for t in self.targets:
            tl = set(self.base.labels(t))
            b = ("c", self.base.labels(t))
            next_pieces = []
            for piece, sign in pieces:
                if tl <= set(piece):
                    for drop in piece:
                        if drop not in tl:
                            continue
                        replaced = tuple(b if v == drop else v for v in piece)
                        next_pieces.append((replaced, sign))
                else:
                    next_pieces.append((piece, sign))
            pieces = next_pieces
        out = {}
        for piece, sign in pieces:
            tup, s2 = sort_with_sign(
                tuple(self.complex.position[v] for v in piece)
            )
            assert s2 != 0
            idx = self.complex.index[p][tup]
            out[idx] = out.get(idx, 0) + sign * s2
        out = {k: v for k, v in out.items() if v}
        self._piece_cache[key] = out
        return out


# ---------------------------------------------------------------------------
# staircase products


def _shuffle_sign(moves) -> int:
    """Sign of the (p,q)-shuffle encoded as a sequence of 0 (first factor
    advances) and 1 (second factor advances): parity of the number of pairs
    where a 1 precedes a 0."""
    inversions = 0
    ones = 0
    for m in moves:
        if m:
            ones += 1
        else:
            inversions += ones
    return -1 if inversions % 2 else 1


class ProductComplex(OrientedComplex):
    """The staircase triangulation of a product of two complexes.

    Vertices are pairs (v, w) in lexicographic order; the top simplices over
    a pair of top simplices (sigma, tau) are the monotone grid paths through
    the vertex grid of sigma x tau, oriented by or(sigma) * or(tau) * the
    shuffle sign of the path.  Projections to the factors are simplicial.
    """

    def __init__(self, left: OrientedComplex, right: OrientedComplex, name=None):
        if not (left.is_pure() and right.is_pure()):
            raise PreconditionError(
                "staircase products require pure complexes "
                f"({left.name}: {left.is_pure()}, {right.name}: {right.is_pure()})"
            )
        name = name or f"{left.name}x{right.name}"
        order = [
            (v, w) for v in left.verts for w in right.verts
        ]
        tops = []
        orientation = (
            []
            if (left.orientation is not None and right.orientation is not None)
            else None
        )
        for sigma in left.top_simplices:
            sl = left.labels(sigma)
            for tau in right.top_simplices:
                tl = right.labels(tau)
                p, q = len(sl) - 1, len(tl) - 1
                for moves in _monotone_paths(p, q):
                    i = j = 0
                    path = [(sl[0], tl[0])]
                    for m in moves:
                        if m:
                            j += 1
                        else:
                            i += 1
                        path.append((sl[i], tl[j]))
                    tops.append(tuple(path))
                    if orientation is not None:
                        orientation.append(
                            left.orientation[sigma]
                            * right.orientation[tau]
                            * _shuffle_sign(moves)
                        )
        cx = build_complex(name, tops, vertex_order=order, orientation=orientation)
        super().__init__(cx.name, cx.verts, cx.simplices, cx.top_simplices, cx.orientation)
        self.left = left
        self.right = right
        self.proj_left = SimplicialMap(self, left, {v: v[0] for v in self.verts}, check=False)
        self.proj_right = SimplicialMap(self, right, {v: v[1] for v in self.verts}, check=False)


def _monotone_paths(p, q):
    """All move sequences for monotone paths in a p x q grid, in a fixed order."""
    if p == 0 and q == 0:
        return [()]
    out = []
    for combo in combinations(range(p + q), q):
        moves = [0] * (p + q)
        for c in combo:
            moves[c] = 1
        out.append(tuple(moves))
    return out


def staircase_product(left, right, name=None) -> ProductComplex:
    return ProductComplex(left, right, name=name)


def graph_subcomplex(product: ProductComplex, f: SimplicialMap, name=None):
    """The graph of f: left -> right inside the staircase product, with the
    isomorphism from the domain onto it.

    Requires f to be monotone for the two vertex orders (otherwise the graph
    is not a subcomplex of the staircase triangulation); use
    `find_compatible_orders` + `reorder_vertices` first if it is not.
    """
    left = product.left
    assert f.domain is left and f.codomain is product.right
    for a, b in left.simplices[1] if left.dim >= 1 else []:
        if f._pos_map[a] > f._pos_map[b]:
            raise PreconditionError(
                f"{f!r} is not monotone on edge {left.labels((a, b))!r}; "
                "reorder the domain vertices first (find_compatible_orders)"
            )
    tops = []
    for sigma in left.top_simplices:
        sl = left.labels(sigma)
        tops.append(tuple((v, f.vertex_map[v]) for v in sl))
    sub = Subcomplex.from_tops(product, tops, name=name or f"graph({left.name})")
    vm = {v: (v, f.vertex_map[v]) for v in left.verts}
    onto = SimplicialMap(left, product, vm, check=False)
    return sub, onto


def diagonal_subcomplex(product: ProductComplex, name=None):
    """The diagonal of N x N as a (full) subcomplex, with N -> diagonal map."""
    assert product.left is product.right, "diagonal needs both factors equal"
    ident = SimplicialMap(product.left, product.left,
                          {v: v for v in product.left.verts}, check=False)
    return graph_subcomplex(product, ident, name=name or "diagonal")
