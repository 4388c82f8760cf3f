"""Homology and cohomology with explicit generators and coordinates.

The central object is `GradedGroup`: one homology (or cohomology) group
H = Z^rank + Z/d_1 + ... + Z/d_t, remembering

  * explicit generating cycles (free generators first, then torsion),
  * how to compute the coordinates of any cycle in that basis,

so that every class this package reports is a concrete integer vector, and
maps between groups become integer matrices (`AbelianMorphism`).  Everything
is exact; the only arithmetic is Smith normal form over Z.

The quotient ker/im is computed in three Smith normal forms: one to find a
kernel basis Z, one to express the incoming boundaries in the coordinates of
Z, and one to diagonalize those relations.  The transforms of the last step
turn kernel coordinates into group coordinates and back.
"""

from __future__ import annotations

from .errors import InputError, PreconditionError
from .snf import IntMatrix, smith_normal_form, vec_dot


def kronecker(cochain: dict, chain: dict) -> int:
    """The evaluation pairing <u, c>."""
    return vec_dot(cochain, chain)


class GradedGroup:
    """A finitely generated abelian group presented by cycles.

    Attributes:
        degree: the degree p this group lives in.
        rank: number of free generators.
        torsion: the orders d_1 | d_2 | ... of the torsion generators (>1).
        generators: sparse cycle vectors, free generators first.
    """

    def __init__(self, degree, ambient_size, Z, Zform, relations_form):
        self.degree = degree
        self.ambient_size = ambient_size
        self._Z = Z  # kernel basis matrix, ambient x k
        self._Zform = Zform  # SmithForm of _Z, for coordinates
        self._rel = relations_form  # SmithForm of relations in kernel coords
        k = Z.ncols
        diag = self._rel.diag
        d = lambda i: diag[i] if i < len(diag) else 0
        self._free_pos = [i for i in range(k) if d(i) == 0]
        self._tors_pos = [i for i in range(k) if d(i) > 1]
        self.rank = len(self._free_pos)
        self.torsion = [d(i) for i in self._tors_pos]
        self.generators = [
            self._Z.matvec(self._rel.Uinv.column(i))
            for i in self._free_pos + self._tors_pos
        ]

    @property
    def n_generators(self):
        return self.rank + len(self.torsion)

    def invariants(self):
        return (self.degree, self.rank, tuple(self.torsion))

    def is_trivial(self):
        return self.n_generators == 0

    def coordinates(self, cycle: dict):
        """Coordinates (free tuple, torsion tuple) of a cycle's class.

        Torsion coordinates are reduced into [0, d_i).  Raises InputError if
        the vector is not a cycle of this group's chain complex.
        """
        y = self._Zform.solve(cycle)
        if y is None:
            raise InputError(f"vector is not a cycle in degree {self.degree}")
        w = self._rel.U.matvec(y)
        free = tuple(w.get(i, 0) for i in self._free_pos)
        tors = tuple(
            w.get(i, 0) % d for i, d in zip(self._tors_pos, self.torsion)
        )
        return free, tors

    def chain_from_coordinates(self, free, tors=()):
        """An explicit cycle with the given coordinates."""
        free = tuple(free)
        tors = tuple(tors)
        assert len(free) == self.rank and len(tors) == len(self.torsion)
        out: dict = {}
        for c, g in zip(free + tors, self.generators):
            if not c:
                continue
            for k, v in g.items():
                w = out.get(k, 0) + c * v
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return out

    def same_class(self, a: dict, b: dict) -> bool:
        return self.coordinates(a) == self.coordinates(b)

    def is_zero_class(self, cycle: dict) -> bool:
        free, tors = self.coordinates(cycle)
        return not any(free) and not any(tors)

    def describe(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"GradedGroup(p={self.degree}, {self.describe()})"


def quotient_group(d_out: IntMatrix, d_in: IntMatrix, degree: int) -> GradedGroup:
    """ker(d_out) / im(d_in), with d_in mapping into d_out's domain."""
    assert d_out.ncols == d_in.nrows, "chain complex shape mismatch"
    out_form = smith_normal_form(d_out)
    Z = IntMatrix.from_columns(d_out.ncols, out_form.kernel_basis())
    Zform = smith_normal_form(Z)
    cols = []
    for j in range(d_in.ncols):
        b = d_in.column(j)
        y = Zform.solve(b)
        assert y is not None, "boundary is not a cycle: d o d != 0?"
        cols.append(y)
    rel = IntMatrix.from_columns(Z.ncols, cols)
    return GradedGroup(degree, d_out.ncols, Z, Zform, smith_normal_form(rel))


def homology(cx, p: int) -> GradedGroup:
    """H_p of a complex (anything with boundary_matrix and n_simplices)."""
    return quotient_group(cx.boundary_matrix(p), cx.boundary_matrix(p + 1), p)


def cohomology(cx, p: int) -> GradedGroup:
    """H^p of a complex; generators are cocycles indexed by p-simplices."""
    delta_up = cx.boundary_matrix(p + 1).transpose()
    delta_dn = cx.boundary_matrix(p).transpose()
    return quotient_group(delta_up, delta_dn, p)


def all_homology(cx):
    return [homology(cx, p) for p in range(cx.dim + 1)]


def betti_numbers(cx):
    return tuple(h.rank for h in all_homology(cx))


class AbelianMorphism:
    """A homomorphism between two GradedGroups as an integer matrix.

    The matrix columns are the coordinates (free stacked over torsion lifts)
    of the images of the source generators.
    """

    def __init__(self, source: GradedGroup, target: GradedGroup, matrix: IntMatrix):
        self.source = source
        self.target = target
        self.matrix = matrix
        assert matrix.nrows == target.n_generators
        assert matrix.ncols == source.n_generators

    @classmethod
    def from_chain_map(cls, push, source: GradedGroup, target: GradedGroup):
        """Build from a function (or IntMatrix) acting on chains."""
        apply = push.matvec if isinstance(push, IntMatrix) else push
        cols = []
        for g in source.generators:
            free, tors = target.coordinates(apply(g))
            col = {i: v for i, v in enumerate(free + tors) if v}
            cols.append(col)
        return cls(source, target, IntMatrix.from_columns(target.n_generators, cols))

    def _stack(self, free, tors):
        return {
            i: v for i, v in enumerate(tuple(free) + tuple(tors)) if v
        }

    def apply(self, free, tors=()):
        """Image coordinates of a source element given by coordinates."""
        y = self.matrix.matvec(self._stack(free, tors))
        nf = self.target.rank
        free_out = tuple(y.get(i, 0) for i in range(nf))
        tors_out = tuple(
            y.get(nf + i, 0) % d for i, d in enumerate(self.target.torsion)
        )
        return free_out, tors_out

    def _relations(self, group: GradedGroup) -> IntMatrix:
        n = group.n_generators
        entries = {}
        for i, d in enumerate(group.torsion):
            entries[(group.rank + i, i)] = d
        return IntMatrix.from_entries(n, len(group.torsion), entries)

    def solve(self, free, tors=()):
        """A preimage (by coordinates) of the given target element, or None."""
        aug = IntMatrix.hstack([self.matrix, self._relations(self.target)])
        sol = smith_normal_form(aug).solve(self._stack(free, tors))
        if sol is None:
            return None
        ns = self.source.n_generators
        free_out = tuple(sol.get(i, 0) for i in range(self.source.rank))
        tors_out = tuple(
            sol.get(self.source.rank + i, 0) % d
            for i, d in enumerate(self.source.torsion)
        )
        return free_out, tors_out

    def is_surjective(self) -> bool:
        aug = IntMatrix.hstack([self.matrix, self._relations(self.target)])
        form = smith_normal_form(aug)
        n = self.target.n_generators
        return form.rank == n and all(d == 1 for d in form.diag[:n])

    def is_isomorphism(self) -> bool:
        """Surjective + identical invariants (f.g. abelian groups are Hopfian)."""
        s, t = self.source, self.target
        return (
            s.rank == t.rank
            and s.torsion == t.torsion
            and self.is_surjective()
        )

    def compose(self, earlier: "AbelianMorphism") -> "AbelianMorphism":
        """self after earlier — with torsion, composition of the coordinate
        matrices is only valid modulo the target relations, which `apply`
        accounts for; we compose by re-applying on generators."""
        assert earlier.target is self.source
        cols = []
        for j in range(earlier.source.n_generators):
            e = {j: 1}
            mid = earlier.matrix.matvec(e)
            nf = earlier.target.rank
            y = self.apply(
                [mid.get(i, 0) for i in range(nf)],
                [mid.get(nf + i, 0) for i in range(len(earlier.target.torsion))],
            )
            cols.append(self._stack(*y))
        return AbelianMorphism(
            earlier.source, self.target,
            IntMatrix.from_columns(self.target.n_generators, cols),
        )

    def inverse(self) -> "AbelianMorphism":
        if not self.is_isomorphism():
            raise PreconditionError("morphism is not an isomorphism")
        cols = []
        n = self.target.n_generators
        for i in range(n):
            free = [1 if j == i else 0 for j in range(self.target.rank)]
            tors = [
                1 if self.target.rank + j == i else 0
                for j in range(len(self.target.torsion))
            ]
            sol = self.solve(free, tors)
            assert sol is not None
            cols.append(self._stack(*sol))
        return AbelianMorphism(
            self.target, self.source,
            IntMatrix.from_columns(self.source.n_generators, cols),
        )

    def free_block(self):
        """The induced matrix on free parts (the rational representation)."""
        return [
            [self.matrix.entry(i, j) for j in range(self.source.rank)]
            for i in range(self.target.rank)
        ]

    def trace_on_free_part(self) -> int:
        assert self.source.rank == self.target.rank, "trace needs equal ranks"
        return sum(self.matrix.entry(i, i) for i in range(self.source.rank))

    def __repr__(self):
        return (
            f"AbelianMorphism({self.source.describe()} -> {self.target.describe()})"
        )
