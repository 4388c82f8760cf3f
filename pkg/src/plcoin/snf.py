"""Exact linear algebra over the integers.

Every homological question this package answers reduces, sooner or later, to
the Smith normal form of an integer matrix: a factorization U*A*V = D with U
and V unimodular and D diagonal with d_1 | d_2 | ... | d_r.  The diagonal
entries describe kernels, images and quotients of maps between free abelian
groups, and the transforms (kept here together with their inverses) convert
between the standard basis and the diagonalizing one, which is what lets us
report explicit generators and solve linear systems over the integers.

All arithmetic is on Python ints, so nothing overflows.  Determinism matters:
generator bases feed directly into reported coordinates, so the pivot rule is
fixed (smallest absolute value, then smallest row index, then smallest column
index) and every iteration runs in sorted order.  The same input produces the
same factorization on every run and every machine.

Matrices are stored sparsely as a dict of nonzero rows, each row a dict of
nonzero entries; vectors are dicts mapping index -> nonzero coefficient.
Boundary matrices of simplicial complexes are very sparse, and the dict
representation keeps the elimination comfortably fast at the sizes this
package meets (a few thousand rows).
"""

from __future__ import annotations


# ---------------------------------------------------------------------------
# sparse vectors


def vec_add(a: dict, b: dict) -> dict:
    """Sum of two sparse vectors, dropping zero entries."""
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def vec_scale(a: dict, c: int) -> dict:
    if c == 0:
        return {}
    return {k: c * v for k, v in a.items()}


def vec_sub(a: dict, b: dict) -> dict:
    return vec_add(a, vec_scale(b, -1))


def vec_dot(a: dict, b: dict) -> int:
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b[k] for k, v in a.items() if k in b)


# ---------------------------------------------------------------------------
# sparse integer matrices


class IntMatrix:
    """A sparse integer matrix: dict of nonzero rows, each a dict col -> value."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    # -- constructors

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: dict) -> "IntMatrix":
        """Build from a dict {(i, j): value}."""
        rows: dict = {}
        for (i, j), v in entries.items():
            if v:
                rows.setdefault(i, {})[j] = v
        return cls(nrows, ncols, rows)

    @classmethod
    def from_dense(cls, dense: list) -> "IntMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if dense else 0
        rows: dict = {}
        for i, drow in enumerate(dense):
            assert len(drow) == ncols, "ragged dense matrix"
            row = {j: v for j, v in enumerate(drow) if v}
            if row:
                rows[i] = row
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: list) -> "IntMatrix":
        """Build from a list of sparse column vectors."""
        rows: dict = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows.setdefault(i, {})[j] = v
        return cls(nrows, len(columns), rows)

    # -- access

    def entry(self, i: int, j: int) -> int:
        return self.rows.get(i, {}).get(j, 0)

    def row(self, i: int) -> dict:
        return dict(self.rows.get(i, {}))

    def column(self, j: int) -> dict:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def nnz(self) -> int:
        return sum(len(row) for row in self.rows.values())

    def is_zero(self) -> bool:
        return all(not row for row in self.rows.values())

    def to_dense(self) -> list:
        return [
            [self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)
        ]

    def copy(self) -> "IntMatrix":
        return IntMatrix(
            self.nrows, self.ncols, {i: dict(row) for i, row in self.rows.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        a = {i: row for i, row in self.rows.items() if row}
        b = {i: row for i, row in other.rows.items() if row}
        return a == b

    def __repr__(self) -> str:
        return f"IntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- algebra

    def transpose(self) -> "IntMatrix":
        rows: dict = {}
        for i, row in self.rows.items():
            for j, v in row.items():
                rows.setdefault(j, {})[i] = v
        return IntMatrix(self.ncols, self.nrows, rows)

    def matvec(self, x: dict) -> dict:
        """Matrix times sparse column vector."""
        out: dict = {}
        for j, c in x.items():
            if not c:
                continue
            assert 0 <= j < self.ncols, "vector index out of range"
            for i, row in self.rows.items():
                v = row.get(j)
                if v:
                    w = out.get(i, 0) + v * c
                    if w:
                        out[i] = w
                    else:
                        del out[i]
        return out

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        assert self.ncols == other.nrows, "shape mismatch"
        rows: dict = {}
        for i, row in self.rows.items():
            acc: dict = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for j, w in orow.items():
                    t = acc.get(j, 0) + v * w
                    if t:
                        acc[j] = t
                    else:
                        del acc[j]
            if acc:
                rows[i] = acc
        return IntMatrix(self.nrows, other.ncols, rows)

    def scaled(self, c: int) -> "IntMatrix":
        if c == 0:
            return IntMatrix(self.nrows, self.ncols)
        return IntMatrix(
            self.nrows,
            self.ncols,
            {i: {j: c * v for j, v in row.items()} for i, row in self.rows.items()},
        )

    def add(self, other: "IntMatrix") -> "IntMatrix":
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        out = self.copy()
        for i, row in other.rows.items():
            orow = out.rows.setdefault(i, {})
            for j, v in row.items():
                w = orow.get(j, 0) + v
                if w:
                    orow[j] = w
                else:
                    orow.pop(j, None)
        return out

    @staticmethod
    def hstack(blocks: list) -> "IntMatrix":
        """Concatenate matrices with equal row counts side by side."""
        assert blocks, "need at least one block"
        nrows = blocks[0].nrows
        assert all(b.nrows == nrows for b in blocks)
        rows: dict = {}
        offset = 0
        for b in blocks:
            for i, row in b.rows.items():
                dst = rows.setdefault(i, {})
                for j, v in row.items():
                    dst[j + offset] = v
            offset += b.ncols
        return IntMatrix(nrows, offset, rows)

    @staticmethod
    def vstack(blocks: list) -> "IntMatrix":
        """Concatenate matrices with equal column counts on top of each other."""
        assert blocks, "need at least one block"
        ncols = blocks[0].ncols
        assert all(b.ncols == ncols for b in blocks)
        rows: dict = {}
        offset = 0
        for b in blocks:
            for i, row in b.rows.items():
                rows[i + offset] = dict(row)
            offset += b.nrows
        return IntMatrix(offset, ncols, rows)


# ---------------------------------------------------------------------------
# Smith normal form


class SmithForm:
    """The factorization U*A*V = D plus enough data to use it.

    `diag` is the full diagonal of D (length min(nrows, ncols)), nonnegative,
    each entry dividing the next, with the zeros trailing.  U, Uinv, V, Vinv
    are unimodular IntMatrix instances with U*Uinv = I and V*Vinv = I.
    """

    def __init__(self, matrix, diag, U, Uinv, V, Vinv):
        self.matrix = matrix
        self.diag = diag
        self.U = U
        self.Uinv = Uinv
        self.V = V
        self.Vinv = Vinv

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)

    def nonzero_diag(self) -> list:
        return [d for d in self.diag if d]

    def solve(self, b: dict) -> dict | None:
        """One solution x of A x = b over the integers, or None.

        The full solution set is x + (integer span of kernel_basis()).
        """
        c = self.U.matvec(b)
        y: dict = {}
        for i, v in c.items():
            if i < len(self.diag) and self.diag[i]:
                q, r = divmod(v, self.diag[i])
                if r:
                    return None
                if q:
                    y[i] = q
            elif v:
                return None
        return self.V.matvec(y)

    def kernel_basis(self) -> list:
        """Basis of the integer kernel of A, as sparse column vectors."""
        r = self.rank
        return [self.V.column(j) for j in range(r, self.matrix.ncols)]

    def in_image(self, b: dict) -> bool:
        return self.solve(b) is not None


def _pivot(rows: dict, t: int):
    """Entry (i, j) with i, j >= t minimizing (abs value, i, j); None if none."""
    best = None
    for i in sorted(rows):
        if i < t:
            continue
        row = rows[i]
        for j in sorted(row):
            if j < t:
                continue
            key = (abs(row[j]), i, j)
            if best is None or key < best:
                best = key
                if key[0] == 1:
                    return best[1], best[2]
    return None if best is None else (best[1], best[2])


class _Eliminator:
    """Row/column reduction engine that mirrors every operation into U and V.

    Row operations on A are row operations on U and inverse column operations
    on Uinv; column operations on A are column operations on V and inverse
    row operations on Vinv.  U and Vinv are stored as dicts of rows, Uinv and
    V as dicts of columns, so that each mirrored operation is cheap.
    """

    def __init__(self, A: IntMatrix):
        self.nrows = A.nrows
        self.ncols = A.ncols
        self.rows = {i: dict(row) for i, row in A.rows.items() if row}
        self.colidx: dict = {}
        for i, row in self.rows.items():
            for j in row:
                self.colidx.setdefault(j, set()).add(i)
        self.U = {i: {i: 1} for i in range(A.nrows)}
        self.Uinv_cols = {i: {i: 1} for i in range(A.nrows)}
        self.V_cols = {j: {j: 1} for j in range(A.ncols)}
        self.Vinv = {j: {j: 1} for j in range(A.ncols)}

    # -- primitive operations on the working matrix

    def _set(self, i: int, j: int, v: int) -> None:
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.colidx.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                self.colidx[j].discard(i)

    @staticmethod
    def _vec_addmul(dst: dict, src: dict, c: int) -> None:
        for k, v in src.items():
            w = dst.get(k, 0) + c * v
            if w:
                dst[k] = w
            else:
                dst.pop(k, None)

    def swap_rows(self, i: int, k: int) -> None:
        if i == k:
            return
        ri = self.rows.pop(i, {})
        rk = self.rows.pop(k, {})
        if rk:
            self.rows[i] = rk
        if ri:
            self.rows[k] = ri
        for j in set(ri) | set(rk):
            s = self.colidx[j]
            ini, ink = i in s, k in s
            s.discard(i)
            s.discard(k)
            if ini:
                s.add(k)
            if ink:
                s.add(i)
        self.U[i], self.U[k] = self.U.pop(k, {}), self.U.pop(i, {})
        self.Uinv_cols[i], self.Uinv_cols[k] = (
            self.Uinv_cols.pop(k, {}),
            self.Uinv_cols.pop(i, {}),
        )

    def swap_cols(self, j: int, k: int) -> None:
        if j == k:
            return
        for i in self.colidx.get(j, set()) | self.colidx.get(k, set()):
            row = self.rows[i]
            vj, vk = row.pop(j, 0), row.pop(k, 0)
            if vk:
                row[j] = vk
            if vj:
                row[k] = vj
        self.colidx[j], self.colidx[k] = (
            self.colidx.pop(k, set()),
            self.colidx.pop(j, set()),
        )
        self.V_cols[j], self.V_cols[k] = self.V_cols.pop(k, {}), self.V_cols.pop(j, {})
        self.Vinv[j], self.Vinv[k] = self.Vinv.pop(k, {}), self.Vinv.pop(j, {})

    def addmul_row(self, i: int, k: int, c: int) -> None:
        """row_i += c * row_k."""
        assert i != k and c
        src = self.rows.get(k, {})
        dst = self.rows.setdefault(i, {})
        for j, v in list(src.items()):
            w = dst.get(j, 0) + c * v
            if w:
                dst[j] = w
                self.colidx.setdefault(j, set()).add(i)
            else:
                dst.pop(j, None)
                self.colidx[j].discard(i)
        self._vec_addmul(self.U.setdefault(i, {}), self.U.get(k, {}), c)
        self._vec_addmul(self.Uinv_cols.setdefault(k, {}), self.Uinv_cols.get(i, {}), -c)

    def addmul_col(self, j: int, k: int, c: int) -> None:
        """col_j += c * col_k."""
        assert j != k and c
        for i in list(self.colidx.get(k, set())):
            row = self.rows[i]
            w = row.get(j, 0) + c * row[k]
            if w:
                row[j] = w
                self.colidx.setdefault(j, set()).add(i)
            else:
                row.pop(j, None)
                self.colidx.get(j, set()).discard(i)
        self._vec_addmul(self.V_cols.setdefault(j, {}), self.V_cols.get(k, {}), c)
        self._vec_addmul(self.Vinv.setdefault(k, {}), self.Vinv.get(j, {}), -c)

    def negate_row(self, i: int) -> None:
        row = self.rows.get(i, {})
        for j in row:
            row[j] = -row[j]
        urow = self.U.get(i, {})
        for j in urow:
            urow[j] = -urow[j]
        ucol = self.Uinv_cols.get(i, {})
        for k in ucol:
            ucol[k] = -ucol[k]


def smith_normal_form(A: IntMatrix, verify: bool = False) -> SmithForm:
    """Smith normal form with unimodular transforms and their inverses.

    Pivoting is deterministic: among candidates, the entry of smallest
    absolute value wins, ties broken by row then column index.  With `verify`
    the factorization identities are re-multiplied and asserted, which is
    quadratic-ish and meant for tests.
    """
    e = _Eliminator(A)
    limit = min(A.nrows, A.ncols)
    t = 0
    while t < limit:
        piv = _pivot(e.rows, t)
        if piv is None:
            break
        while True:
            i, j = piv
            e.swap_rows(t, i)
            e.swap_cols(t, j)
            if e.rows[t][t] < 0:
                e.negate_row(t)
            d = e.rows[t][t]
            dirty = False
            for i in sorted(e.colidx.get(t, set())):
                if i <= t:
                    continue
                q, r = divmod(e.rows[i][t], d)
                if q:
                    e.addmul_row(i, t, -q)
                if r:
                    dirty = True
            if not dirty:
                for j in sorted(e.rows.get(t, {})):
                    if j <= t:
                        continue
                    q, r = divmod(e.rows[t][j], d)
                    if q:
                        e.addmul_col(j, t, -q)
                    if r:
                        dirty = True
            if dirty:
                piv = _pivot(e.rows, t)
                continue
            # row t and column t are clear; force the divisibility chain
            offender = None
            for i in sorted(e.rows):
                if i <= t:
                    continue
                for j in sorted(e.rows[i]):
                    if j <= t:
                        continue
                    if e.rows[i][j] % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            e.addmul_row(t, offender, 1)
            piv = _pivot(e.rows, t)
        t += 1

    diag = [e.rows.get(i, {}).get(i, 0) for i in range(limit)]
    U = IntMatrix(A.nrows, A.nrows, {i: r for i, r in e.U.items() if r})
    Uinv = IntMatrix.from_columns(A.nrows, [e.Uinv_cols.get(i, {}) for i in range(A.nrows)])
    V = IntMatrix.from_columns(A.ncols, [e.V_cols.get(j, {}) for j in range(A.ncols)])
    Vinv = IntMatrix(A.ncols, A.ncols, {j: r for j, r in e.Vinv.items() if r})
    form = SmithForm(A, diag, U, Uinv, V, Vinv)

    if verify:
        D = U.matmul(A).matmul(V)
        for i in range(A.nrows):
            for j, v in D.rows.get(i, {}).items():
                assert i == j and i < limit and v == diag[i], "SNF residue off-diagonal"
        for i in range(limit):
            assert D.entry(i, i) == diag[i]
        assert U.matmul(Uinv) == IntMatrix.identity(A.nrows), "U inverse mismatch"
        assert V.matmul(Vinv) == IntMatrix.identity(A.ncols), "V inverse mismatch"
        for a, b in zip(diag, diag[1:]):
            assert (b == 0) if a == 0 else (b % a == 0), "divisibility chain broken"
    return form


def solve(A: IntMatrix, b: dict) -> dict | None:
    """One-shot integer solve of A x = b; prefer SmithForm.solve for reuse."""
    return smith_normal_form(A).solve(b)


def integer_inverse(A: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular square integer matrix (asserts unimodularity)."""
    assert A.nrows == A.ncols, "inverse of a non-square matrix"
    f = smith_normal_form(A)
    assert all(d == 1 for d in f.diag), "matrix is not unimodular over Z"
    # U A V = I  =>  A^{-1} = V U
    return f.V.matmul(f.U)
