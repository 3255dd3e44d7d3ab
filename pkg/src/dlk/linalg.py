"""Exact dense linear algebra over the supported rings.

Everything here is exact: Gaussian elimination over the fields, Smith
normal form over the Euclidean domains (Z, any supported field,
Q[z,z^-1]), Bareiss determinants and adjugates over the integral domains,
and Descartes/Sturm-based signature computation for symmetric matrices
with rational (or real-algebraic) entries.

Z[z,z^-1] is not a PID; smith_normal_form refuses it (UnsupportedRing)
and higher layers route acyclicity questions through Q[z,z^-1] plus the
z |-> 1 augmentation, which is the criterion that is valid for the
P-torsion complexes this package works with.
"""

from __future__ import annotations

from fractions import Fraction

from .polynomials import RealAlgebraicField
from .rings import LaurentPolynomial, Ring, UnsupportedRing, ZZ, QQ, Q_LAURENT, Z_LAURENT


class NotSymmetric(ValueError):
    pass


class ExactMatrix:
    """Immutable dense matrix over a supported exact ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, entries, rows=None, cols=None):
        if rows is None:
            rows = len(entries)
            cols = len(entries[0]) if rows else 0
        data = tuple(
            tuple(ring.coerce(entries[i][j]) for j in range(cols)) for i in range(rows)
        )
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", data)

    def __setattr__(self, *a):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zeros(ring, rows, cols):
        z = ring.zero
        return ExactMatrix(ring, [[z] * cols for _ in range(rows)], rows, cols)

    @staticmethod
    def identity(ring, n):
        z, o = ring.zero, ring.one
        return ExactMatrix(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n, n)

    @staticmethod
    def diag(ring, values):
        n = len(values)
        z = ring.zero
        return ExactMatrix(
            ring, [[values[i] if i == j else z for j in range(n)] for i in range(n)], n, n
        )

    @staticmethod
    def block(ring, grid):
        """Assemble from a grid (list of lists) of matrices/None."""
        row_h = [None] * len(grid)
        col_w = [None] * (len(grid[0]) if grid else 0)
        for i, row in enumerate(grid):
            for j, m in enumerate(row):
                if m is not None:
                    if row_h[i] is None:
                        row_h[i] = m.rows
                    if col_w[j] is None:
                        col_w[j] = m.cols
                    assert m.rows == row_h[i] and m.cols == col_w[j]
        row_h = [h or 0 for h in row_h]
        col_w = [w or 0 for w in col_w]
        out = []
        for i, row in enumerate(grid):
            for r in range(row_h[i]):
                line = []
                for j, m in enumerate(row):
                    if m is None:
                        line.extend([ring.zero] * col_w[j])
                    else:
                        line.extend(m.entries[r])
                out.append(line)
        return ExactMatrix(ring, out, sum(row_h), sum(col_w))

    # -- basics ---------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def is_zero(self):
        R = self.ring
        return all(R.is_zero(e) for row in self.entries for e in row)

    def is_square(self):
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols) or self.ring != other.ring:
            return False
        R = self.ring
        return all(
            R.eq(self.entries[i][j], other.entries[i][j])
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols))

    def __add__(self, other):
        R = self.ring
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return ExactMatrix(
            R,
            [
                [R.add(self.entries[i][j], other.entries[i][j]) for j in range(self.cols)]
                for i in range(self.rows)
            ],
            self.rows,
            self.cols,
        )

    def __neg__(self):
        R = self.ring
        return ExactMatrix(
            R,
            [[R.neg(e) for e in row] for row in self.entries],
            self.rows,
            self.cols,
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        R = self.ring
        if isinstance(other, ExactMatrix):
            assert self.cols == other.rows, "shape mismatch %sx%s * %sx%s" % (
                self.rows,
                self.cols,
                other.rows,
                other.cols,
            )
            out = []
            for i in range(self.rows):
                line = []
                for j in range(other.cols):
                    acc = R.zero
                    for k in range(self.cols):
                        a = self.entries[i][k]
                        if not R.is_zero(a):
                            acc = R.add(acc, R.mul(a, other.entries[k][j]))
                    line.append(acc)
                out.append(line)
            return ExactMatrix(R, out, self.rows, other.cols)
        c = R.coerce(other)
        return ExactMatrix(
            R, [[R.mul(c, e) for e in row] for row in self.entries], self.rows, self.cols
        )

    __rmul__ = __mul__

    def transpose(self):
        return ExactMatrix(
            self.ring,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.cols,
            self.rows,
        )

    def conj(self):
        R = self.ring
        return ExactMatrix(
            R, [[R.conj(e) for e in row] for row in self.entries], self.rows, self.cols
        )

    def star(self):
        """Conjugate transpose under the ring involution (the dual map)."""
        return self.conj().transpose()

    def submatrix(self, rows, cols):
        return ExactMatrix(
            self.ring,
            [[self.entries[i][j] for j in cols] for i in rows],
            len(rows),
            len(cols),
        )

    def to_ring(self, ring):
        return ExactMatrix(ring, [[e for e in row] for row in self.entries], self.rows, self.cols)

    def map_entries(self, fn, ring=None):
        R = ring or self.ring
        return ExactMatrix(R, [[fn(e) for e in row] for row in self.entries], self.rows, self.cols)

    def augment_z_to_one(self):
        """Apply z |-> 1 entrywise, landing in Z or Q."""
        assert self.ring.is_laurent
        target = ZZ if self.ring.kind == "IntLaurent" else QQ
        return self.map_entries(
            lambda e: e.eval_at_one() if isinstance(e, LaurentPolynomial) else e, target
        )

    def __repr__(self):
        R = self.ring
        lines = ["[" + ", ".join(R.render(e) for e in row) + "]" for row in self.entries]
        return "Matrix(%s, %dx%d)[%s]" % (R.tag(), self.rows, self.cols, "; ".join(lines))


def direct_sum(*mats):
    ring = mats[0].ring
    grid = []
    for i, m in enumerate(mats):
        grid.append([m if i == j else None for j in range(len(mats))])
    return ExactMatrix.block(ring, grid)


# ---------------------------------------------------------------------------
# Field elimination


def rref(M: ExactMatrix):
    """Reduced row echelon form over a field: returns (R, pivots, U) with
    U*M = R and U invertible."""
    R = M.ring
    assert R.is_field
    a = [list(row) for row in M.entries]
    u = [[R.one if i == j else R.zero for j in range(M.rows)] for i in range(M.rows)]
    pivots = []
    r = 0
    for c in range(M.cols):
        piv = None
        for i in range(r, M.rows):
            if not R.is_zero(a[i][c]):
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        u[r], u[piv] = u[piv], u[r]
        inv = R.inv(a[r][c])
        a[r] = [R.mul(inv, x) for x in a[r]]
        u[r] = [R.mul(inv, x) for x in u[r]]
        for i in range(M.rows):
            if i != r and not R.is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [R.sub(a[i][j], R.mul(f, a[r][j])) for j in range(M.cols)]
                u[i] = [R.sub(u[i][j], R.mul(f, u[r][j])) for j in range(M.rows)]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    return (
        ExactMatrix(R, a, M.rows, M.cols),
        pivots,
        ExactMatrix(R, u, M.rows, M.rows),
    )


def rank(M: ExactMatrix):
    R = M.ring
    if R.is_field:
        return len(rref(M)[1])
    if R.kind == "Integers":
        return len(rref(M.to_ring(QQ))[1])
    if R.is_laurent:
        D = snf_diagonal(M.to_ring(Q_LAURENT))
        return sum(1 for d in D if not Q_LAURENT.is_zero(d))
    raise UnsupportedRing(R.tag())


def solve_field(M: ExactMatrix, b: ExactMatrix):
    """One solution of M x = b over a field, or None (b may have many columns)."""
    R = M.ring
    aug = ExactMatrix.block(R, [[M, b]])
    red, pivots, _ = rref(aug)
    # any pivot in the b-part means inconsistency
    for p in pivots:
        if p >= M.cols:
            return None
    x = [[R.zero] * b.cols for _ in range(M.cols)]
    for r, c in enumerate(pivots):
        for j in range(b.cols):
            x[c][j] = red.entries[r][M.cols + j]
    return ExactMatrix(R, x, M.cols, b.cols)


def kernel_field(M: ExactMatrix):
    """Matrix whose columns span ker(M) over a field."""
    R = M.ring
    red, pivots, _ = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    cols = []
    for fc in free:
        v = [R.zero] * M.cols
        v[fc] = R.one
        for r, c in enumerate(pivots):
            v[c] = R.neg(red.entries[r][fc])
        cols.append(v)
    return ExactMatrix(R, [[col[i] for col in cols] for i in range(M.cols)], M.cols, len(cols))


def inverse(M: ExactMatrix):
    R = M.ring
    assert M.is_square()
    if R.is_field:
        red, pivots, U = rref(M)
        if len(pivots) != M.rows:
            raise ZeroDivisionError("singular matrix")
        return U
    # over domains: adjugate / determinant, requiring the determinant be a unit
    d = det(M)
    if not R.is_unit(d):
        raise ZeroDivisionError("determinant %r is not a unit" % (d,))
    return adjugate(M) * R.inv(d)


# ---------------------------------------------------------------------------
# Determinants over integral domains (Bareiss)


def det(M: ExactMatrix):
    R = M.ring
    assert M.is_square()
    n = M.rows
    if n == 0:
        return R.one
    a = [list(row) for row in M.entries]
    sign = 1
    prev = R.one
    for k in range(n - 1):
        if R.is_zero(a[k][k]):
            piv = None
            for i in range(k + 1, n):
                if not R.is_zero(a[i][k]):
                    piv = i
                    break
            if piv is None:
                return R.zero
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = R.sub(R.mul(a[i][j], a[k][k]), R.mul(a[i][k], a[k][j]))
                a[i][j] = R.exact_div(num, prev)
            a[i][k] = R.zero
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return R.neg(d) if sign < 0 else d


def adjugate(M: ExactMatrix):
    """Classical adjugate: adj(M) * M = det(M) * I."""
    R = M.ring
    n = M.rows
    assert M.is_square()
    if n == 0:
        return M
    cof = [[None] * n for _ in range(n)]
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            sub = M.submatrix([r for r in idx if r != i], [c for c in idx if c != j])
            c = det(sub)
            if (i + j) % 2:
                c = R.neg(c)
            cof[j][i] = c  # transpose
    return ExactMatrix(R, cof, n, n)


# ---------------------------------------------------------------------------
# Smith normal form over Euclidean domains


def smith_normal_form(M: ExactMatrix):
    """U, D, V with U*M*V = D diagonal, d1 | d2 | ..., U, V invertible.

    Supported over Z, the fields, and Q[z,z^-1]; raises UnsupportedRing for
    Z[z,z^-1] (callers route through Q[z,z^-1] plus integral checks).
    Pivot choice: minimal Euclidean size, row-major tie break.
    """
    R = M.ring
    if not R.is_euclidean:
        raise UnsupportedRing("no Smith normal form over %s" % R.tag())
    n, m = M.rows, M.cols
    a = [list(row) for row in M.entries]
    u = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
    v = [[R.one if i == j else R.zero for j in range(m)] for i in range(m)]

    def row_op(i1, i2, q):  # row i1 -= q * row i2
        for j in range(m):
            a[i1][j] = R.sub(a[i1][j], R.mul(q, a[i2][j]))
        for j in range(n):
            u[i1][j] = R.sub(u[i1][j], R.mul(q, u[i2][j]))

    def col_op(j1, j2, q):  # col j1 -= q * col j2
        for i in range(n):
            a[i][j1] = R.sub(a[i][j1], R.mul(q, a[i][j2]))
        for i in range(m):
            v[i][j1] = R.sub(v[i][j1], R.mul(q, v[i][j2]))

    def swap_rows(i1, i2):
        a[i1], a[i2] = a[i2], a[i1]
        u[i1], u[i2] = u[i2], u[i1]

    def swap_cols(j1, j2):
        for i in range(n):
            a[i][j1], a[i][j2] = a[i][j2], a[i][j1]
        for i in range(m):
            v[i][j1], v[i][j2] = v[i][j2], v[i][j1]

    def scale_row(i, unit):
        inv = R.inv(unit)
        for j in range(m):
            a[i][j] = R.mul(inv, a[i][j])
        for j in range(n):
            u[i][j] = R.mul(inv, u[i][j])

    for s in range(min(n, m)):
        while True:
            best = None
            size = None
            for i in range(s, n):
                for j in range(s, m):
                    e = a[i][j]
                    if not R.is_zero(e):
                        sz = R.euclidean_size(e)
                        if size is None or sz < size:
                            best, size = (i, j), sz
            if best is None:
                break
            bi, bj = best
            if bi != s:
                swap_rows(s, bi)
            if bj != s:
                swap_cols(s, bj)
            dirty = False
            for i in range(s + 1, n):
                if not R.is_zero(a[i][s]):
                    q, r = R.divmod(a[i][s], a[s][s])
                    row_op(i, s, q)
                    if not R.is_zero(r):
                        dirty = True
            for j in range(s + 1, m):
                if not R.is_zero(a[s][j]):
                    q, r = R.divmod(a[s][j], a[s][s])
                    col_op(j, s, q)
                    if not R.is_zero(r):
                        dirty = True
            if dirty:
                continue
            # pivot now divides its row/column remainders (all zero); ensure it
            # divides the remaining block
            offender = None
            for i in range(s + 1, n):
                for j in range(s + 1, m):
                    if not R.is_zero(a[i][j]) and not R.divides(a[s][s], a[i][j]):
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(s, offender, R.neg(R.one))  # add offending row to pivot row
        # normalize pivot to canonical associate
        if not R.is_zero(a[s][s]):
            unit, _ = R.unit_normalize(a[s][s])
            scale_row(s, unit)

    U = ExactMatrix(R, u, n, n)
    V = ExactMatrix(R, v, m, m)
    D = ExactMatrix(R, a, n, m)
    return U, D, V


def snf_diagonal(M: ExactMatrix):
    _, D, _ = smith_normal_form(M)
    return [D.entries[i][i] for i in range(min(M.rows, M.cols))]


def solve_ring(M: ExactMatrix, b: ExactMatrix):
    """One solution of M x = b over Z / fields / Q[z,z^-1], or None."""
    R = M.ring
    if R.is_field:
        return solve_field(M, b)
    U, D, V = smith_normal_form(M)
    c = U * b
    x = [[R.zero] * b.cols for _ in range(M.cols)]
    for i in range(M.rows):
        di = D.entries[i][i] if i < min(M.rows, M.cols) else R.zero
        for j in range(b.cols):
            ci = c.entries[i][j]
            if R.is_zero(di):
                if not R.is_zero(ci):
                    return None
            else:
                try:
                    x[i][j] = R.exact_div(ci, di)
                except ArithmeticError:
                    return None
    return V * ExactMatrix(R, x, M.cols, b.cols)


def kernel_ring(M: ExactMatrix):
    """Columns spanning ker(M) over Z / fields / Q[z,z^-1]."""
    R = M.ring
    if R.is_field:
        return kernel_field(M)
    U, D, V = smith_normal_form(M)
    k = min(M.rows, M.cols)
    free = [j for j in range(M.cols) if j >= k or R.is_zero(D.entries[j][j])]
    return V.submatrix(range(M.cols), free)


# ---------------------------------------------------------------------------
# Module presentations and homology


class ModulePresentation:
    """Cokernel of `relations` inside a free module of rank `generators`.

    Over a field the relations are reduced to echelon form; over Z and
    Q[z,z^-1] they are in Smith normal form, so equality of presentations
    up to isomorphism is just equality of invariant factors + free rank.
    """

    def __init__(self, generators: int, relations: ExactMatrix):
        self.generators = generators
        self.ring = relations.ring
        assert relations.rows == generators
        R = self.ring
        if R.is_field:
            rk = rank(relations)
            self.invariants = []
            self.free_rank = generators - rk
        else:
            diag = snf_diagonal(relations)
            nonzero = [d for d in diag if not R.is_zero(d)]
            self.invariants = [d for d in nonzero if not R.is_unit(d)]
            self.free_rank = generators - len(nonzero)
        self.relations = relations

    def is_trivial(self):
        return self.free_rank == 0 and not self.invariants

    def iso_invariants(self):
        return (self.free_rank, tuple(self.invariants))

    def isomorphic(self, other):
        if self.ring != other.ring:
            return False
        a, b = self.iso_invariants(), other.iso_invariants()
        if a[0] != b[0] or len(a[1]) != len(b[1]):
            return False
        R = self.ring
        return all(
            R.is_zero(R.sub(x, y)) or R.is_unit(R.exact_div(x, y))
            for x, y in zip(a[1], b[1])
        )

    def __repr__(self):
        R = self.ring
        parts = ["%s" % R.tag()] * 0
        parts += ["free^%d" % self.free_rank] if self.free_rank else []
        parts += ["%s/(%s)" % (R.tag(), R.render(d)) for d in self.invariants]
        return " + ".join(parts) if parts else "0"


def homology_of_maps(d_out: ExactMatrix, d_in: ExactMatrix):
    """Presentation of ker(d_out)/im(d_in); d_out: C_k -> C_{k-1}, d_in: C_{k+1} -> C_k."""
    R = d_out.ring
    if R.kind == "IntLaurent":
        raise UnsupportedRing(
            "homology over Z[z,z^-1] is not supported directly; base-change to "
            "Q[z,z^-1] and check the z->1 augmentation separately"
        )
    K = kernel_ring(d_out)
    if K.cols == 0:
        return ModulePresentation(0, ExactMatrix.zeros(R, 0, 0))
    X = solve_ring(K, d_in) if d_in.cols else ExactMatrix.zeros(R, K.cols, 0)
    assert X is not None, "image does not lie in kernel (d*d != 0?)"
    return ModulePresentation(K.cols, X)


# ---------------------------------------------------------------------------
# Signatures


def charpoly(M: ExactMatrix):
    """Characteristic polynomial det(xI - M) over Q, low degree first.

    Faddeev-LeVerrier recursion; exact over Q.
    """
    assert M.ring in (QQ, ZZ)
    A = M.to_ring(QQ)
    n = A.rows
    R = A.ring
    I = ExactMatrix.identity(R, n)
    coeffs = [Fraction(1)]  # coefficient of x^n
    Maux = I
    for k in range(1, n + 1):
        Mwork = A * Maux
        tr = sum((Mwork.entries[i][i] for i in range(n)), Fraction(0))
        ck = -tr / k
        coeffs.append(ck)
        Maux = Mwork + ck * I
    return list(reversed(coeffs))  # low degree first


def signature(M: ExactMatrix):
    """Signature of a symmetric rational matrix, computed exactly.

    Uses the Descartes rule on the characteristic polynomial, which is
    exact here because all eigenvalues of a symmetric matrix are real.
    """
    R = M.ring
    if R not in (QQ, ZZ):
        raise UnsupportedRing("signature needs rational entries")
    if not M.is_square() or M != M.transpose():
        raise NotSymmetric("matrix is not symmetric")
    if M.rows == 0:
        return 0
    p = charpoly(M)  # low first
    # strip zero roots
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    p = p[i:]
    pos = _descartes(list(reversed(p)))
    neg = _descartes(list(reversed([c * (-1) ** k for k, c in enumerate(p)])))
    return pos - neg


def _descartes(coeffs_high_first):
    signs = [1 if c > 0 else -1 for c in coeffs_high_first if c]
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def signature_algebraic(gram, field: RealAlgebraicField):
    """Signature of a symmetric matrix over a real algebraic field.

    `gram` is a list of lists of field elements.  Recursive congruence
    reduction with exact sign determination at the designated root.
    """
    F = field
    n = len(gram)
    if n == 0:
        return 0
    g = [[gram[i][j] for j in range(n)] for i in range(n)]
    sig = 0
    idx = list(range(n))
    while idx:
        # find nonzero diagonal entry
        piv = None
        for i in idx:
            if not F.is_zero(g[i][i]):
                piv = i
                break
        if piv is None:
            # find off-diagonal nonzero; a hyperbolic plane contributes 0
            pair = None
            for i in idx:
                for j in idx:
                    if i < j and not F.is_zero(g[i][j]):
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                return sig  # remaining block zero
            i, j = pair
            # e_i <- e_i + e_j creates 2*g[i][j] on the diagonal
            for k in idx:
                g[i][k] = F.add(g[i][k], g[j][k])
            for k in idx:
                g[k][i] = F.add(g[k][i], g[k][j])
            piv = i
        d = g[piv][piv]
        sig += F.sign(d)
        dinv = F.inv(d)
        rest = [i for i in idx if i != piv]
        for i in rest:
            f = F.mul(g[i][piv], dinv)
            if not F.is_zero(f):
                for j in rest:
                    g[i][j] = F.sub(g[i][j], F.mul(f, g[piv][j]))
        idx = rest
    return sig
