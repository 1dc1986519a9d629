"""Exact linear algebra over Q and over Z.

Everything downstream (monomial bases, cochain complexes, intertwiner
searches, lattice membership) reduces to the routines here.  All entries are
`fractions.Fraction`; elimination uses leftmost-pivot row reduction with
first-nonzero row selection, so identical inputs always produce identical
outputs.
"""

from __future__ import annotations

from fractions import Fraction


def frac(x) -> Fraction:
    """Coerce an int, Fraction, or 'p/q' string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def frac_str(x: Fraction) -> str:
    """Serialize a Fraction as 'p/q', or 'p' when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Matrix:
    """Immutable dense matrix over Q, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(frac(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [Fraction(int(i == j)) for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @classmethod
    def diagonal(cls, diag) -> "Matrix":
        diag = [frac(d) for d in diag]
        n = len(diag)
        return cls(n, n, [diag[i] if i == j else Fraction(0)
                          for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, vec) -> "Matrix":
        vec = [frac(v) for v in vec]
        return cls(len(vec), 1, vec)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(",".join(frac_str(e) for e in self.row(i))
                         for i in range(self.rows))
        return f"Matrix[{body}]"

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return Matrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "Matrix":
        c = frac(c)
        return Matrix(self.rows, self.cols, [c * a for a in self.entries])

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self.scale(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum((ri[k] * other.entries[k * other.cols + j]
                                for k in range(self.cols)), Fraction(0)))
        return Matrix(self.rows, other.cols, out)

    def __rmul__(self, other):
        return self.scale(other)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [self.entries[i * self.cols + j]
                       for j in range(self.cols) for i in range(self.rows)])

    def apply(self, vec):
        """Matrix times column vector (a sequence), returned as a tuple."""
        vec = [frac(v) for v in vec]
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum((self.row(i)[k] * vec[k] for k in range(self.cols)),
                         Fraction(0)) for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def rref(self):
        """Reduced row echelon form; returns (rref rows, pivot column tuple).

        Pivots are chosen leftmost-first, with the first nonzero row below the
        current one, so the result is reproducible bit for bit.
        """
        rows = self.to_rows()
        n, m = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(m):
            pr = None
            for i in range(r, n):
                if rows[i][c] != 0:
                    pr = i
                    break
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            inv = Fraction(1) / rows[r][c]
            rows[r] = [e * inv for e in rows[r]]
            for i in range(n):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == n:
                break
        return rows, tuple(pivots)


def rank_kernel(m: Matrix):
    """Rank and an ordered kernel basis (tuples of Fractions).

    Kernel vectors follow the standard free-variable convention: one vector
    per non-pivot column, with that free coordinate set to 1.
    """
    rows, pivots = m.rref()
    rank = len(pivots)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m.cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(tuple(v))
    return rank, basis


def solve(a: Matrix, b):
    """Solve a·x = b exactly.

    Returns (particular solution tuple, kernel basis) or None when the system
    is inconsistent.  The particular solution sets all free variables to 0.
    """
    b = [frac(v) for v in b]
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    aug = Matrix(a.rows, a.cols + 1,
                 [e for i in range(a.rows) for e in (*a.row(i), b[i])])
    rows, pivots = aug.rref()
    if a.cols in pivots:
        return None
    x = [Fraction(0)] * a.cols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][a.cols]
    _, kernel = rank_kernel(a)
    return tuple(x), kernel


def invert(m: Matrix):
    """Exact inverse, or None when the matrix is singular."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    aug = Matrix(n, 2 * n,
                 [e for i in range(n)
                  for e in (*m.row(i), *Matrix.identity(n).row(i))])
    rows, pivots = aug.rref()
    if tuple(pivots[:n]) != tuple(range(n)) or len(pivots) < n:
        return None
    return Matrix(n, n, [rows[i][n + j] for i in range(n) for j in range(n)])


def det(m: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    rows = m.to_rows()
    n = m.rows
    d = Fraction(1)
    for c in range(n):
        pr = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            return Fraction(0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            d = -d
        d *= rows[c][c]
        inv = Fraction(1) / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return d


class IntMatrix:
    """Immutable dense matrix over Z, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(int(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [int(i == j) for i in range(n) for j in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        body = "; ".join(",".join(str(e) for e in self.row(i))
                         for i in range(self.rows))
        return f"IntMatrix[{body}]"

    def __mul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other.entries[k * other.cols + j]
                               for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, out)


def _snf_pivot(rows, s, n, m):
    # smallest |nonzero| in the trailing block, row-major tie-break
    best = None
    for i in range(s, n):
        for j in range(s, m):
            v = rows[i][j]
            if v != 0 and (best is None or abs(v) < abs(best[2])):
                best = (i, j, v)
    return best


def smith_normal_form(mat: IntMatrix):
    """Smith normal form: returns (d, u, v) with u·mat·v diagonal.

    d is the full diagonal (length min(rows, cols)), non-negative, with
    d1 | d2 | ...; u and v are unimodular.
    """
    n, m = mat.rows, mat.cols
    rows = mat.to_rows()
    u = IntMatrix.identity(n).to_rows()
    v = IntMatrix.identity(m).to_rows()

    def row_op(i, k, q):  # row_i -= q * row_k
        rows[i] = [a - q * b for a, b in zip(rows[i], rows[k])]
        u[i] = [a - q * b for a, b in zip(u[i], u[k])]

    def col_op(j, k, q):  # col_j -= q * col_k
        for r in rows:
            r[j] -= q * r[k]
        for r in v:
            r[j] -= q * r[k]

    def row_swap(i, k):
        rows[i], rows[k] = rows[k], rows[i]
        u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for r in rows:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    size = min(n, m)
    for s in range(size):
        while True:
            p = _snf_pivot(rows, s, n, m)
            if p is None:
                break
            pi, pj, _ = p
            if pi != s:
                row_swap(s, pi)
            if pj != s:
                col_swap(s, pj)
            done = True
            for i in range(s + 1, n):
                if rows[i][s] != 0:
                    row_op(i, s, rows[i][s] // rows[s][s])
                    done = done and rows[i][s] == 0
            for j in range(s + 1, m):
                if rows[s][j] != 0:
                    col_op(j, s, rows[s][j] // rows[s][s])
                    done = done and rows[s][j] == 0
            if not done:
                continue
            # make the pivot divide the whole trailing block
            offender = None
            for i in range(s + 1, n):
                for j in range(s + 1, m):
                    if rows[i][j] % rows[s][s] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(s, offender, -1)  # fold the offending row into the pivot row
        if rows[s][s] < 0:
            rows[s] = [-a for a in rows[s]]
            u[s] = [-a for a in u[s]]
    d = tuple(rows[i][i] for i in range(size))
    return d, IntMatrix.from_rows(u), IntMatrix.from_rows(v)


def solve_integer(a: IntMatrix, b):
    """One integer solution x of a·x = b, or None if none exists."""
    b = [int(x) for x in b]
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    d, u, v = smith_normal_form(a)
    ub = [sum(u[(i, k)] * b[k] for k in range(a.rows)) for i in range(a.rows)]
    y = [0] * a.cols
    for i in range(a.rows):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            if i < a.cols:
                y[i] = ub[i] // di
    return tuple(sum(v[(i, k)] * y[k] for k in range(a.cols))
                 for i in range(a.cols))


def integer_kernel(a: IntMatrix):
    """Basis of the integer kernel lattice {x : a·x = 0}."""
    d, _, v = smith_normal_form(a)
    basis = []
    for j in range(a.cols):
        dj = d[j] if j < len(d) else 0
        if dj == 0:
            basis.append(tuple(v[(i, j)] for i in range(a.cols)))
    return basis


def in_lattice(basis, target) -> bool:
    """Is `target` an integer combination of the given integer vectors?"""
    basis = [tuple(int(x) for x in b) for b in basis]
    target = tuple(int(x) for x in target)
    if not basis:
        return all(x == 0 for x in target)
    n = len(target)
    if any(len(b) != n for b in basis):
        raise ValueError("length mismatch")
    cols = IntMatrix(n, len(basis),
                     [basis[j][i] for i in range(n) for j in range(len(basis))])
    return solve_integer(cols, target) is not None
