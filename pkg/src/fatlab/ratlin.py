"""Exact dense linear algebra over the rationals.

Everything downstream (homotopy groups, ruth differentials, groupoid
cohomology, ...) runs on the two types defined here: `Fraction` scalars and
dense `Matrix` values.  A linear map Q^m -> Q^n is stored as an n x m matrix
and composition B o A is the product B * A.  Matrices with zero rows or zero
columns are first-class citizens because fibers of the complexes we work with
may be zero-dimensional.

All operations are pure; a `Matrix` is never mutated after construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import NonSquare, NotInvertible, NoSolution, ShapeMismatch

Rational = Fraction


def rational_from_str(s):
    """Parse "p/q" or "p" into a canonical Fraction (q > 0, gcd reduced)."""
    return Fraction(s.strip())


def rational_to_str(x):
    """Serialize canonically: "p/q" with q > 0 and gcd(|p|, q) = 1, or "p"."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


class Matrix:
    """Dense rational matrix, row-major, immutable by convention."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data):
        if rows < 0 or cols < 0:
            raise ShapeMismatch("negative dimensions")
        data = tuple(tuple(Fraction(x) for x in row) for row in data)
        if len(data) != rows or any(len(row) != cols for row in data):
            raise ShapeMismatch(
                "data is not %d x %d" % (rows, cols))
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(rows_):
        rows_ = [list(r) for r in rows_]
        n = len(rows_)
        m = len(rows_[0]) if rows_ else 0
        return Matrix(n, m, rows_)

    @staticmethod
    def zeros(rows, cols):
        return Matrix(rows, cols, [[0] * cols for _ in range(rows)])

    @staticmethod
    def identity(n):
        return Matrix(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def column(entries):
        entries = list(entries)
        return Matrix(len(entries), 1, [[x] for x in entries])

    @staticmethod
    def diag(entries):
        entries = list(entries)
        n = len(entries)
        return Matrix(n, n, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    # -- basic algebra -----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return "Matrix(%d, %d, %r)" % (self.rows, self.cols,
                                       [[str(x) for x in row] for row in self.data])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a + b for a, b in zip(ra, rb)]
                       for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a - b for a, b in zip(ra, rb)]
                       for ra, rb in zip(self.data, other.data)])

    def __neg__(self):
        return Matrix(self.rows, self.cols,
                      [[-a for a in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ShapeMismatch(
                    "cannot multiply %dx%d by %dx%d"
                    % (self.rows, self.cols, other.rows, other.cols))
            bt = list(zip(*other.data)) if other.data else [()] * other.cols
            out = []
            for row in self.data:
                out.append([sum(a * b for a, b in zip(row, col))
                            if self.cols else Fraction(0) for col in bt])
            if other.cols == 0:
                out = [[] for _ in range(self.rows)]
            return Matrix(self.rows, other.cols, out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = Fraction(c)
        return Matrix(self.rows, self.cols,
                      [[c * a for a in row] for row in self.data])

    def transpose(self):
        return Matrix(self.cols, self.rows, list(zip(*self.data))
                      if self.rows else [[] for _ in range(self.cols)])

    def is_zero(self):
        return all(a == 0 for row in self.data for a in row)

    def is_square(self):
        return self.rows == self.cols

    def is_identity(self):
        return self.is_square() and self == Matrix.identity(self.rows)

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeMismatch("shape mismatch: %dx%d vs %dx%d"
                                % (self.rows, self.cols, other.rows, other.cols))

    # -- stacking ----------------------------------------------------------

    def hstack(self, other):
        if self.rows != other.rows:
            raise ShapeMismatch("hstack needs equal row counts")
        return Matrix(self.rows, self.cols + other.cols,
                      [ra + rb for ra, rb in zip(self.data, other.data)])

    def vstack(self, other):
        if self.cols != other.cols:
            raise ShapeMismatch("vstack needs equal column counts")
        return Matrix(self.rows + other.rows, self.cols, self.data + other.data)

    @staticmethod
    def block(grid):
        """Assemble a matrix from a 2d grid of blocks with matching shapes."""
        rows = []
        for band in grid:
            acc = band[0]
            for blk in band[1:]:
                acc = acc.hstack(blk)
            rows.append(acc)
        acc = rows[0]
        for band in rows[1:]:
            acc = acc.vstack(band)
        return acc

    def submatrix(self, row_idx, col_idx):
        return Matrix(len(row_idx), len(col_idx),
                      [[self.data[i][j] for j in col_idx] for i in row_idx])

    def column_vector(self, j):
        return Matrix.column([self.data[i][j] for i in range(self.rows)])

    def entries(self):
        """Row-major flat list of entries."""
        return [a for row in self.data for a in row]

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return [[rational_to_str(a) for a in row] for row in self.data]

    @staticmethod
    def from_json(obj, rows=None, cols=None):
        data = [[rational_from_str(str(a)) for a in row] for row in obj]
        n = len(data)
        m = len(data[0]) if data else (cols if cols is not None else 0)
        if rows is not None and rows != n:
            if n == 0 and rows == 0:
                m = cols or 0
            else:
                raise ShapeMismatch("expected %d rows, got %d" % (rows, n))
        return Matrix(n, m, data)


# -- elimination-based operations ------------------------------------------


def rank(a):
    """Rank over Q by fraction-free (Bareiss) elimination.

    Rows are rescaled to integers first, so all intermediate arithmetic is
    integer arithmetic; the rank is unaffected by the rescaling.
    """
    if a.rows == 0 or a.cols == 0:
        return 0
    m = []
    for row in a.data:
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        m.append([int(x * den) for x in row])
    nr, nc = a.rows, a.cols
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def rref(a):
    """Reduced row echelon form; returns (R, pivot column list)."""
    m = [list(row) for row in a.data]
    nr, nc = a.rows, a.cols
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [inv * x for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return Matrix(nr, nc, m), pivots


def kernel_basis(a):
    """Exact basis of ker(a) as a list of column vectors.

    The basis has cols(a) - rank(a) members; for the zero-column matrix the
    unique (empty) basis is returned.
    """
    r, pivots = rref(a)
    free = [j for j in range(a.cols) if j not in pivots]
    basis = []
    for j in free:
        v = [Fraction(0)] * a.cols
        v[j] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -r.data[i][j]
        basis.append(Matrix.column(v))
    return basis


def inverse(a):
    """Exact inverse of a square matrix; raises NotInvertible if singular."""
    if a.rows != a.cols:
        raise NonSquare("inverse of a %dx%d matrix" % (a.rows, a.cols))
    n = a.rows
    aug = a.hstack(Matrix.identity(n))
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise NotInvertible("matrix has rank < %d" % n)
    return r.submatrix(range(n), range(n, 2 * n))


def try_inverse(a):
    """Inverse or None, without raising (square input assumed checked)."""
    try:
        return inverse(a)
    except NotInvertible:
        return None


def solve(a, b):
    """One exact solution of a x = b; returns (x, unique_flag).

    `b` is a column matrix; raises NoSolution when inconsistent.  Free
    variables of an underdetermined consistent system are set to zero, which
    makes the returned solution deterministic.
    """
    if b.rows != a.rows or b.cols != 1:
        raise ShapeMismatch("solve needs a column vector of height %d" % a.rows)
    aug = a.hstack(b)
    r, pivots = rref(aug)
    if a.cols in pivots:
        raise NoSolution("inconsistent system")
    x = [Fraction(0)] * a.cols
    for i, pc in enumerate(pivots):
        x[pc] = r.data[i][a.cols]
    return Matrix.column(x), len(pivots) == a.cols


def solve_matrix(a, b):
    """Solve a X = b columnwise; returns (X, unique_flag) or raises NoSolution."""
    cols = []
    unique = True
    for j in range(b.cols):
        x, u = solve(a, b.column_vector(j))
        unique = unique and u
        cols.append(x)
    out = Matrix.zeros(a.cols, 0)
    for c in cols:
        out = out.hstack(c)
    if b.cols == 0:
        out = Matrix.zeros(a.cols, 0)
    return out, unique


def image_contains(a, b):
    """True iff every column of b lies in the column span of a."""
    return rank(a) == rank(a.hstack(b))
