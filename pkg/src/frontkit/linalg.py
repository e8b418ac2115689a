"""Exact dense linear algebra over Q or Q(h).

Entries are field elements supporting ``+ - * /`` and truthiness as a zero
test.  Elimination is pivoted Gauss-Jordan on exact values, so rank,
determinant and kernel are exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import List, Sequence


class Matrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: int = None):
        self.rows = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zeros(cls, n: int, m: int) -> "Matrix":
        return cls([[Fraction(0)] * m for _ in range(n)], m)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int = None) -> "Matrix":
        if not cols:
            return cls([[] for _ in range(nrows or 0)], 0)
        return cls([list(r) for r in zip(*cols)], len(cols))

    @property
    def shape(self):
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def __repr__(self):
        return "Matrix(%r)" % ([[str(x) for x in r] for r in self.rows],)

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> List[list]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "Matrix":
        return Matrix([self.column(j) for j in range(self.ncols)], self.nrows)

    T = property(transpose)

    def map(self, fn) -> "Matrix":
        return Matrix([[fn(x) for x in r] for r in self.rows], self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] = None) -> "Matrix":
        cols = range(self.ncols) if cols is None else cols
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
                      self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, c) -> "Matrix":
        return Matrix([[x * c for x in r] for r in self.rows], self.ncols)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self.scale(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = Fraction(0)
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out, other.ncols)

    def apply(self, v: Sequence) -> list:
        return [sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.rows]

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    # -- elimination -------------------------------------------------------------

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        a = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            p = next((i for i in range(r, self.nrows) if a[i][c]), None)
            if p is None:
                continue
            a[r], a[p] = a[p], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv if x else x for x in a[r]]
            for i in range(self.nrows):
                if i != r and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y if y else x for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return Matrix(a, self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        n = self.nrows
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            piv = a[c][c]
            det = det * piv
            inv = 1 / piv
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] * inv
                    a[i] = [x - f * y if y else x for x, y in zip(a[i], a[c])]
        return det

    def kernel(self) -> List[list]:
        """Basis of {v : M v = 0}; rank + len(basis) = ncols."""
        R, pivots = self.rref()
        free = [j for j in range(self.ncols) if j not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for i, pc in enumerate(pivots):
                if R.rows[i][f]:
                    v[pc] = -R.rows[i][f]
            basis.append(v)
        return basis

    def solve(self, rhs: "Matrix") -> "Matrix":
        """X with self * X = rhs for square invertible self."""
        n = self.nrows
        if n != self.ncols or rhs.nrows != n:
            raise ValueError("solve needs a square system")
        aug = Matrix([r1 + r2 for r1, r2 in zip(self.rows, rhs.rows)], n + rhs.ncols)
        R, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return Matrix([r[n:] for r in R.rows], rhs.ncols)

    def inverse(self) -> "Matrix":
        return self.solve(Matrix.identity(self.nrows))

    def charpoly(self) -> list:
        """Coefficients c_0..c_n (low first) of det(x*I - M), via Berkowitz.

        Division free, so it works for entries in any commutative ring.
        """
        n = self.nrows
        if n != self.ncols:
            raise ValueError("characteristic polynomial of a non-square matrix")
        if n == 0:
            return [Fraction(1)]
        a = self.rows
        # vector of coefficients high first, as in the textbook presentation
        vect = [Fraction(1), -a[0][0]]
        for r in range(1, n):
            # Toeplitz column for the leading (r+1)x(r+1) block
            R = a[r][:r]
            C = [a[i][r] for i in range(r)]
            A = [row[:r] for row in a[:r]]
            col = [Fraction(1), -a[r][r]]
            x = C
            for _ in range(r):
                col.append(-_dot(R, x))
                x = [_dot(row, x) for row in A]
            # multiply Toeplitz(col) (size (r+2)x(r+1)) by vect
            new = []
            for i in range(r + 2):
                acc = Fraction(0)
                for j in range(min(i + 1, r + 1)):
                    if j < len(vect):
                        acc = acc + col[i - j] * vect[j]
                new.append(acc)
            vect = new
        return list(reversed(vect))


def _dot(u, v):
    acc = Fraction(0)
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def det_by_minors(rows: Sequence[Sequence]):
    """Determinant over a commutative ring by Laplace expansion over column subsets.

    O(n 2^n) ring multiplications and no division, so polynomial entries are
    fine.  Zero entries are skipped.
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    # minors[mask] = det of first popcount(mask) rows on columns in mask
    minors = {0: Fraction(1)}
    for k in range(n):
        row = rows[k]
        nxt = {}
        for mask, d in minors.items():
            if not d:
                continue
            sign_count = 0
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    sign_count += 1
                    continue
                a = row[j]
                if not a:
                    continue
                # j is placed after the columns of mask that are smaller than j
                smaller = bin(mask & (bit - 1)).count("1")
                sign = -1 if (k - smaller) % 2 else 1
                term = a * d if sign > 0 else -(a * d)
                m2 = mask | bit
                prev = nxt.get(m2)
                nxt[m2] = term if prev is None else prev + term
        minors = nxt
    return minors.get((1 << n) - 1, Fraction(0))


def span_intersection(A_cols: Sequence[Sequence], B_cols: Sequence[Sequence]) -> List[list]:
    """Basis of span(A) ∩ span(B) via the kernel of [A | -B]."""
    if not A_cols or not B_cols:
        return []
    n = len(A_cols[0])
    M = Matrix.from_columns(list(A_cols) + [[-x for x in b] for b in B_cols], n)
    vecs = []
    for k in M.kernel():
        a = k[:len(A_cols)]
        v = [sum((c * col[i] for c, col in zip(a, A_cols) if c), Fraction(0)) for i in range(n)]
        vecs.append(v)
    if not vecs:
        return []
    R, piv = Matrix(vecs, n).rref()
    return [R.rows[i] for i in range(len(piv))]


def minors_of_size(M: Matrix, k: int):
    """Yield (row_idx, col_idx, det) for every k x k minor."""
    for rs in combinations(range(M.nrows), k):
        for cs in combinations(range(M.ncols), k):
            yield rs, cs, M.submatrix(rs, cs).det()
