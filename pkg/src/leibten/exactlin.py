"""Exact rational scalars and dense matrices over Q.

All cohomology computations in this package reduce to rank / kernel / solve
questions for matrices with Fraction entries.  Everything here is exact: no
floating point, ever.  Elimination is deterministic (first nonzero column,
topmost nonzero row), so kernel bases and coset representatives are canonical
and suitable for golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

from .errors import ComplexNotComposable, DimensionMismatch

#: The ground field is Q; scalars are stdlib Fractions (always lowest terms,
#: positive denominator, arbitrary precision).
Rational = Fraction

RationalLike = Union[Rational, int, str]


def rat(x: RationalLike) -> Rational:
    """Coerce an int, "p/q" string, or Fraction to a Rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def rat_str(x: Rational) -> str:
    """Serialize as "p" or "p/q" (q > 1)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with row-major Fraction entries."""

    rows: int
    cols: int
    entries: tuple[Rational, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[RationalLike]]) -> Matrix:
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = []
        for row in rows:
            if len(row) != ncols:
                raise DimensionMismatch("ragged rows")
            entries.extend(rat(x) for x in row)
        return Matrix(nrows, ncols, tuple(entries))

    @staticmethod
    def zero(rows: int, cols: int) -> Matrix:
        return Matrix(rows, cols, (ZERO,) * (rows * cols))

    @staticmethod
    def identity(n: int) -> Matrix:
        return Matrix(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @staticmethod
    def column(values: Sequence[RationalLike]) -> Matrix:
        return Matrix(len(values), 1, tuple(rat(v) for v in values))

    def at(self, i: int, j: int) -> Rational:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Rational, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Rational, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list[list[Rational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def transpose(self) -> Matrix:
        return Matrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __add__(self, other: Matrix) -> Matrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: Matrix) -> Matrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> Matrix:
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: RationalLike) -> Matrix:
        c = rat(c)
        return Matrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        # Skip zero entries of the left factor: coboundary matrices are sparse
        # and this is the hot path of every d*d = 0 check.
        n, m, k = self.rows, self.cols, other.cols
        out = [ZERO] * (n * k)
        for i in range(n):
            base = i * m
            for j in range(m):
                a = self.entries[base + j]
                if a:
                    obase = j * k
                    rbase = i * k
                    for c in range(k):
                        b = other.entries[obase + c]
                        if b:
                            out[rbase + c] += a * b
        return Matrix(n, k, tuple(out))

    def apply(self, vec: Sequence[RationalLike]) -> tuple[Rational, ...]:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length != cols")
        vec = [rat(v) for v in vec]
        out = []
        for i in range(self.rows):
            base = i * self.cols
            acc = ZERO
            for j, v in enumerate(vec):
                if v:
                    a = self.entries[base + j]
                    if a:
                        acc += a * v
            out.append(acc)
        return tuple(out)


def _clear_denominators(rows: list[list[Rational]]) -> list[list[int]]:
    out = []
    for row in rows:
        denom = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * denom) for x in row])
    return out


def _bareiss_echelon(m: Matrix) -> tuple[list[list[int]], list[int]]:
    """Fraction-free forward elimination.

    Denominators are cleared per row (a row-equivalence), then one-step
    Bareiss updates keep all intermediates integral.  Returns the integer
    echelon rows together with the pivot column list; pivots are chosen as
    first nonzero column / topmost nonzero row.
    """
    a = _clear_denominators(m.to_lists())
    nrows, ncols = m.rows, m.cols
    pivots: list[int] = []
    prev_pivot = 1
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            a[r], a[pr] = a[pr], a[r]
        pivot = a[r][c]
        for i in range(r + 1, nrows):
            factor = a[i][c]
            for j in range(c, ncols):
                a[i][j] = (a[i][j] * pivot - factor * a[r][j]) // prev_pivot
        pivots.append(c)
        prev_pivot = pivot
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    """Rank over Q, computed exactly."""
    _, pivots = _bareiss_echelon(m)
    return len(pivots)


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Canonical reduced row echelon form and its pivot columns.

    The RREF of a matrix is unique, so this is the deterministic normal form
    behind kernel bases and cohomology representatives.
    """
    a, pivots = _bareiss_echelon(m)
    rows = [[Fraction(x) for x in row] for row in a[: len(pivots)]]
    # back substitution
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(r):
            f = rows[i][c]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
    full = rows + [[ZERO] * m.cols for _ in range(m.rows - len(rows))]
    return Matrix.from_rows(full) if m.rows else m, tuple(pivots)


def kernel_basis(m: Matrix) -> list[tuple[Rational, ...]]:
    """Canonical basis of ker(m) (one vector per free column of the RREF)."""
    if m.rows == 0:
        return [tuple(ONE if i == j else ZERO for i in range(m.cols)) for j in range(m.cols)]
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        vec = [ZERO] * m.cols
        vec[f] = ONE
        for r, p in enumerate(pivots):
            vec[p] = -red.at(r, f)
        basis.append(tuple(vec))
    return basis


def quotient_dim(d_out: Matrix, d_in: Matrix) -> int:
    """dim ker(d_out) - rank(d_in): the dimension of a cohomology group.

    Requires the two maps to form a complex: the middle space dimensions must
    agree and d_out @ d_in must vanish.
    """
    if d_out.cols != d_in.rows:
        raise ComplexNotComposable(
            f"middle dimensions disagree: cols(d_out)={d_out.cols}, rows(d_in)={d_in.rows}"
        )
    if not (d_out @ d_in).is_zero():
        raise ComplexNotComposable("d_out @ d_in != 0; not a complex")
    return (d_out.cols - rank(d_out)) - rank(d_in)


def solve(a: Matrix, b: Sequence[RationalLike]) -> tuple[Rational, ...] | None:
    """One exact solution of a x = b, or None if inconsistent.

    Free variables are set to zero, so the answer is the canonical
    (RREF-pivot) solution.
    """
    if len(b) != a.rows:
        raise DimensionMismatch("rhs length != rows")
    aug = Matrix.from_rows(
        [list(a.row(i)) + [rat(b[i])] for i in range(a.rows)]
        if a.rows
        else []
    )
    if a.rows == 0:
        return (ZERO,) * a.cols
    red, pivots = rref(aug)
    if a.cols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = [ZERO] * a.cols
    for r, p in enumerate(pivots):
        x[p] = red.at(r, a.cols)
    return tuple(x)


def hstack(blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    if not blocks:
        raise DimensionMismatch("hstack of nothing")
    rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise DimensionMismatch("hstack row mismatch")
    out_rows = [sum((list(b.row(i)) for b in blocks), []) for i in range(rows)]
    return Matrix.from_rows(out_rows) if rows else Matrix(0, sum(b.cols for b in blocks), ())


def vstack(blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    if not blocks:
        raise DimensionMismatch("vstack of nothing")
    cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise DimensionMismatch("vstack column mismatch")
    entries: list[Rational] = []
    for b in blocks:
        entries.extend(b.entries)
    return Matrix(sum(b.rows for b in blocks), cols, tuple(entries))
