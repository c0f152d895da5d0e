"""Exact integer and rational linear algebra.

Nothing here rounds: entries are Python ints, rational intermediates are
``fractions.Fraction``. The only floating point is ``float_inertia``, which
exists as a cross-check and never decides a result on its own.
"""
import logging
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NotSquare, NotSymmetric
from .models import CharPoly, Inertia, SnfResult

logger = logging.getLogger(__name__)


class BigIntMatrix:
    """Dense rectangular matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        data = [[int(v) for v in row] for row in entries]
        width = len(data[0]) if data else (cols or 0)
        if any(len(row) != width for row in data):
            raise ValueError("matrix rows have different lengths")
        self.rows = len(data)
        self.cols = width
        self.entries = data

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> "BigIntMatrix":
        return cls(array.tolist(), cols=array.shape[1] if array.ndim == 2 else 0)

    @classmethod
    def identity(cls, n: int) -> "BigIntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int, cols: int) -> "BigIntMatrix":
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls(out, cols=cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        e = self.entries
        return all(e[i][j] == e[j][i] for i in range(self.rows) for j in range(i))

    def transpose(self) -> "BigIntMatrix":
        return BigIntMatrix([list(col) for col in zip(*self.entries)], cols=self.rows)

    def __matmul__(self, other: "BigIntMatrix") -> "BigIntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        return BigIntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.entries],
            cols=other.cols,
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BigIntMatrix) and self.shape == other.shape \
            and self.entries == other.entries

    def __repr__(self) -> str:
        return f"BigIntMatrix({self.entries})"

    def copy_entries(self) -> list[list[int]]:
        return [row[:] for row in self.entries]


def as_bigint(m: "BigIntMatrix | np.ndarray | Sequence[Sequence[int]]") -> BigIntMatrix:
    if isinstance(m, BigIntMatrix):
        return m
    if isinstance(m, np.ndarray):
        return BigIntMatrix.from_numpy(m)
    return BigIntMatrix(m)


def bareiss_det(m) -> int:
    m = as_bigint(m)
    if not m.is_square:
        raise NotSquare(f"determinant of a {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return 1
    A = m.copy_entries()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        pivot = A[k][k]
        row_k = A[k]
        for i in range(k + 1, n):
            row_i = A[i]
            a = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - a * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * A[n - 1][n - 1]


def cofactor_det(m) -> int:
    """Laplace expansion along the first row. Exponential; small matrices only."""
    m = as_bigint(m)
    if not m.is_square:
        raise NotSquare(f"determinant of a {m.rows}x{m.cols} matrix")

    def expand(rows: list[list[int]]) -> int:
        if not rows:
            return 1
        if len(rows) == 1:
            return rows[0][0]
        total = 0
        for j, a in enumerate(rows[0]):
            if a:
                minor = [row[:j] + row[j + 1:] for row in rows[1:]]
                total += (-1) ** j * a * expand(minor)
        return total

    return expand(m.entries)


def exact_rank(m) -> int:
    m = as_bigint(m)
    A = m.copy_entries()
    rows, cols = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        row_r = A[r]
        for i in range(r + 1, rows):
            row_i = A[i]
            a = row_i[c]
            for j in range(c + 1, cols):
                row_i[j] = (p * row_i[j] - a * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
    return r


class _SmithState:
    """Working copy for Smith reduction, optionally tracking U and V."""

    def __init__(self, m: BigIntMatrix, track: bool):
        self.A = m.copy_entries()
        self.rows, self.cols = m.rows, m.cols
        self.U = BigIntMatrix.identity(m.rows).entries if track else None
        self.V = BigIntMatrix.identity(m.cols).entries if track else None

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.A[i], self.A[j] = self.A[j], self.A[i]
        if self.U is not None:
            self.U[i], self.U[j] = self.U[j], self.U[i]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for row in self.A:
            row[i], row[j] = row[j], row[i]
        if self.V is not None:
            for row in self.V:
                row[i], row[j] = row[j], row[i]

    def add_row(self, target: int, source: int, q: int) -> None:
        """row[target] += q * row[source]"""
        for M in (self.A, self.U):
            if M is None:
                continue
            t, s = M[target], M[source]
            for k in range(len(t)):
                if s[k]:
                    t[k] += q * s[k]

    def add_col(self, target: int, source: int, q: int) -> None:
        for M in (self.A, self.V):
            if M is None:
                continue
            for row in M:
                if row[source]:
                    row[target] += q * row[source]

    def negate_row(self, i: int) -> None:
        for M in (self.A, self.U):
            if M is not None:
                M[i] = [-v for v in M[i]]

    def min_abs_position(self, t: int) -> tuple[int, int] | None:
        best = None
        best_abs = 0
        for i in range(t, self.rows):
            row = self.A[i]
            for j in range(t, self.cols):
                v = row[j]
                if v and (best is None or abs(v) < best_abs):
                    best, best_abs = (i, j), abs(v)
                    if best_abs == 1:
                        return best
        return best


def smith_normal_form(m, track: bool = False) -> SnfResult:
    m = as_bigint(m)
    s = _SmithState(m, track)
    A = s.A
    limit = min(s.rows, s.cols)
    t = 0
    while t < limit:
        pos = s.min_abs_position(t)
        if pos is None:
            break
        s.swap_rows(t, pos[0])
        s.swap_cols(t, pos[1])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, s.rows):
                if A[i][t]:
                    s.add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, s.cols):
                if A[t][j]:
                    s.add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                # remainders are smaller than |p|; move the smallest into the pivot
                cands = [(abs(A[i][t]), i, t) for i in range(t + 1, s.rows) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t + 1, s.cols) if A[t][j]]
                _, i, j = min(cands)
                if j == t:
                    s.swap_rows(t, i)
                else:
                    s.swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, s.rows) for j in range(t + 1, s.cols)
                        if A[i][j] % p), None)
            if bad is None:
                break
            s.add_row(t, bad[0], 1)
        if A[t][t] < 0:
            s.negate_row(t)
        t += 1

    factors = [A[i][i] for i in range(limit)]
    _check_divisibility(factors)
    result = SnfResult(invariant_factors=factors)
    if track:
        U, V = BigIntMatrix(s.U, cols=s.rows), BigIntMatrix(s.V, cols=s.cols)
        if U @ m @ V != BigIntMatrix.diagonal(factors, s.rows, s.cols):
            raise ArithmeticError("Smith transforms do not reproduce the diagonal")
        result.left, result.right = U.entries, V.entries
    logger.debug(f"SNF of {m.rows}x{m.cols}: rank {result.rank}")
    return result


def _check_divisibility(factors: Sequence[int]) -> None:
    nonzero = [f for f in factors if f]
    if any(f < 0 for f in factors):
        raise ArithmeticError(f"negative invariant factor in {factors}")
    if factors[:len(nonzero)] != nonzero:
        raise ArithmeticError(f"zero factor precedes a nonzero one in {factors}")
    for a, b in zip(nonzero, nonzero[1:]):
        if b % a:
            raise ArithmeticError(f"divisibility chain broken: {a} does not divide {b}")


def symmetric_inertia(m) -> Inertia:
    """Inertia by congruence diagonalization (1x1 and 2x2 Sylvester pivots)."""
    m = as_bigint(m)
    if not m.is_symmetric():
        raise NotSymmetric(f"inertia needs a symmetric matrix, got {m.rows}x{m.cols}")
    A = [[Fraction(v) for v in row] for row in m.entries]
    n_zero = n_plus = n_minus = 0
    while A:
        k = len(A)
        i = max(range(k), key=lambda t: abs(A[t][t]))
        if A[i][i] != 0:
            d = A[i][i]
            if d > 0:
                n_plus += 1
            else:
                n_minus += 1
            rest = [t for t in range(k) if t != i]
            A = [[A[r][c] - A[r][i] * A[i][c] / d for c in rest] for r in rest]
            continue
        off = next(((i, j) for i in range(k) for j in range(i + 1, k) if A[i][j] != 0), None)
        if off is None:
            n_zero += k
            break
        i, j = off
        a = A[i][j]
        n_plus += 1
        n_minus += 1
        rest = [t for t in range(k) if t not in (i, j)]
        A = [[A[r][c] - (A[r][i] * A[j][c] + A[r][j] * A[i][c]) / a for c in rest]
             for r in rest]
    return Inertia(n_zero=n_zero, n_plus=n_plus, n_minus=n_minus)


def _rref_rows(m: BigIntMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Nonzero rows of the reduced row echelon form and their pivot columns."""
    A = [[Fraction(v) for v in row] for row in m.entries]
    rows, cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        row_r = A[r]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], row_r)]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _faddeev_leverrier(A: list[list]) -> list:
    n = len(A)
    coeffs = [1]
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        cols_m = list(zip(*M))
        AM = [[sum(a * b for a, b in zip(row, col)) for col in cols_m] for row in A]
        trace = sum(AM[i][i] for i in range(n))
        if isinstance(trace, int):
            c, rem = divmod(-trace, k)
            if rem:
                raise ArithmeticError(f"inexact Faddeev-LeVerrier division at step {k}")
        else:
            c = -trace / k
        coeffs.append(c)
        for i in range(n):
            AM[i][i] += c
        M = AM
    return coeffs


def char_poly(m) -> CharPoly:
    """det(xI - m), exactly.

    Rank-deficient input is first compressed through a rank factorization
    m = C R, since det(xI - CR) = x^(N-r) det(xI - RC).
    """
    m = as_bigint(m)
    if not m.is_square:
        raise NotSquare(f"characteristic polynomial of a {m.rows}x{m.cols} matrix")
    N = m.rows
    R, pivots = _rref_rows(m)
    r = len(pivots)
    if r == N:
        core = m.entries
    else:
        C = [[row[c] for c in pivots] for row in m.entries]
        cols_c = list(zip(*C))
        core = [[sum(a * b for a, b in zip(row, col)) for col in cols_c] for row in R]
    coeffs = _faddeev_leverrier(core) + [0] * (N - r)
    out = []
    for c in coeffs:
        c = Fraction(c)
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral coefficient {c}")
        out.append(int(c))
    return CharPoly(coefficients=out)


def _sign_variations(coefficients: Iterable[int]) -> int:
    signs = [c > 0 for c in coefficients if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def descartes_positive_roots(p: CharPoly) -> int:
    return _sign_variations(p.coefficients)


def descartes_inertia(p: CharPoly) -> Inertia:
    """Root sign counts of a real-rooted polynomial as an inertia triple."""
    coeffs = p.coefficients
    zeros = 0
    while zeros < len(coeffs) - 1 and coeffs[len(coeffs) - 1 - zeros] == 0:
        zeros += 1
    degree = p.degree
    mirrored = [c * (-1) ** (degree - k) for k, c in enumerate(coeffs)]
    return Inertia(
        n_zero=zeros,
        n_plus=_sign_variations(coeffs),
        n_minus=_sign_variations(mirrored),
    )


def float_inertia(m, tol: float = 1e-9) -> Inertia:
    """Advisory eigenvalue sign counts; |lambda| <= tol counts as zero."""
    array = np.array(as_bigint(m).entries, dtype=float)
    if array.size == 0:
        return Inertia(n_zero=0, n_plus=0, n_minus=0)
    eigs = np.linalg.eigvalsh(array)
    return Inertia(
        n_zero=int(np.sum(np.abs(eigs) <= tol)),
        n_plus=int(np.sum(eigs > tol)),
        n_minus=int(np.sum(eigs < -tol)),
    )


def float_eigenvalues(m) -> np.ndarray:
    return np.linalg.eigvalsh(np.array(as_bigint(m).entries, dtype=float))

