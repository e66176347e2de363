"""Exact linear algebra over prime fields F_k and over the integers.

Matrices are dense and immutable.  Entries are plain Python ints: residues
in ``range(k)`` when a modulus is attached, arbitrary-precision integers
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


@lru_cache(maxsize=None)
def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            return False
        d += 2
    return True


def check_prime(k: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool) or not is_prime(k):
        raise ValueError(f"modulus must be prime, got {k!r}")
    return k


@dataclass(frozen=True)
class FieldScalar:
    """An element of the prime field F_k."""

    value: int
    modulus: int

    def __post_init__(self):
        check_prime(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldScalar):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldScalar(-self.value, self.modulus)

    def inverse(self) -> "FieldScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_k")
        return FieldScalar(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldScalar(o, self.modulus).inverse()

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


class ExactMatrix:
    """Dense matrix with exact entries.

    ``modulus`` is a prime for F_k matrices and ``None`` for integer matrices.
    """

    __slots__ = ("rows", "cols", "modulus", "_entries")

    def __init__(self, entries: Iterable[Sequence[int]], modulus: int | None = None,
                 cols: int | None = None):
        if modulus is not None:
            check_prime(modulus)
        rows = [tuple(int(v) for v in row) for row in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        if modulus is not None:
            rows = [tuple(v % modulus for v in row) for row in rows]
        self.rows = len(rows)
        self.cols = cols
        self.modulus = modulus
        self._entries = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int | None = None) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)], modulus, cols=cols)

    @classmethod
    def identity(cls, size: int, modulus: int | None = None) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(size)] for i in range(size)], modulus, cols=size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._entries[i][j]

    def scalar(self, i: int, j: int) -> FieldScalar:
        if self.modulus is None:
            raise TypeError("integer matrix has no field scalars")
        return FieldScalar(self._entries[i][j], self.modulus)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self._entries]

    def row(self, i: int) -> tuple[int, ...]:
        return self._entries[i]

    def transpose(self) -> "ExactMatrix":
        if self.rows == 0:
            return ExactMatrix.zeros(self.cols, 0, self.modulus)
        return ExactMatrix(zip(*self._entries), self.modulus, cols=self.rows)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self._entries for v in row)

    def nonzero_entries(self):
        for i, row in enumerate(self._entries):
            for j, v in enumerate(row):
                if v:
                    yield i, j, v

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.modulus != other.modulus:
            raise ValueError("coefficient mismatch")
        cols_b = list(zip(*other._entries)) if other.rows else [()] * other.cols
        out = [[sum(a * b for a, b in zip(row, col)) for col in cols_b] for row in self._entries]
        return ExactMatrix(out, self.modulus, cols=other.cols)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape or self.modulus != other.modulus:
            raise ValueError("incompatible matrices")
        return ExactMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)],
            self.modulus, cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.modulus == other.modulus
                and self._entries == other._entries)

    def __hash__(self):
        return hash((self._entries, self.modulus, self.cols))

    def __repr__(self):
        ring = "Z" if self.modulus is None else f"F_{self.modulus}"
        return f"ExactMatrix({self.tolist()}, {ring})"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix([[self._entries[i][j] for j in cols] for i in rows],
                           self.modulus, cols=len(cols))

    def reduce_mod(self, k: int) -> "ExactMatrix":
        return ExactMatrix(self._entries, k, cols=self.cols)


def _rref(rows: list[list[int]], k: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_k, in place.  Returns (rows, pivot_cols)."""
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, k)
        rows[r] = [v * inv % k for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % k for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank_mod(M: ExactMatrix) -> int:
    if M.modulus is None:
        raise TypeError("rank_mod needs an F_k matrix")
    if M.rows == 0 or M.cols == 0:
        return 0
    _, pivots = _rref(M.tolist(), M.modulus)
    return len(pivots)


def rank_kernel(M: ExactMatrix) -> tuple[int, list[tuple[int, ...]]]:
    """Rank and kernel basis of ``M`` over F_k.

    The kernel basis is returned as the rows of the unique reduced row
    echelon matrix spanning ker(M), so it does not depend on how ``M`` was
    presented.
    """
    if M.modulus is None:
        raise TypeError("rank_kernel works over F_k; use smith_normal_form over Z")
    k = M.modulus
    if M.rows == 0:
        basis = [tuple(int(i == j) for j in range(M.cols)) for i in range(M.cols)]
        return 0, basis
    rows, pivots = _rref(M.tolist(), k)
    free = [c for c in range(M.cols) if c not in set(pivots)]
    vectors = []
    for f in free:
        v = [0] * M.cols
        v[f] = 1
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f] % k
        vectors.append(v)
    if vectors:
        vectors, _ = _rref(vectors, k)
    return len(pivots), [tuple(v) for v in vectors]


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with ``D`` diagonal, d_1 | d_2 | ..., U and V unimodular."""

    D: ExactMatrix
    U: ExactMatrix
    V: ExactMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(n) if self.D[i, i] != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(A: ExactMatrix) -> SmithForm:
    """Smith normal form of an integer matrix, with both transforms."""
    if A.modulus is not None:
        raise TypeError("smith_normal_form expects an integer matrix")
    m, n = A.shape
    D = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        dirty = True
            if dirty:
                # a remainder survived: move the smallest entry of row/col t to the pivot
                cands = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
                cands += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            p = D[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
        t += 1

    form = SmithForm(ExactMatrix(D, cols=n), ExactMatrix(U, cols=m), ExactMatrix(V, cols=n))
    if m and n and form.U @ A @ form.V != form.D:
        raise ArithmeticError("Smith normal form reconstruction failed")
    return form


def determinant(M: ExactMatrix) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    if M.rows != M.cols:
        raise ValueError("square matrix required")
    n = M.rows
    a = M.tolist()
    sign, prev = 1, 1
    for c in range(n - 1):
        if a[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if a[r][c]), None)
            if swap is None:
                return 0
            a[c], a[swap] = a[swap], a[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]) // prev
        prev = a[c][c]
    return sign * a[n - 1][n - 1] if n else 1
