"""Closed-form homology of balls and lens spaces, used as ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .chain import HomologyTable
from .exact_algebra import check_prime
from .morse_bott import LensData, as_fraction


@dataclass(frozen=True)
class OracleQuery:
    n: int
    k: int
    R: Fraction
    a: Fraction
    degree: int
    equivariant: bool = False

    def __post_init__(self):
        check_prime(self.k)
        object.__setattr__(self, "R", as_fraction(self.R))
        object.__setattr__(self, "a", as_fraction(self.a))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.R <= 0 or self.a <= 0:
            raise ValueError("R and a must be positive")


def _level(q: OracleQuery) -> int | None:
    """l when the degree is 2nl for a positive integer l."""
    if q.degree <= 0 or q.degree % (2 * q.n):
        return None
    return q.degree // (2 * q.n)


def balls_homology(q: OracleQuery) -> int:
    """Rank of G_*^(a, inf](B(R)): 1 at degree 2nl iff a/l <= R < a/(l-1)."""
    l = _level(q)
    if l is None:
        return 0
    if q.R < q.a / l:
        return 0
    return int(l == 1 or q.R < q.a / (l - 1))


def balls_homology_eq(q: OracleQuery) -> int:
    """Rank of the Z_k-equivariant group: 1 iff some l >= 1 has R >= a/l and 2nl <= * < 2n(l+1)-1."""
    if q.degree < 2 * q.n:
        return 0
    l = q.degree // (2 * q.n)
    # l is the only candidate, since the degree ranges for different l are disjoint
    return int(q.degree < 2 * q.n * (l + 1) - 1 and q.R >= q.a / l)


def balls_table(n: int, k: int, R, a, max_degree: int, equivariant: bool) -> HomologyTable:
    f = balls_homology_eq if equivariant else balls_homology
    ranks = {d: f(OracleQuery(n, k, R, a, d, equivariant)) for d in range(1, max_degree + 1)}
    return HomologyTable(ranks, k)


def lens_homology(lens: LensData, coeffs: str = "Fk") -> HomologyTable:
    """H_*(L^(2n-1)): F_k in degrees 0..2n-1, or Z, Z/k, 0, ..., Z/k, 0, Z over Z."""
    n, k = lens.n, lens.k
    if coeffs == "Fk":
        return HomologyTable({d: 1 for d in range(2 * n)}, k)
    if coeffs != "Z":
        raise ValueError(f"coefficients must be 'Fk' or 'Z', got {coeffs!r}")
    torsion = {d: (k,) for d in range(1, 2 * n - 2, 2)}
    return HomologyTable({0: 1, 2 * n - 1: 1}, None, torsion)


def sphere_homology(dim: int, modulus: int | None) -> HomologyTable:
    if dim == 0:
        return HomologyTable({0: 2}, modulus)
    return HomologyTable({0: 1, dim: 1}, modulus)


def prequantize(table: HomologyTable) -> HomologyTable:
    """Tensor with H_*(S^1): degree d picks up degrees d and d-1 of the input."""
    degs = set(table.ranks) | {d + 1 for d in table.ranks}
    ranks = {d: table.rank(d) + table.rank(d - 1) for d in degs}
    tdegs = set(table.torsion) | {d + 1 for d in table.torsion}
    torsion = {d: tuple(sorted(table.torsion.get(d, ()) + table.torsion.get(d - 1, ())))
               for d in tdegs}
    return HomologyTable(ranks, table.modulus, torsion)


def partition_level(n: int, R, a) -> int:
    """The unique l with a/l <= R < a/(l-1)."""
    R, a = as_fraction(R), as_fraction(a)
    return max(1, math.ceil(a / R))
