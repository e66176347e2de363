"""Filtered chain complexes for the radial Hamiltonians supported in a ball.

A profile is described by its critical data only: the radii r_j where the
profile's slope equals -jR, the profile values there, and the value at the
origin.  Each fixed sphere contributes a free block over F_k[T]/(T^k - 1)
spanning 2n consecutive degrees; the origin and the region at infinity
contribute one generator each.

Inside a block the generators come from a Z_k-invariant perfect Morse
function on S^(2n-1) (k critical points per index), so they get filtration
values spread slightly above the block's critical value, ordered by index.
That keeps every differential strictly filtration-decreasing.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chain import (GradedChainComplex, Generator, HomologyTable, Stratum, homology,
                    window_subquotient)
from .exact_algebra import ExactMatrix, check_prime
from .group_ring import (as_integral_multiplication_matrix, as_multiplication_matrix, norm,
                         tpow_minus_one)

TOWER_SENSITIVE = "tower-sensitive"


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, 'p/q' string or a float's shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"not a finite number: {x}")
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class LensData:
    """Complex dimension n, prime order k and the rotation weights of the action."""

    n: int
    k: int
    weights: tuple[int, ...]

    def __post_init__(self):
        check_prime(self.k)
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.weights) != self.n:
            raise ValueError(f"need {self.n} weights, got {len(self.weights)}")
        for w in self.weights:
            if math.gcd(w, self.k) != 1:
                raise ValueError(f"weight {w} is not coprime to k={self.k}")

    @classmethod
    def uniform(cls, n: int, k: int) -> "LensData":
        return cls(n, k, (1,) * n)


@dataclass(frozen=True)
class Profile:
    """Critical data of a convex profile supported in [0, 1].

    ``block_width`` is the filtration spread of one sphere block after the
    Morse perturbation; by default half of the smallest gap between
    consecutive critical values.
    """

    R: Fraction
    radii: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    rho0: Fraction
    block_width: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "R", as_fraction(self.R))
        object.__setattr__(self, "radii", tuple(as_fraction(r) for r in self.radii))
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))
        object.__setattr__(self, "rho0", as_fraction(self.rho0))
        if self.R <= 0:
            raise ValueError("R must be positive")
        if not self.radii or len(self.radii) != len(self.values):
            raise ValueError("need one value per radius and at least one radius")
        r = self.radii
        if not (0 < r[-1] and r[0] < 1 and all(a > b for a, b in zip(r, r[1:]))):
            raise ValueError("radii must satisfy 0 < r_nu < ... < r_1 < 1")
        c = self.critical_values
        for j, cj in enumerate(c, start=1):
            if not 0 < cj < j * self.R:
                raise ValueError(f"critical value c_{j} = {cj} outside (0, {j * self.R})")
        if not all(a < b for a, b in zip(c, c[1:])):
            raise ValueError("critical values must increase with j")
        if not c[-1] < self.rho0:
            raise ValueError("rho(0) must exceed every sphere critical value")
        gap = self.min_gap
        if self.block_width is None:
            object.__setattr__(self, "block_width", gap / 2)
        else:
            object.__setattr__(self, "block_width", as_fraction(self.block_width))
            if not 0 < self.block_width < gap:
                raise ValueError("block_width must be positive and below the smallest gap")

    @property
    def nu(self) -> int:
        return len(self.radii)

    @property
    def critical_values(self) -> tuple[Fraction, ...]:
        return tuple(j * self.R * r + v
                     for j, (r, v) in enumerate(zip(self.radii, self.values), start=1))

    @property
    def min_gap(self) -> Fraction:
        seq = (Fraction(0),) + self.critical_values + (self.rho0,)
        return min(b - a for a, b in zip(seq, seq[1:]))

    def generator_value(self, j: int, inner_degree: int, n: int) -> Fraction:
        return self.critical_values[j - 1] + self.block_width * Fraction(inner_degree, 2 * n)

    def block_window(self, j: int, n: int) -> tuple[Fraction, Fraction]:
        """A window (a, b] containing exactly the generators of sphere block j."""
        c = self.critical_values
        below = Fraction(0) if j == 1 else self.generator_value(j - 1, 2 * n - 1, n)
        above = self.rho0 if j == self.nu else c[j]
        top = self.generator_value(j, 2 * n - 1, n)
        return (below + c[j - 1]) / 2, (top + above) / 2

    def top_window_end(self, n: int) -> Fraction:
        """A non-critical value between the last sphere block and rho(0)."""
        return (self.generator_value(self.nu, 2 * n - 1, n) + self.rho0) / 2

    def to_dict(self) -> dict:
        return {
            "R": str(self.R),
            "radii": [str(r) for r in self.radii],
            "values": [str(v) for v in self.values],
            "rho0": str(self.rho0),
            "block_width": str(self.block_width),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Profile":
        return cls(Fraction(data["R"]), tuple(Fraction(r) for r in data["radii"]),
                   tuple(Fraction(v) for v in data["values"]), Fraction(data["rho0"]),
                   Fraction(data["block_width"]) if data.get("block_width") else None)


@dataclass(frozen=True)
class CriticalStratum:
    stratum: Stratum
    base_index: int
    value: Fraction


def critical_data(p: Profile, lens: LensData) -> list[CriticalStratum]:
    n = lens.n
    out = [CriticalStratum(Stratum("Infinity"), 0, Fraction(0))]
    out += [CriticalStratum(Stratum("Sphere", j), 2 * j * n, c)
            for j, c in enumerate(p.critical_values, start=1)]
    out.append(CriticalStratum(Stratum("Origin"), 2 * (p.nu + 1) * n, p.rho0))
    return sorted(out, key=lambda s: s.value)


def _modulus(coeffs: str, k: int) -> int | None:
    if coeffs == "Fk":
        return k
    if coeffs == "Z":
        return None
    raise ValueError(f"coefficients must be 'Fk' or 'Z', got {coeffs!r}")


def _block_maps(lens: LensData):
    """Ring elements of the boundary out of each inner degree 1 .. 2n-1, and the norm."""
    k = lens.k
    N = norm(k)
    maps = {}
    for i in range(lens.n):
        maps[2 * i + 1] = tpow_minus_one(lens.weights[i], k)
        if i:
            maps[2 * i] = N
    return maps, N


def build_nonequivariant_complex(p: Profile, lens: LensData,
                                 coeffs: str = "Fk") -> GradedChainComplex:
    """Free block complex with Origin and Infinity strata attached.

    Bottom of block j+1 maps to the top of block j by the norm, and the
    origin generator e has boundary norm * (top of block nu).
    """
    n, k, nu = lens.n, lens.k, p.nu
    modulus = _modulus(coeffs, k)
    circ = as_multiplication_matrix if modulus else as_integral_multiplication_matrix
    maps, N = _block_maps(lens)

    gens: dict[int, list[Generator]] = {0: [Generator(Stratum("Infinity"), 0, 0, Fraction(0))]}
    bnd: dict[int, ExactMatrix] = {}
    for j in range(1, nu + 1):
        for i in range(2 * n):
            d = 2 * j * n + i
            value = p.generator_value(j, i, n)
            gens[d] = [Generator(Stratum("Sphere", j), i, d, value, t) for t in range(k)]
            if i in maps:
                bnd[d] = circ(maps[i])
            elif i == 0 and j > 1:
                bnd[d] = circ(N)
    top = 2 * (nu + 1) * n
    gens[top] = [Generator(Stratum("Origin"), 0, top, p.rho0)]
    bnd[top] = ExactMatrix([[1]] * k, modulus, cols=1)
    return GradedChainComplex(gens, bnd, modulus)


def build_equivariant_complex(p: Profile, lens: LensData,
                              coeffs: str = "Fk") -> GradedChainComplex:
    """Orbit quotient of the sphere blocks (the Z_k-action is free there).

    Each boundary r in the group ring becomes its augmentation: T^m - 1
    induces 0 and the norm induces k.  Windows must stay inside (0, rho(0)).
    """
    n, k, nu = lens.n, lens.k, p.nu
    modulus = _modulus(coeffs, k)
    maps, N = _block_maps(lens)
    gens: dict[int, list[Generator]] = {}
    bnd: dict[int, ExactMatrix] = {}
    for j in range(1, nu + 1):
        for i in range(2 * n):
            d = 2 * j * n + i
            gens[d] = [Generator(Stratum("Sphere", j), i, d, p.generator_value(j, i, n))]
            if i in maps:
                bnd[d] = ExactMatrix([[maps[i].augmentation()]], modulus)
            elif i == 0 and j > 1:
                bnd[d] = ExactMatrix([[N.augmentation()]], modulus)
    return GradedChainComplex(gens, bnd, modulus, window_bounds=(Fraction(0), p.rho0))


def sphere_block_complex(lens: LensData, coeffs: str = "Fk",
                         quotient: bool = False) -> GradedChainComplex:
    """One block in degrees 0 .. 2n-1: cellular chains of S^(2n-1), or of the lens space.

    Filtration equals the degree, which is all a lone block needs.
    """
    n, k = lens.n, lens.k
    modulus = _modulus(coeffs, k)
    maps, _ = _block_maps(lens)
    circ = as_multiplication_matrix if modulus else as_integral_multiplication_matrix
    size = 1 if quotient else k
    gens = {i: [Generator(Stratum("Sphere", 1), i, i, Fraction(i), None if quotient else t)
                for t in range(size)] for i in range(2 * n)}
    bnd = {}
    for i, r in maps.items():
        bnd[i] = ExactMatrix([[r.augmentation()]], modulus) if quotient else circ(r)
    return GradedChainComplex(gens, bnd, modulus)


def synthesize_profile(R, a, nu: int, variant: int = 0) -> Profile:
    """Profile with nu spheres whose block j lies above a exactly when jR > a.

    Variant 0 puts c_j = jR - min(R, |jR - a|)/(j + 2) at radii 1/(j + 1);
    variant 1 uses (2j + 5) in the denominator and radii 2^-j.  Both keep
    c_j < jR, the ordering of the c_j, and the side of a each block is on.
    """
    R, a = as_fraction(R), as_fraction(a)
    if (a / R).denominator == 1:
        raise ValueError("a/R is an integer: a is a limit of critical values")
    cs, radii = [], []
    for j in range(1, nu + 1):
        shrink = min(R, abs(j * R - a))
        if variant == 0:
            cs.append(j * R - shrink / (j + 2))
            radii.append(Fraction(1, j + 1))
        elif variant == 1:
            cs.append(j * R - shrink / (2 * j + 5))
            radii.append(Fraction(1, 2 ** j))
        else:
            raise ValueError(f"unknown variant {variant}")
    rho0 = cs[-1] + R
    values = [c - j * R * r for j, (c, r) in enumerate(zip(cs, radii), start=1)]
    seq = [Fraction(0)] + cs + [rho0]
    gaps = [y - x for x, y in zip(seq, seq[1:])] + [a - c for c in cs if c < a]
    return Profile(R, tuple(radii), tuple(values), rho0, min(gaps) / 2)


def random_profile(rng: random.Random, nu: int, R=None) -> Profile:
    """A random valid profile with small-denominator rational data."""
    if R is None:
        R = Fraction(rng.randint(1, 40), rng.randint(1, 12))
    R = as_fraction(R)
    den = 97
    cs = [j * R - R * Fraction(rng.randint(1, den - 1), den) for j in range(1, nu + 1)]
    cuts = sorted(rng.sample(range(1, 1000), nu), reverse=True)
    radii = [Fraction(c, 1000) for c in cuts]
    values = [c - j * R * r for j, (c, r) in enumerate(zip(cs, radii), start=1)]
    rho0 = cs[-1] + R * Fraction(rng.randint(1, 50), 10)
    p = Profile(R, tuple(radii), tuple(values), rho0)
    width = p.min_gap * Fraction(rng.randint(1, 9), 10)
    return Profile(R, tuple(radii), tuple(values), rho0, width)


def tower_sensitive_degrees(n: int, degrees: Sequence[int]) -> list[int]:
    return [d for d in degrees if d % (2 * n) == 2 * n - 1]


def stabilized_homology(lens: LensData, R, a, max_degree: int, equivariant: bool = False,
                        coeffs: str = "Fk", variant: int = 0) -> HomologyTable:
    """Window homology over (a, rho(0) - eps] with enough spheres for all degrees <= max_degree.

    The number of spheres is the least nu with 2(nu + 1)n > max_degree + 2n,
    so the origin (and the top of the last block) sit above every reported
    degree.  It is raised further when a > nu*R so that the window is never
    empty.  Equivariant tables mark the degrees = 2n - 1 mod 2n.
    """
    R, a = as_fraction(R), as_fraction(a)
    if a <= 0 or R <= 0:
        raise ValueError("need a > 0 and R > 0")
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    n = lens.n
    nu = max(max_degree // (2 * n) + 1, math.floor(a / R) + 1)
    p = synthesize_profile(R, a, nu, variant)
    build = build_equivariant_complex if equivariant else build_nonequivariant_complex
    C = build(p, lens, coeffs)
    table = homology(window_subquotient(C, a, p.top_window_end(n))).truncate(max_degree)
    if equivariant:
        table.annotations = {d: TOWER_SENSITIVE
                             for d in tower_sensitive_degrees(n, range(max_degree + 1))}
    return table
