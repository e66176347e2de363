"""The group ring F_k[T]/(T^k - 1) of the cyclic group of prime order k."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exact_algebra import ExactMatrix, FieldScalar, check_prime


@dataclass(frozen=True)
class GroupRingElement:
    """sum_i coeffs[i] * T^i, coefficients reduced mod k.

    ``lift`` keeps integer coefficients of a preimage in Z[T]/(T^k - 1).
    It matters for Z-coefficient complexes: T^m - 1 has to stay T^m - 1
    there, not T^m + (k - 1), or it would no longer be killed by the norm.
    """

    coeffs: tuple[int, ...]
    k: int
    lift: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        check_prime(self.k)
        if len(self.coeffs) != self.k:
            raise ValueError(f"need exactly {self.k} coefficients, got {len(self.coeffs)}")
        lift = tuple(int(c) for c in (self.coeffs if self.lift is None else self.lift))
        if len(lift) != self.k:
            raise ValueError("lift has wrong length")
        object.__setattr__(self, "lift", lift)
        object.__setattr__(self, "coeffs", tuple(c % self.k for c in lift))

    @classmethod
    def from_powers(cls, terms: dict[int, int], k: int) -> "GroupRingElement":
        c = [0] * k
        for power, coeff in terms.items():
            c[power % k] += coeff
        return cls(tuple(c), k)

    @classmethod
    def one(cls, k: int) -> "GroupRingElement":
        return cls.from_powers({0: 1}, k)

    @classmethod
    def zero(cls, k: int) -> "GroupRingElement":
        return cls((0,) * k, k)

    def coefficient(self, i: int) -> FieldScalar:
        return FieldScalar(self.coeffs[i % self.k], self.k)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(tuple(a + b for a, b in zip(self.lift, other.lift)), self.k)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(tuple(a - b for a, b in zip(self.lift, other.lift)), self.k)

    def __neg__(self):
        return GroupRingElement(tuple(-a for a in self.lift), self.k)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement(tuple(a * other for a in self.lift), self.k)
        self._check(other)
        k = self.k
        out = [0] * k
        for i, a in enumerate(self.lift):
            if a:
                for j, b in enumerate(other.lift):
                    out[(i + j) % k] += a * b
        return GroupRingElement(tuple(out), k)

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, GroupRingElement) or other.k != self.k:
            raise ValueError("elements of different group rings")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def augmentation(self) -> int:
        """Image under T -> 1, as an integer from the lift (not reduced mod k)."""
        return sum(self.integral_lift())

    def integral_lift(self) -> tuple[int, ...]:
        return self.lift

    def reduced_lift(self) -> tuple[int, ...]:
        """Coefficients as integers in {0, ..., k-1}."""
        return self.coeffs

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "1" if i == 0 else ("T" if i == 1 else f"T^{i}")
            terms.append(mono if c == 1 and i else f"{c}" if i == 0 else f"{c}*{mono}")
        return " + ".join(reversed(terms)) or "0"


def tpow_minus_one(m: int, k: int) -> GroupRingElement:
    """T^m - 1.  The weight must be a unit mod k."""
    check_prime(k)
    if m % k == 0:
        raise ValueError(f"weight {m} is divisible by k={k}; T^m - 1 would vanish")
    return GroupRingElement.from_powers({m: 1, 0: -1}, k)


def norm(k: int) -> GroupRingElement:
    """The norm element 1 + T + ... + T^(k-1)."""
    check_prime(k)
    return GroupRingElement((1,) * k, k)


def multiplication_entries(coeffs: Sequence[int], k: int) -> list[list[int]]:
    # column j is T^j * r, so entry (i, j) is the coefficient r_{i-j}
    return [[coeffs[(i - j) % k] for j in range(k)] for i in range(k)]


def as_multiplication_matrix(r: GroupRingElement) -> ExactMatrix:
    """k x k circulant matrix of x -> x*r in the basis (1, T, ..., T^(k-1))."""
    return ExactMatrix(multiplication_entries(r.coeffs, r.k), r.k)


def as_integral_multiplication_matrix(r: GroupRingElement) -> ExactMatrix:
    """Same circulant, built on the integer lift of ``r`` (for Z[T]/(T^k-1))."""
    return ExactMatrix(multiplication_entries(r.integral_lift(), r.k))
