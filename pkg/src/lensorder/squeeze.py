"""Squeezing and non-squeezing verdicts for prequantized balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .morse_bott import as_fraction
from .oracles import OracleQuery, balls_homology_eq, balls_table, prequantize


class Status(str, Enum):
    OBSTRUCTED = "Obstructed"
    SQUEEZABLE = "SqueezablePerEKP"
    NO_VERDICT = "NoVerdict"


@dataclass(frozen=True)
class Diagram:
    """Ranks at the witness degree for the large ball, the ball itself and the target."""

    Rpp: int
    R: int
    Rp: int


@dataclass(frozen=True)
class SqueezeVerdict:
    status: Status
    witness: int | None = None
    degree: int | None = None
    diagram: Diagram | None = None
    reason: str = ""

    def __post_init__(self):
        if self.witness is not None and self.status is not Status.OBSTRUCTED:
            raise ValueError("only an obstruction carries a witness")

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "witness": self.witness,
            "degree": self.degree,
            "diagram": None if self.diagram is None else {
                "Rpp": self.diagram.Rpp, "R": self.diagram.R, "Rp": self.diagram.Rp},
            "reason": self.reason,
        }


def _check(R: Fraction, Rp: Fraction):
    if not 0 < Rp < R:
        raise ValueError(f"need 0 < R' < R, got R={R}, R'={Rp}")


def prequantized_rank(n: int, k: int, R, a, degree: int) -> int:
    """Rank of the equivariant homology of the prequantized ball at one degree."""
    table = balls_table(n, k, R, a, degree, equivariant=True)
    return prequantize(table).rank(degree)


def equivariant_verdict(n: int, k: int, R, Rp, a=1) -> SqueezeVerdict:
    """Obstruction from a positive integer l with R' < a/l < R (smallest such l).

    The diagram reports the equivariant ranks of the prequantized balls
    B(R'') (any R'' > R; 2R is used), B(R) and B(R') at degree 2nl.
    """
    R, Rp, a = as_fraction(R), as_fraction(Rp), as_fraction(a)
    _check(R, Rp)
    l = math.floor(a / R) + 1
    if not Rp < a / l:
        return SqueezeVerdict(Status.NO_VERDICT,
                              reason=f"no a/l strictly between {Rp} and {R}")
    degree = 2 * n * l
    diagram = Diagram(prequantized_rank(n, k, 2 * R, a, degree),
                      prequantized_rank(n, k, R, a, degree),
                      prequantized_rank(n, k, Rp, a, degree))
    return SqueezeVerdict(Status.OBSTRUCTED, l, degree, diagram,
                          reason=f"{Rp} < {a}/{l} < {R}")


def nonequivariant_verdict(n: int, R, Rp) -> SqueezeVerdict:
    """Integer obstruction first, then the n > 1, R < 1 squeezing regime, then n = 1 rigidity."""
    R, Rp = as_fraction(R), as_fraction(Rp)
    _check(R, Rp)
    m = math.ceil(Rp)
    if m <= R:
        return SqueezeVerdict(Status.OBSTRUCTED, m, reason=f"integer {m} in [{Rp}, {R}]")
    if n > 1 and R < 1:
        return SqueezeVerdict(Status.SQUEEZABLE, reason="n > 1 and R < 1")
    if n == 1:
        return SqueezeVerdict(Status.OBSTRUCTED, reason="no squeezing in dimension 3")
    return SqueezeVerdict(Status.NO_VERDICT, reason="R >= 1 with no integer in [R', R]")


def obstructing_target(R, a=1) -> Fraction:
    """Some R' for which the equivariant verdict on (R, R') is an obstruction."""
    R, a = as_fraction(R), as_fraction(a)
    l = math.floor(a / R) + 1
    return a / (l + 1)


def witness_is_rank_one(n: int, k: int, R, a, l: int) -> bool:
    return balls_homology_eq(OracleQuery(n, k, R, a, 2 * n * l, True)) == 1
