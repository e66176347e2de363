"""Filtered graded chain complexes and their (relative) homology.

A complex stores, for every degree d, an ordered list of generators and the
boundary matrix from degree d to degree d-1 (rows indexed by the degree d-1
generators, columns by the degree d generators).  Relative homology of a
pair of sublevel sets is computed as the homology of a filtration window,
which is a subquotient complex because the differential strictly lowers the
filtration.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .exact_algebra import ExactMatrix, check_prime, rank_kernel, smith_normal_form

Number = Fraction | int | float


@dataclass(frozen=True, order=True)
class Stratum:
    """Where a generator comes from: ``Sphere(j)``, ``Origin``, ``Infinity`` or ``Tower(i)``."""

    kind: str
    index: int | None = None

    KINDS = ("Infinity", "Sphere", "Origin", "Tower")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown stratum kind {self.kind!r}")
        if (self.kind in ("Sphere", "Tower")) != (self.index is not None):
            raise ValueError(f"{self.kind} stratum index mismatch")

    def __str__(self):
        return self.kind if self.index is None else f"{self.kind}({self.index})"

    @classmethod
    def parse(cls, text: str) -> "Stratum":
        m = re.fullmatch(r"(\w+)(?:\((\d+)\))?", text.strip())
        if not m:
            raise ValueError(f"cannot parse stratum {text!r}")
        return cls(m.group(1), None if m.group(2) is None else int(m.group(2)))


@dataclass(frozen=True)
class Generator:
    stratum: Stratum
    inner_degree: int
    total_degree: int
    filtration: Fraction
    orbit_index: int | None = None  # None marks a generator of a quotient complex

    def __post_init__(self):
        if self.total_degree < 0:
            raise ValueError("negative degree")
        object.__setattr__(self, "filtration", Fraction(self.filtration))

    def sort_key(self):
        return (self.filtration, -1 if self.orbit_index is None else self.orbit_index)


@dataclass(frozen=True)
class Violation:
    kind: str  # "boundary-squared" or "filtration"
    degree: int
    row: int
    col: int
    message: str


class ComplexError(ValueError):
    pass


class GradedChainComplex:
    """Finite chain complex over F_k (``modulus=k``) or Z (``modulus=None``).

    ``window_bounds`` optionally restricts the windows (a, b] that may be
    taken: a must exceed the lower bound and b stay below the upper bound.
    """

    def __init__(self, generators: Mapping[int, Iterable[Generator]],
                 boundaries: Mapping[int, ExactMatrix], modulus: int | None,
                 window_bounds: tuple[Number, Number] | None = None):
        if modulus is not None:
            check_prime(modulus)
        self.modulus = modulus
        self.generators = {d: tuple(g) for d, g in sorted(generators.items()) if g}
        for d, gens in self.generators.items():
            if any(g.total_degree != d for g in gens):
                raise ComplexError(f"generator filed under the wrong degree {d}")
        self.boundaries: dict[int, ExactMatrix] = {}
        for d in self.generators:
            rows, cols = self.dim(d - 1), self.dim(d)
            M = boundaries.get(d)
            if M is None or rows == 0:
                M = ExactMatrix.zeros(rows, cols, modulus)
            if M.shape != (rows, cols):
                raise ComplexError(f"boundary in degree {d} has shape {M.shape}, "
                                   f"expected {(rows, cols)}")
            if M.modulus != modulus:
                raise ComplexError("boundary coefficients do not match the complex")
            self.boundaries[d] = M
        self.window_bounds = window_bounds

    def dim(self, d: int) -> int:
        return len(self.generators.get(d, ()))

    def degrees(self) -> list[int]:
        return sorted(self.generators)

    def boundary(self, d: int) -> ExactMatrix:
        if d in self.boundaries:
            return self.boundaries[d]
        return ExactMatrix.zeros(self.dim(d - 1), self.dim(d), self.modulus)

    def filtration_values(self) -> set[Fraction]:
        return {g.filtration for gens in self.generators.values() for g in gens}

    def __len__(self):
        return sum(len(g) for g in self.generators.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.dim(d) for d in self.generators)

    def __repr__(self):
        ring = "Z" if self.modulus is None else f"F_{self.modulus}"
        dims = {d: self.dim(d) for d in self.degrees()}
        return f"GradedChainComplex({dims}, {ring})"


def validate(C: GradedChainComplex) -> Violation | None:
    """First violation of d^2 = 0 or of strict filtration decrease, else None."""
    for d in C.degrees():
        M = C.boundary(d)
        gens, below = C.generators[d], C.generators.get(d - 1, ())
        for i, j, _ in M.nonzero_entries():
            if not below[i].filtration < gens[j].filtration:
                return Violation("filtration", d, i, j,
                                 f"boundary of {gens[j]} hits {below[i]} "
                                 f"without lowering the filtration")
        if C.dim(d - 2) and C.dim(d - 1):
            bad = next((C.boundary(d - 1) @ M).nonzero_entries(), None)
            if bad is not None:
                return Violation("boundary-squared", d, bad[0], bad[1],
                                 f"d_{d - 1} d_{d} has entry {bad[2]} at {bad[:2]}")
    return None


def check(C: GradedChainComplex) -> GradedChainComplex:
    v = validate(C)
    if v is not None:
        raise ComplexError(v.message)
    return C


def window_subquotient(C: GradedChainComplex, a: Number, b: Number) -> GradedChainComplex:
    """Subquotient spanned by generators with a < filtration <= b.

    ``a`` and ``b`` may be -inf/+inf.  Neither may equal a critical value.
    """
    if not a < b:
        raise ValueError(f"empty window ({a}, {b}]")
    crit = C.filtration_values()
    for end in (a, b):
        if not math.isinf(end) and Fraction(end) in crit:
            raise ValueError(f"window end {end} is a critical value")
    if C.window_bounds is not None:
        lo, hi = C.window_bounds
        if not (lo < a and b < hi):
            raise ValueError(f"window ({a}, {b}] leaves the admissible range ({lo}, {hi})")
    keep = {d: [i for i, g in enumerate(gens) if a < g.filtration <= b]
            for d, gens in C.generators.items()}
    gens = {d: [C.generators[d][i] for i in idx] for d, idx in keep.items()}
    bnd = {}
    for d, idx in keep.items():
        below = keep.get(d - 1, [])
        if idx and below:
            bnd[d] = C.boundary(d).submatrix(below, idx)
    return GradedChainComplex(gens, bnd, C.modulus)


@dataclass
class HomologyTable:
    """Rank per degree; over Z also the torsion invariant factors per degree."""

    ranks: dict[int, int]
    modulus: int | None
    torsion: dict[int, tuple[int, ...]] = field(default_factory=dict)
    annotations: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {d: r for d, r in sorted(self.ranks.items()) if r}
        self.torsion = {d: tuple(t) for d, t in sorted(self.torsion.items()) if t}
        if any(r < 0 for r in self.ranks.values()):
            raise ValueError("negative rank")

    def rank(self, d: int) -> int:
        return self.ranks.get(d, 0)

    def __getitem__(self, d: int) -> int:
        return self.rank(d)

    def degrees(self) -> list[int]:
        return sorted(set(self.ranks) | set(self.torsion))

    def __eq__(self, other):
        if not isinstance(other, HomologyTable):
            return NotImplemented
        return (self.ranks, self.modulus, self.torsion) == (other.ranks, other.modulus,
                                                           other.torsion)

    def __add__(self, other: "HomologyTable") -> "HomologyTable":
        if self.modulus != other.modulus:
            raise ValueError("coefficient mismatch")
        degs = set(self.ranks) | set(other.ranks)
        tors = {d: tuple(sorted(self.torsion.get(d, ()) + other.torsion.get(d, ())))
                for d in set(self.torsion) | set(other.torsion)}
        return HomologyTable({d: self.rank(d) + other.rank(d) for d in degs}, self.modulus, tors)

    def truncate(self, max_degree: int) -> "HomologyTable":
        return HomologyTable({d: r for d, r in self.ranks.items() if d <= max_degree},
                             self.modulus,
                             {d: t for d, t in self.torsion.items() if d <= max_degree},
                             {d: t for d, t in self.annotations.items() if d <= max_degree})

    def shift(self, s: int) -> "HomologyTable":
        return HomologyTable({d + s: r for d, r in self.ranks.items()}, self.modulus,
                             {d + s: t for d, t in self.torsion.items()},
                             {d + s: t for d, t in self.annotations.items()})

    def fk_ranks(self, k: int) -> dict[int, int]:
        """F_k Betti numbers.  For a Z table this applies universal coefficients."""
        if self.modulus is not None:
            if self.modulus != k:
                raise ValueError("cannot change the prime of an F_k table")
            return dict(self.ranks)
        out = {}
        for d in set(self.ranks) | set(self.torsion) | {d + 1 for d in self.torsion}:
            r = (self.rank(d) + sum(1 for t in self.torsion.get(d, ()) if t % k == 0)
                 + sum(1 for t in self.torsion.get(d - 1, ()) if t % k == 0))
            if r:
                out[d] = r
        return dict(sorted(out.items()))

    def describe(self, d: int) -> str:
        parts = []
        if self.modulus is None:
            parts += ["Z"] * self.rank(d)
            parts += [f"Z/{t}" for t in self.torsion.get(d, ())]
        else:
            parts += [f"F_{self.modulus}"] * self.rank(d)
        return " + ".join(parts) or "0"

    def to_dict(self) -> dict:
        return {
            "coefficients": "Z" if self.modulus is None else f"F{self.modulus}",
            "ranks": {str(d): r for d, r in self.ranks.items()},
            "torsion": {str(d): list(t) for d, t in self.torsion.items()},
            "annotations": {str(d): a for d, a in sorted(self.annotations.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HomologyTable":
        coeff = data["coefficients"]
        return cls({int(d): r for d, r in data["ranks"].items()},
                   None if coeff == "Z" else int(coeff[1:]),
                   {int(d): tuple(t) for d, t in data.get("torsion", {}).items()},
                   {int(d): a for d, a in data.get("annotations", {}).items()})


def _rank(M: ExactMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.modulus is None:
        return smith_normal_form(M).rank
    return rank_kernel(M)[0]


def homology(C: GradedChainComplex) -> HomologyTable:
    """Homology of a validated complex.

    Over F_k: dim ker d_n - rank d_(n+1).  Over Z: free rank from the same
    count and torsion from the invariant factors of d_(n+1).
    """
    degs = C.degrees()
    ranks: dict[int, int] = {}
    snf_rank: dict[int, int] = {}
    torsion: dict[int, tuple[int, ...]] = {}
    for d in degs:
        M = C.boundary(d)
        if M.rows == 0 or M.cols == 0:
            snf_rank[d] = 0
        elif C.modulus is None:
            factors = smith_normal_form(M).invariant_factors
            snf_rank[d] = len(factors)
            tors = tuple(f for f in factors if f > 1)
            if tors:
                torsion[d - 1] = tors
        else:
            snf_rank[d] = rank_kernel(M)[0]
    for d in degs:
        r = C.dim(d) - snf_rank[d] - snf_rank.get(d + 1, 0)
        if r < 0:
            raise ComplexError(f"negative Betti number in degree {d}: not a chain complex")
        ranks[d] = r
    return HomologyTable(ranks, C.modulus, torsion)


@dataclass(frozen=True)
class ExactnessReport:
    ok: bool
    degree: int | None = None
    message: str = ""


def exact_sequence_consistent(dims: list[int]) -> int | None:
    """Check that 0 -> V_N -> ... -> V_1 -> 0 can be exact, given only dimensions.

    ``dims`` lists dim V_1, dim V_2, ... (rightmost term first).  Exactness
    forces the rank of the map into V_i to be the alternating sum
    dim V_i - dim V_(i-1) + ...; all of these must be >= 0 and the last one
    must vanish.  Returns the index of the first failing term, else None.
    """
    image_rank = 0  # rank of the map out of the current term
    for i, v in enumerate(dims):
        into = v - image_rank
        if into < 0:
            return i
        image_rank = into
    return None if image_rank == 0 else len(dims) - 1


def triple_exactness_check(C: GradedChainComplex, a1: Number, a2: Number) -> ExactnessReport:
    """Rank test of the long exact sequence of the triple E^a1 < E^a2 < E.

    ... -> H(a1, a2] -> H(a1, inf] -> H(a2, inf] -> H_(*-1)(a1, a2] -> ...
    Over Z the free ranks are used (the sequence stays exact after tensoring
    with Q).
    """
    if not a1 < a2:
        raise ValueError("need a1 < a2")
    try:
        tables = [homology(window_subquotient(C, a1, a2)),
                  homology(window_subquotient(C, a1, math.inf)),
                  homology(window_subquotient(C, a2, math.inf))]
    except ComplexError as exc:
        return ExactnessReport(False, None, str(exc))
    degs = [d for t in tables for d in t.ranks] or [0]
    top, bottom = max(degs), min(0, min(degs))
    dims, where = [], []
    for d in range(bottom, top + 1):
        for pos, t in zip(("third", "middle", "first"), reversed(tables)):
            dims.append(t.rank(d))
            where.append((d, pos))
    bad = exact_sequence_consistent(dims)
    if bad is None:
        return ExactnessReport(True)
    d, pos = where[bad]
    return ExactnessReport(False, d, f"long exact sequence cannot be exact at the {pos} "
                                     f"term in degree {d}")


def complex_to_dict(C: GradedChainComplex) -> dict:
    def gen(g: Generator):
        return {
            "stratum": str(g.stratum),
            "inner_degree": g.inner_degree,
            "total_degree": g.total_degree,
            "filtration": str(g.filtration),
            "orbit_index": "quotient" if g.orbit_index is None else g.orbit_index,
        }

    return {
        "coefficients": "Z" if C.modulus is None else f"F{C.modulus}",
        "degrees": [
            {
                "degree": d,
                "generators": [gen(g) for g in C.generators[d]],
                "boundary": [[i, j, v] for i, j, v in C.boundary(d).nonzero_entries()],
            }
            for d in C.degrees()
        ],
    }


def complex_from_dict(data: dict) -> GradedChainComplex:
    coeff = data["coefficients"]
    modulus = None if coeff == "Z" else int(coeff[1:])
    gens, entries = {}, {}
    for block in data["degrees"]:
        d = block["degree"]
        gens[d] = [Generator(Stratum.parse(g["stratum"]), g["inner_degree"], g["total_degree"],
                             Fraction(g["filtration"]),
                             None if g["orbit_index"] == "quotient" else g["orbit_index"])
                   for g in block["generators"]]
        entries[d] = block["boundary"]
    bnd = {}
    for d, ents in entries.items():
        rows, cols = len(gens.get(d - 1, [])), len(gens[d])
        M = [[0] * cols for _ in range(rows)]
        for i, j, v in ents:
            M[i][j] = v
        bnd[d] = ExactMatrix(M, modulus, cols=cols)
    return GradedChainComplex(gens, bnd, modulus)
