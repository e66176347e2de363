"""Numerical checks of the contact-geometric constructions.

Points of R^(2(2n+1)+1) are flat arrays laid out as [x, y, z, X, Y, Z, theta]
with x, y, X, Y in R^n.  Points of J^1 R^(2n+1) are laid out as
[q_x, q_y, q_z, p_x, p_y, p_z, u].  All kernels accept leading batch
dimensions in front of the coordinate axis.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .morse_bott import LensData, Profile


@dataclass(frozen=True)
class Tolerances:
    finite_difference: float = 1e-6
    closed_form: float = 1e-9
    negative_control: float = 1e-3
    action: float = 1e-8
    degenerate_curvature: float = 1e-10


TOL = Tolerances()


# layout helpers

def product_dim(n: int) -> int:
    return 2 * (2 * n + 1) + 1


def _n_from_product(pt: np.ndarray) -> int:
    d = pt.shape[-1]
    if (d - 3) % 4:
        raise ValueError(f"bad product point length {d}")
    return (d - 3) // 4


def split_product(pt):
    pt = np.asarray(pt, dtype=float)
    n = _n_from_product(pt)
    x, y, z = pt[..., :n], pt[..., n:2 * n], pt[..., 2 * n]
    X, Y, Z = pt[..., 2 * n + 1:3 * n + 1], pt[..., 3 * n + 1:4 * n + 1], pt[..., 4 * n + 1]
    return x, y, z, X, Y, Z, pt[..., 4 * n + 2]


def join_product(x, y, z, X, Y, Z, theta) -> np.ndarray:
    return np.concatenate([x, y, np.asarray(z)[..., None], X, Y, np.asarray(Z)[..., None],
                           np.asarray(theta)[..., None]], axis=-1)


def split_jet(pt):
    pt = np.asarray(pt, dtype=float)
    m = (pt.shape[-1] - 1) // 2
    return pt[..., :m], pt[..., m:2 * m], pt[..., 2 * m]


def join_jet(q, p, u) -> np.ndarray:
    return np.concatenate([q, p, np.asarray(u)[..., None]], axis=-1)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


@dataclass(frozen=True)
class ProductPoint:
    x: tuple[float, ...]
    y: tuple[float, ...]
    z: float
    X: tuple[float, ...]
    Y: tuple[float, ...]
    Z: float
    theta: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.array)):
            raise ValueError("coordinates must be finite")

    @property
    def array(self) -> np.ndarray:
        return join_product(np.array(self.x, float), np.array(self.y, float), self.z,
                            np.array(self.X, float), np.array(self.Y, float), self.Z, self.theta)

    @classmethod
    def from_array(cls, a) -> "ProductPoint":
        x, y, z, X, Y, Z, t = split_product(a)
        return cls(tuple(x), tuple(y), float(z), tuple(X), tuple(Y), float(Z), float(t))


@dataclass(frozen=True)
class JetPoint:
    q: tuple[float, ...]
    p: tuple[float, ...]
    u: float

    @property
    def array(self) -> np.ndarray:
        return join_jet(np.array(self.q, float), np.array(self.p, float), self.u)

    @classmethod
    def from_array(cls, a) -> "JetPoint":
        q, p, u = split_jet(a)
        return cls(tuple(q), tuple(p), float(u))


def _arr(pt) -> np.ndarray:
    return pt.array if isinstance(pt, (ProductPoint, JetPoint)) else np.asarray(pt, float)


# embeddings of the product into the 1-jet space

def sigma(pt, corrupt: bool = False) -> np.ndarray:
    """The symmetric embedding; ``corrupt`` drops one exp(theta/2) factor (test hook)."""
    x, y, z, X, Y, Z, t = split_product(_arr(pt))
    e = np.exp(t / 2)[..., None]
    e1 = 1.0 if corrupt else e
    q = np.concatenate([(e1 * x + X) / 2, (e * y + Y) / 2, z[..., None]], axis=-1)
    p = np.concatenate([Y - e * y, e * x - X, (np.exp(t) - 1)[..., None]], axis=-1)
    u = Z - z + np.exp(t / 2) * (_dot(x, Y) - _dot(y, X)) / 2
    return join_jet(q, p, u)


def corrupted_sigma(pt) -> np.ndarray:
    return sigma(pt, corrupt=True)


def sigma_bhupal(pt) -> np.ndarray:
    """The older embedding, contact for e^theta(dz - y dx) - (dZ - Y dX)."""
    x, y, z, X, Y, Z, t = split_product(_arr(pt))
    et = np.exp(t)
    q = np.concatenate([x, Y, z[..., None]], axis=-1)
    p = np.concatenate([Y - et[..., None] * y, x - X, (et - 1)[..., None]], axis=-1)
    u = _dot(x, Y) - _dot(X, Y) + Z - z
    return join_jet(q, p, u)


EMBEDDINGS: dict[str, Callable] = {
    "sigma": sigma,
    "bhupal": sigma_bhupal,
    "corrupt-sigma": corrupted_sigma,
}


def product_form(pt, kind: str = "symmetric") -> np.ndarray:
    """Covector of e^theta(dz - lambda) - (dZ - Lambda) at a product point.

    ``symmetric`` uses lambda = (y dx - x dy)/2; ``standard`` uses lambda = y dx.
    """
    x, y, z, X, Y, Z, t = split_product(_arr(pt))
    et = np.exp(t)[..., None]
    one = np.ones_like(t)[..., None]
    zero = np.zeros_like(t)[..., None]
    if kind == "symmetric":
        parts = [-et * y / 2, et * x / 2, et, Y / 2, -X / 2, -one, zero]
    elif kind == "standard":
        parts = [-et * y, np.zeros_like(x), et, Y, np.zeros_like(X), -one, zero]
    else:
        raise ValueError(f"unknown form {kind!r}")
    return np.concatenate(parts, axis=-1)


def jet_form(jet) -> np.ndarray:
    """Covector of du - p dq at a jet point."""
    q, p, u = split_jet(_arr(jet))
    return np.concatenate([-p, np.zeros_like(p), np.ones_like(u)[..., None]], axis=-1)


def central_jacobian(f: Callable, pt: np.ndarray, h: float) -> np.ndarray:
    """J[..., i, j] = d f_i / d x_j by central differences."""
    pt = np.asarray(pt, float)
    d = pt.shape[-1]
    cols = []
    for j in range(d):
        step = np.zeros(d)
        step[j] = h
        cols.append((f(pt + step) - f(pt - step)) / (2 * h))
    return np.stack(cols, axis=-1)


def contact_factor_residual(embedding: Callable, pt, h: float = 1e-5,
                            form: str = "symmetric") -> tuple[np.ndarray, np.ndarray]:
    """Least-squares factor and residual of embedding^*(du - p dq) against the product form.

    Returns (lam, residual), each of the batch shape of ``pt``.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    pt = _arr(pt)
    J = central_jacobian(embedding, pt, h)
    beta = np.einsum("...i,...ij->...j", jet_form(embedding(pt)), J)
    A = product_form(pt, form)
    lam = _dot(beta, A) / _dot(A, A)
    return lam, np.linalg.norm(beta - lam[..., None] * A, axis=-1)


def random_product_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(count, product_dim(n)))


def diagonal(q) -> np.ndarray:
    """The point (q, q, 0) of the product."""
    q = np.asarray(q, float)
    return np.concatenate([q, q, np.zeros(q.shape[:-1] + (1,))], axis=-1)


# the Z_k-actions

@dataclass(frozen=True)
class Rotation:
    """Weighted rotation data without the freeness requirement of LensData."""

    n: int
    k: int
    weights: tuple[int, ...]

def _rotate_pairs(a, b, angles):
    c, s = np.cos(angles), np.sin(angles)
    return a * c - b * s, b * c + a * s


def _angles(lens: LensData | Rotation, power: int) -> np.ndarray:
    return 2 * math.pi * np.array(lens.weights, float) * power / lens.k


def tau(point, lens: LensData | Rotation, where: str = "base", power: int = 1) -> np.ndarray:
    """Generator of the action raised to ``power``, on R^(2n+1) or on J^1 R^(2n+1).

    On jets the momenta rotate like the positions and p_z, u are fixed.
    """
    pt = _arr(point).copy()
    n = lens.n
    ang = _angles(lens, power)
    if where == "base":
        if pt.shape[-1] != 2 * n + 1:
            raise ValueError("base points have 2n+1 coordinates")
        pt[..., :n], pt[..., n:2 * n] = _rotate_pairs(pt[..., :n], pt[..., n:2 * n], ang)
    elif where == "jet":
        if pt.shape[-1] != 2 * (2 * n + 1) + 1:
            raise ValueError("jet points have 4n+3 coordinates")
        m = 2 * n + 1
        pt[..., :n], pt[..., n:2 * n] = _rotate_pairs(pt[..., :n], pt[..., n:2 * n], ang)
        pt[..., m:m + n], pt[..., m + n:m + 2 * n] = _rotate_pairs(
            pt[..., m:m + n], pt[..., m + n:m + 2 * n], ang)
    else:
        raise ValueError(f"where must be 'base' or 'jet', got {where!r}")
    return pt


# contactomorphisms of R^(2n+1), returned as (phi_x, phi_y, phi_z, g)

class ContactMap:
    n: int

    def evaluate(self, q):
        raise NotImplementedError

    def __call__(self, q) -> np.ndarray:
        px, py, pz, _ = self.evaluate(q)
        return np.concatenate([px, py, np.asarray(pz)[..., None]], axis=-1)


@dataclass(frozen=True)
class Identity(ContactMap):
    n: int

    def evaluate(self, q):
        q = _arr(q)
        n = self.n
        return q[..., :n], q[..., n:2 * n], q[..., 2 * n], np.zeros(q.shape[:-1])


@dataclass(frozen=True)
class HeisenbergTranslation(ContactMap):
    """(x, y, z) -> (x + a, y, z - a.y/2); contact with g = 0, not equivariant."""

    n: int
    a: tuple[float, ...]

    def evaluate(self, q):
        q = _arr(q)
        n = self.n
        a = np.array(self.a, float)
        x, y, z = q[..., :n], q[..., n:2 * n], q[..., 2 * n]
        return x + a, y, z - _dot(a, y) / 2, np.zeros(q.shape[:-1])


@dataclass(frozen=True)
class CubicProfile:
    """rho(s) = A (1 - s)^3 on [0, 1], zero beyond: convex, supported in [0, 1]."""

    A: float

    def rho(self, s):
        t = np.clip(1 - np.asarray(s, float), 0, None)
        return self.A * t ** 3

    def d1(self, s):
        t = np.clip(1 - np.asarray(s, float), 0, None)
        return -3 * self.A * t ** 2

    def d2(self, s):
        t = np.clip(1 - np.asarray(s, float), 0, None)
        return 6 * self.A * t


@dataclass(frozen=True)
class ZeroProfile:
    def rho(self, s):
        return np.zeros_like(np.asarray(s, float))

    d1 = d2 = rho


@dataclass(frozen=True)
class RadialContactMap(ContactMap):
    """Lift of w -> exp(i 2pi/R rho'(pi|w|^2/R)) w with z-shift F(s) = rho(s) - s rho'(s).

    F solves dF = psi^*lambda_0 - lambda_0 with lambda_0 = (y dx - x dy)/2,
    so the conformal exponent g vanishes identically.
    """

    n: int
    R: float
    profile: CubicProfile | ZeroProfile = field(default_factory=lambda: CubicProfile(5 / 6))

    def __post_init__(self):
        grid = np.linspace(0, 1, 201)
        if np.any(self.profile.d2(grid) < 0):
            raise ValueError("profile must be convex")
        if abs(float(self.profile.rho(1.0))) > 0 or abs(float(self.profile.d1(1.0))) > 0:
            raise ValueError("profile must vanish at s = 1")

    def s(self, q):
        q = _arr(q)
        n = self.n
        return math.pi * (_dot(q[..., :n], q[..., :n]) + _dot(q[..., n:2 * n], q[..., n:2 * n])) / self.R

    def shift(self, s):
        return self.profile.rho(s) - s * self.profile.d1(s)

    def evaluate(self, q):
        q = _arr(q)
        n = self.n
        s = self.s(q)
        ang = 2 * math.pi / self.R * self.profile.d1(s)
        x, y = _rotate_pairs(q[..., :n], q[..., n:2 * n], ang[..., None])
        return x, y, q[..., 2 * n] + self.shift(s), np.zeros(q.shape[:-1])


MAPS = {
    "radial": lambda n: RadialContactMap(n, 1.0),
    "identity": Identity,
    "translation": lambda n: HeisenbergTranslation(n, (0.3,) * n),
}


def base_form(q) -> np.ndarray:
    """Covector of dz - (y dx - x dy)/2 on R^(2n+1)."""
    q = _arr(q)
    n = (q.shape[-1] - 1) // 2
    x, y = q[..., :n], q[..., n:2 * n]
    return np.concatenate([-y / 2, x / 2, np.ones(q.shape[:-1] + (1,))], axis=-1)


def lift_contact_residual(phi: ContactMap, q, h: float = 1e-5) -> np.ndarray:
    """|phi^*alpha - e^g alpha| by central differences; checks the claimed g."""
    q = _arr(q)
    J = central_jacobian(phi, q, h)
    pull = np.einsum("...i,...ij->...j", base_form(phi(q)), J)
    g = phi.evaluate(q)[3]
    return np.linalg.norm(pull - np.exp(g)[..., None] * base_form(q), axis=-1)


def graph(phi: ContactMap, q) -> np.ndarray:
    """gr_phi(q) = (q, phi(q), g(q))."""
    q = _arr(q)
    px, py, pz, g = phi.evaluate(q)
    return np.concatenate([q, px, py, np.asarray(pz)[..., None], np.asarray(g)[..., None]],
                          axis=-1)


def gamma(phi: ContactMap, q) -> np.ndarray:
    """The Legendrian embedding of R^(2n+1) attached to phi, in closed form."""
    q = _arr(q)
    n = phi.n
    x, y, z = q[..., :n], q[..., n:2 * n], q[..., 2 * n]
    p1, p2, p3, g = phi.evaluate(q)
    e = np.exp(g / 2)[..., None]
    Q = np.concatenate([(e * x + p1) / 2, (e * y + p2) / 2, z[..., None]], axis=-1)
    P = np.concatenate([p2 - e * y, e * x - p1, (np.exp(g) - 1)[..., None]], axis=-1)
    u = p3 - z + np.exp(g / 2) * (_dot(x, p2) - _dot(y, p1)) / 2
    return join_jet(Q, P, u)


def gamma_via(embedding: Callable, phi: ContactMap, q) -> np.ndarray:
    return embedding(graph(phi, q))


def equivariance_residual(phi: ContactMap, lens: LensData | Rotation, q,
                          embedding: Callable | None = None) -> np.ndarray:
    """|gamma(tau q) - tau(gamma(q))|, with gamma = embedding o gr_phi when given."""
    q = _arr(q)
    if embedding is None:
        lhs, rhs = gamma(phi, tau(q, lens, "base")), gamma(phi, q)
    else:
        lhs, rhs = gamma_via(embedding, phi, tau(q, lens, "base")), gamma_via(embedding, phi, q)
    return np.linalg.norm(lhs - tau(rhs, lens, "jet"), axis=-1)


def random_base_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(count, 2 * n + 1))


# generating functions

@dataclass
class GeneratingReport:
    points: int
    max_discrepancy: float
    degenerate: list[int]
    tolerance: float

    @property
    def ok(self) -> bool:
        return not self.degenerate and self.max_discrepancy < self.tolerance


def _grad(f, x, h):
    d = x.shape[-1]
    out = np.empty(d)
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        out[j] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def _fiber_critical(S, q, N, h, iters=50, hess_tol=1e-8):
    """Newton iteration for dS/dxi = 0 at fixed q; returns (xi, nondegenerate)."""
    xi = np.zeros(N)
    fiber = lambda v: S(q, v)  # noqa: E731
    for _ in range(iters):
        g = _grad(fiber, xi, h)
        H = np.column_stack([(_grad(fiber, xi + e, h) - _grad(fiber, xi - e, h)) / (2 * h)
                             for e in np.eye(N) * h])
        if abs(np.linalg.det(H)) < hess_tol:
            return xi, False
        step = np.linalg.solve(H, g)
        xi = xi - step
        if np.linalg.norm(step) < 1e-13:
            break
    return xi, True


def _i_map(S, q, xi, h):
    """i_S(q, xi) = (q, dS/dq, S)."""
    return np.concatenate([q, _grad(lambda v: S(v, xi), q, h), [S(q, xi)]])


def pullback_generating_check(S: Callable, lens: LensData, N: int, points: int = 50,
                              seed: int = 0, h: float = 1e-4,
                              tol: float = TOL.finite_difference) -> GeneratingReport:
    """Compare the locus generated by S(tau q; xi) with tau^{-1} of the locus of S.

    Both loci are parametrized by the base point, which is fine when the
    fiber-critical point is unique, as for the quadratic test functions.
    """
    rng = np.random.default_rng(seed)
    qs = random_base_points(rng, lens.n, points)
    Sbar = lambda q, xi: S(tau(q, lens, "base"), xi)  # noqa: E731
    worst, bad = 0.0, []
    for idx, q in enumerate(qs):
        xb, ok1 = _fiber_critical(Sbar, q, N, h)
        tq = tau(q, lens, "base")
        x0, ok2 = _fiber_critical(S, tq, N, h)
        if not (ok1 and ok2):
            bad.append(idx)
            continue
        lhs = _i_map(Sbar, q, xb, h)
        rhs = tau(_i_map(S, tq, x0, h), lens, "jet", power=-1)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return GeneratingReport(points, worst, bad, tol)


# translated points of radial maps

def translated_points(phi: RadialContactMap, tol: float = 1e-14) -> list[tuple[float, float]]:
    """Circles where rho'(s) = -jR, j >= 1, with action F(s) = rho(s) - s rho'(s).

    rho' is nondecreasing on [0, 1] with rho'(1) = 0, so each level is
    crossed at most once and plain bisection suffices.
    """
    prof, R = phi.profile, phi.R
    lowest = float(prof.d1(0.0))
    out = []
    j = 1
    while -j * R > lowest:
        target = -j * R
        lo, hi = 0.0, 1.0
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if prof.d1(mid) < target:
                lo = mid
            else:
                hi = mid
        s = (lo + hi) / 2
        if abs(float(prof.d2(s))) < TOL.degenerate_curvature:
            warnings.warn(f"degenerate crossing at s={s} for j={j}", RuntimeWarning)
        out.append((s, float(phi.shift(s))))
        j += 1
    return out


def induced_profile(phi: RadialContactMap) -> Profile:
    """Exact critical data read off the float profile at its translated points."""
    pts = translated_points(phi)
    radii = tuple(Fraction(s) for s, _ in pts)
    values = tuple(Fraction(float(phi.profile.rho(s))) for s, _ in pts)
    return Profile(Fraction(phi.R), radii, values, Fraction(float(phi.profile.rho(0.0))))


# batch sweeps and reports

@dataclass(frozen=True)
class ResidualRecord:
    point: tuple[float, ...]
    lam: float | None
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def to_dict(self) -> dict:
        return {"point": list(self.point), "lambda": self.lam, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed}


def _contact_chunk(args):
    name, chunk, h, form = args
    lam, res = contact_factor_residual(EMBEDDINGS[name], chunk, h, form)
    return lam.tolist(), res.tolist()


def _equivariance_chunk(args):
    map_name, emb_name, lens, chunk = args
    phi = MAPS[map_name](lens.n)
    emb = None if emb_name == "sigma" else EMBEDDINGS[emb_name]
    return equivariance_residual(phi, lens, chunk, emb).tolist()


def _run(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps input order, so the report does not depend on scheduling
        return list(pool.map(fn, tasks))


def _chunks(a: np.ndarray, size: int) -> list[np.ndarray]:
    return [a[i:i + size] for i in range(0, len(a), size)] or [a]


def contact_sweep(embedding: str, pts: np.ndarray, h: float = 1e-5, form: str = "symmetric",
                  workers: int = 1, tol: float = TOL.finite_difference,
                  chunk: int = 250) -> list[ResidualRecord]:
    results = _run(_contact_chunk, [(embedding, c, h, form) for c in _chunks(pts, chunk)],
                   workers)
    recs = []
    for c, (lams, ress) in zip(_chunks(pts, chunk), results):
        for p, l, r in zip(c, lams, ress):
            recs.append(ResidualRecord(tuple(float(v) for v in p), l, r, tol))
    return recs


def equivariance_sweep(map_name: str, embedding: str, lens: LensData, pts: np.ndarray,
                       workers: int = 1, tol: float = TOL.closed_form,
                       chunk: int = 250) -> list[ResidualRecord]:
    results = _run(_equivariance_chunk,
                   [(map_name, embedding, lens, c) for c in _chunks(pts, chunk)], workers)
    recs = []
    for c, ress in zip(_chunks(pts, chunk), results):
        for p, r in zip(c, ress):
            recs.append(ResidualRecord(tuple(float(v) for v in p), None, r, tol))
    return recs


def richardson_orders(embedding: Callable, pts: np.ndarray,
                      steps: Sequence[float] = (1e-3, 1e-4, 1e-5)) -> tuple[float, list[float]]:
    """Observed order of the difference Jacobian, and the max residual at each step.

    The order comes from the Richardson differences |J_h1 - J_h2| and
    |J_h2 - J_h3|.  The residual itself sits at the rounding floor for the
    symmetric embedding, because the truncation error of the theta column
    is annihilated by du - p dq, so it cannot show the decay on its own.
    """
    if len(steps) != 3 or not steps[0] / steps[1] == steps[1] / steps[2] > 1:
        raise ValueError("need three geometrically decreasing steps")
    J = [central_jacobian(embedding, pts, h) for h in steps]
    d1, d2 = float(np.max(np.abs(J[0] - J[1]))), float(np.max(np.abs(J[1] - J[2])))
    order = math.log(d1 / d2) / math.log(steps[0] / steps[1])
    maxima = [float(np.max(contact_factor_residual(embedding, pts, h)[1])) for h in steps]
    return order, maxima


def sweep_summary(records: list[ResidualRecord], check: str, expected_negative: bool) -> dict:
    worst = max(r.residual for r in records)
    passed = all(r.passed for r in records)
    return {
        "check": check,
        "points": len(records),
        "max_residual": worst,
        "tolerance": records[0].tolerance,
        "pass": passed,
        "expected_negative": expected_negative,
        "records": [r.to_dict() for r in records],
    }
