import pickle
import warnings

import numpy as np
import pytest

from lensorder import contact_geo as cg
from lensorder.morse_bott import LensData, critical_data

RNG_SEED = 1234


@pytest.fixture
def rng():
    return np.random.default_rng(RNG_SEED)


def test_layout_roundtrip(rng):
    pt = cg.random_product_points(rng, 2, 1)[0]
    P = cg.ProductPoint.from_array(pt)
    assert np.array_equal(P.array, pt)
    J = cg.JetPoint.from_array(cg.sigma(pt))
    assert np.array_equal(J.array, cg.sigma(P))
    with pytest.raises(ValueError):
        cg.ProductPoint((np.inf,), (0,), 0, (0,), (0,), 0, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sigma_sends_diagonal_to_zero_section(rng, n):
    q = rng.uniform(-3, 3, size=(50, 2 * n + 1))
    out = cg.sigma(cg.diagonal(q))
    assert np.array_equal(out[:, :2 * n + 1], q)
    assert np.all(out[:, 2 * n + 1:] == 0)


def test_sigma_examples(rng):
    t = 0.37
    out = cg.sigma(np.r_[np.zeros(10), t])
    assert np.array_equal(out, np.r_[np.zeros(9), np.exp(t) - 1, 0])
    x, y, z, X, Y, Z, th = (rng.normal(size=2), rng.normal(size=2), 0.3, rng.normal(size=2),
                            rng.normal(size=2), -0.2, 0.5)
    pt = cg.join_product(x, y, z, X, Y, Z, th)
    u = Z - z + np.exp(th / 2) * (x @ Y - y @ X) / 2
    assert abs(cg.sigma(pt)[-1] - u) < 1e-15


def test_bhupal_examples(rng):
    q = rng.uniform(-1, 1, size=(20, 5))
    out = cg.sigma_bhupal(cg.diagonal(q))
    assert np.allclose(out[:, :5], q, atol=0) and np.all(out[:, 5:] == 0)
    assert np.all(cg.sigma_bhupal(np.zeros(11)) == 0)


@pytest.mark.parametrize("n", [1, 2])
def test_sigma_is_contact(rng, n):
    pts = cg.random_product_points(rng, n, 300)
    lam, res = cg.contact_factor_residual(cg.sigma, pts, 1e-5)
    assert res.max() < 1e-6
    assert np.allclose(lam, -1, atol=1e-6)


def test_contact_factor_at_origin():
    lam, res = cg.contact_factor_residual(cg.sigma, np.zeros(11), 1e-5)
    assert abs(lam + 1) < 1e-9 and res < 1e-6


def test_bhupal_contact_for_its_own_form(rng):
    pts = cg.random_product_points(rng, 2, 300)
    assert cg.contact_factor_residual(cg.sigma_bhupal, pts, 1e-5, "standard")[1].max() < 1e-6
    assert cg.contact_factor_residual(cg.sigma_bhupal, pts, 1e-5)[1].max() > 1e-3


def test_corrupted_sigma_fails(rng):
    pts = cg.random_product_points(rng, 2, 300)
    assert cg.contact_factor_residual(cg.corrupted_sigma, pts, 1e-5)[1].max() > 1e-3
    with pytest.raises(ValueError):
        cg.contact_factor_residual(cg.sigma, pts, 0)


def test_richardson(rng):
    order, maxima = cg.richardson_orders(cg.sigma, cg.random_product_points(rng, 2, 200))
    assert 1.8 < order < 2.2
    assert max(maxima) < 1e-6


@pytest.mark.parametrize("k", [2, 3, 5])
@pytest.mark.parametrize("w", [(1, 1), (1, 2), (2, 3)])
def test_tau(rng, k, w):
    rot = cg.Rotation(2, k, w)
    base = cg.random_base_points(rng, 2, 20)
    jet = rng.normal(size=(20, 11))
    for pt, where in ((base, "base"), (jet, "jet")):
        img = pt
        for _ in range(k):
            img = cg.tau(img, rot, where)
        assert np.allclose(img, pt, atol=1e-12, rtol=0)
        assert np.allclose(cg.tau(cg.tau(pt, rot, where), rot, where, power=-1), pt, atol=1e-12)
    tb = cg.tau(base, rot)
    assert np.array_equal(tb[:, 4], base[:, 4])
    assert np.allclose(np.sum(tb[:, :4] ** 2, axis=1), np.sum(base[:, :4] ** 2, axis=1))
    tj = cg.tau(jet, rot, "jet")
    assert np.array_equal(tj[:, [4, 9, 10]], jet[:, [4, 9, 10]])
    with pytest.raises(ValueError):
        cg.tau(jet, rot, "base")
    with pytest.raises(ValueError):
        cg.tau(base, rot, "fiber")


def test_gamma_identity_and_factorization(rng):
    q = cg.random_base_points(rng, 2, 100)
    out = cg.gamma(cg.Identity(2), q)
    assert np.array_equal(out[:, :5], q) and np.all(out[:, 5:] == 0)
    for phi in (cg.RadialContactMap(2, 1.0), cg.HeisenbergTranslation(2, (0.3, -0.1))):
        assert np.allclose(cg.gamma(phi, q), cg.gamma_via(cg.sigma, phi, q), atol=1e-14, rtol=0)


def test_radial_lift_is_strict_contactomorphism(rng):
    q = cg.random_base_points(rng, 2, 300)
    for phi in (cg.RadialContactMap(2, 1.0), cg.RadialContactMap(2, 0.7),
                cg.HeisenbergTranslation(2, (0.3, 0.2)), cg.Identity(2)):
        assert cg.lift_contact_residual(phi, q).max() < 1e-6
    # dF = -s rho'' ds, checked against a central difference of the shift
    phi = cg.RadialContactMap(2, 1.0)
    s, h = np.linspace(0.05, 0.95, 19), 1e-6
    dF = (phi.shift(s + h) - phi.shift(s - h)) / (2 * h)
    assert np.allclose(dF, -s * phi.profile.d2(s), atol=1e-7)


def test_gamma_at_translated_point():
    phi = cg.RadialContactMap(2, 1.0)
    for j, (s, action) in enumerate(cg.translated_points(phi), start=1):
        r = np.sqrt(s * phi.R / np.pi)
        q = np.array([r, 0, 0, 0, 0.25])
        out = cg.gamma(phi, q)
        assert np.allclose(out[5:10], 0, atol=1e-9)
        assert abs(out[10] - action) < 1e-9


@pytest.mark.parametrize("k", [2, 3, 5])
@pytest.mark.parametrize("w", [(1, 1), (1, 2)])
def test_equivariance(rng, k, w):
    rot = cg.Rotation(2, k, w)
    q = cg.random_base_points(rng, 2, 300)
    assert cg.equivariance_residual(cg.RadialContactMap(2, 1.0), rot, q).max() < 1e-9
    assert np.all(cg.equivariance_residual(cg.Identity(2), rot, q) == 0)
    if k > 2:
        assert cg.equivariance_residual(cg.HeisenbergTranslation(2, (0.3, 0.3)), rot, q).min() > 1e-3


def test_bhupal_breaks_equivariance(rng):
    q = cg.random_base_points(rng, 2, 300)
    rot = LensData(2, 5, (1, 2))
    assert cg.equivariance_residual(cg.RadialContactMap(2, 1.0), rot, q, cg.sigma_bhupal).max() > 1e-3


def test_pullback_generating_examples():
    lens = LensData(1, 3, (1,))
    rep = cg.pullback_generating_check(lambda q, xi: xi[0] ** 2, lens, 1)
    assert rep.ok and rep.max_discrepancy < 1e-12
    invariant = lambda q, xi: xi[0] ** 2 + (q[0] ** 2 + q[1] ** 2 - q[2]) * xi[0]  # noqa: E731
    assert cg.pullback_generating_check(invariant, lens, 1).ok
    linear = lambda q, xi: xi[0] ** 2 + q[0] * xi[0]  # noqa: E731
    assert cg.pullback_generating_check(linear, lens, 1).ok
    two = lambda q, xi: xi @ xi + q[0] * xi[0] - q[1] * q[2] * xi[1]  # noqa: E731
    assert cg.pullback_generating_check(two, LensData(1, 5, (2,)), 2).ok
    flat = lambda q, xi: q[0] * xi[0]  # noqa: E731
    rep = cg.pullback_generating_check(flat, lens, 1, points=5)
    assert not rep.ok and rep.degenerate == list(range(5))


def test_linear_example_locus_by_hand():
    # fiber-critical set of xi^2 + x1 xi is xi = -x1/2, with S = -x1^2/4 there
    lens = LensData(1, 3, (1,))
    S = lambda q, xi: xi[0] ** 2 + q[0] * xi[0]  # noqa: E731
    q = np.array([0.4, -0.3, 0.2])
    xi, ok = cg._fiber_critical(S, q, 1, 1e-4)
    assert ok and abs(xi[0] + 0.2) < 1e-9
    i_s = cg._i_map(S, q, xi, 1e-4)
    assert np.allclose(i_s, [0.4, -0.3, 0.2, -0.2, 0, 0, -0.04], atol=1e-9)


def test_translated_points():
    phi = cg.RadialContactMap(2, 1.0)
    pts = cg.translated_points(phi)
    assert len(pts) == 2
    s1, s2 = (1 - np.sqrt(0.4), 1 - np.sqrt(0.8))
    assert abs(pts[0][0] - s1) < 1e-12 and abs(pts[1][0] - s2) < 1e-12
    for j, (s, action) in enumerate(pts, start=1):
        assert 0 < action < j * phi.R
    prof = cg.induced_profile(phi)
    values = [float(c.value) for c in critical_data(prof, LensData(2, 3, (1, 1)))
              if c.stratum.kind == "Sphere"]
    assert np.allclose(values, [a for _, a in pts], atol=1e-8, rtol=0)
    assert cg.translated_points(cg.RadialContactMap(2, 1.0, cg.ZeroProfile())) == []


def test_degenerate_crossing_warns():
    class Flat(cg.CubicProfile):
        def d2(self, s):
            return 0 * np.asarray(s, float)

    phi = cg.RadialContactMap.__new__(cg.RadialContactMap)
    object.__setattr__(phi, "n", 1)
    object.__setattr__(phi, "R", 1.0)
    object.__setattr__(phi, "profile", Flat(5 / 6))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cg.translated_points(phi)
    assert any("degenerate" in str(w.message) for w in caught)


def test_profile_validation():
    with pytest.raises(ValueError):
        cg.RadialContactMap(1, 1.0, cg.CubicProfile(-1.0))


def test_maps_are_picklable():
    for phi in (cg.RadialContactMap(2, 1.0), cg.HeisenbergTranslation(2, (0.1, 0.2))):
        assert pickle.loads(pickle.dumps(phi)) == phi


def test_sweeps_are_order_stable(rng):
    pts = cg.random_product_points(rng, 2, 120)
    serial = cg.contact_sweep("sigma", pts, chunk=25)
    parallel = cg.contact_sweep("sigma", pts, workers=3, chunk=25)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]
    summary = cg.sweep_summary(serial, "contact:sigma", False)
    assert summary["pass"] and summary["points"] == 120
    base = cg.random_base_points(rng, 2, 60)
    lens = LensData(2, 5, (1, 2))
    a = cg.equivariance_sweep("radial", "sigma", lens, base, chunk=16)
    b = cg.equivariance_sweep("radial", "sigma", lens, base, workers=2, chunk=16)
    assert [r.residual for r in a] == [r.residual for r in b]
