import cmath
import math

import numpy as np
import pytest

from hypmetrics import closed_forms as cf
from hypmetrics import conformal
from hypmetrics import kobayashi_planar as kp
from hypmetrics import qh_engine as qe
from hypmetrics.geometry import Disc, HalfPlane, MappedDisc, unit_square


@pytest.fixture(scope="module")
def npt():
    return kp.from_map("npt_example")


@pytest.fixture(scope="module")
def ident():
    return kp.uniformize(Disc())


def test_example_map_values(npt):
    assert kp.eval_map(npt, 0) == 0
    assert kp.eval_derivative(npt, 0) == 1
    assert kp.eval_map(npt, 0.5) == pytest.approx(1 + 0.5 * math.log(0.5), abs=1e-15)
    assert kp.eval_map(npt, -1) == pytest.approx(-2 + 2 * math.log(2), abs=1e-15)
    assert kp.eval_map(npt, 1) == 2
    with pytest.raises(conformal.BranchPointError):
        kp.eval_derivative(npt, 1)
    with pytest.raises(ValueError):
        kp.eval_map(npt, 1.5)


def test_example_map_invariants(npt):
    t = np.linspace(-0.99, 0.999, 50)
    vals = npt.forward(t)
    assert np.all(np.abs(vals.imag) < 1e-15)
    assert abs(kp.eval_map(npt, 1 - 1e-12) - 2) < 1e-9
    assert npt.check_univalent_sample()


def test_derivative_matches_finite_differences(rng):
    for name in ("identity", "cayley", "npt_example"):
        u = kp.from_map(name)
        zeta = 0.9 * np.sqrt(rng.random(50)) * np.exp(2j * np.pi * rng.random(50))
        h = 1e-6
        fd = (u.forward(zeta + h) - u.forward(zeta - h)) / (2 * h)
        assert np.all(np.abs(fd - u.derivative(zeta)) <= 1e-6 * np.abs(u.derivative(zeta)))


def test_branch_cut_is_principal(npt):
    # just above and below the real axis near zeta = 1 the map is continuous
    a = kp.eval_map(npt, complex(0.99, 1e-12))
    b = kp.eval_map(npt, complex(0.99, -1e-12))
    assert abs(a - b) < 1e-9


def test_invert_examples(npt):
    assert kp.invert_map(npt, 0) == 0
    assert kp.invert_map(npt, 0.6534264097200273) == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(kp.InversionError):
        kp.invert_map(npt, 2.05)
    with pytest.raises(kp.InversionError):
        kp.invert_map(npt, complex(0.0, 3.0))


def test_roundtrip(npt, rng):
    zeta = 0.95 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    for name in ("npt_example", "cayley", "identity"):
        u = kp.from_map(name)
        back = np.array([kp.invert_map(u, complex(u.forward(x))) for x in zeta])
        assert np.max(np.abs(back - zeta)) < 1e-10


def test_k_dist_examples(npt, ident):
    assert kp.k_dist(npt, kp.eval_map(npt, 0.5), 0) == pytest.approx(math.atanh(0.5), abs=1e-12)
    assert kp.k_dist(npt, 0.3 + 0.1j, 0.3 + 0.1j) == 0.0
    assert kp.k_dist(ident, 0.5, -0.5) == pytest.approx(1.0986123, abs=5e-8)
    assert kp.k_dist(ident, (0.5, 0.0), (0.0, 0.0)) == pytest.approx(0.5493061, abs=5e-8)


def test_half_plane_k_matches_formula():
    hp = kp.uniformize(HalfPlane((0.0, 1.0), 0.5))
    z, w = complex(0.3, 0.9), complex(-0.4, 2.0)
    # k = atanh |z - w| / |z - reflect(w)| across the line y = 0.5
    reflected = complex(w.real, 1.0 - w.imag)
    assert kp.k_dist(hp, z, w) == pytest.approx(math.atanh(abs(z - w) / abs(z - reflected)), abs=1e-12)


def test_kappa_examples(npt, ident):
    assert kp.kappa_metric(ident, 0, 1) == pytest.approx(1.0, abs=1e-15)
    assert kp.kappa_metric(ident, 0.5, 1) == pytest.approx(4 / 3, abs=1e-15)
    assert kp.kappa_metric(npt, 0, 1) == pytest.approx(1.0, abs=1e-15)
    assert kp.kappa_metric(ident, 0.5, 2j) == pytest.approx(8 / 3, abs=1e-15)


def test_kappa_le_inverse_distance(npt, rng):
    d = npt.domain
    lo, hi = d.bbox()
    p = rng.uniform(lo, hi, size=(200, 2))
    p = p[d.contains_many(p)]
    dist = d.distance_many(p)
    for pt, dd in zip(p, dist):
        assert kp.kappa_metric(npt, pt, 1.0) <= 1.0 / dd * (1 + 1e-9)


def test_kappa_d_near_boundary_on_disc(ident, rng):
    z = 0.8 + 0.2 * rng.random(200)
    z = z * np.exp(2j * np.pi * rng.random(200))
    vals = [kp.kappa_metric(ident, x, 1.0) * (1 - abs(x)) for x in z]
    # on the disc kappa * d = 1 / (1 + |z|), above 1/2 and tending to it
    np.testing.assert_allclose(vals, 1.0 / (1.0 + np.abs(z)), rtol=1e-12)
    assert max(vals) <= 1 / 1.8 + 1e-12


def test_k_le_h_upper(npt):
    d = npt.domain
    # generic domains refine with the pure-Python descent; one pair keeps this quick
    for z, w in [((0.1, 0.1), (0.9, -0.2))]:
        assert kp.k_dist(npt, z, w) <= qe.h_num(d, z, w, 0.02).upper + 1e-6


def test_k_integrates_kappa(ident):
    d = Disc()
    res = qe.h_num(d, (0.7, 0.1), (-0.2, 0.6), 0.02)
    path = res.path
    mids = 0.5 * (path[1:] + path[:-1])
    seg = np.linalg.norm(path[1:] - path[:-1], axis=1)
    integral = sum(kp.kappa_metric(ident, m, 1.0) * s for m, s in zip(mids, seg))
    assert kp.k_dist(ident, (0.7, 0.1), (-0.2, 0.6)) <= integral + 2e-3


def test_uniformize_rejects_polygon():
    with pytest.raises(kp.IncompatibleDomainError):
        kp.uniformize(unit_square())


def test_npt_divergence_values():
    d = MappedDisc("npt_example")
    assert kp.npt_divergence(0.0) == pytest.approx(math.log(d.boundary_distance((0.0, 0.0))), abs=1e-15)
    vals = [kp.npt_divergence(t) for t in (0.9, 0.99, 0.999)]
    assert vals[0] < vals[1] < vals[2]
    with pytest.raises(ValueError):
        kp.npt_divergence(1.0)


def test_npt_divergence_against_dense_oracle():
    d = MappedDisc("npt_example")
    theta = 2 * np.pi * (np.arange(10 ** 6) + 0.5) / 10 ** 6
    theta = np.concatenate([theta, 1e-7 * np.linspace(-50, 50, 2001)])
    zb = d.map(np.exp(1j * theta))
    for t in (0.9, 0.99, 0.999):
        z = complex(d.map(t))
        oracle = 2 * math.atanh(t) + math.log(np.min(np.abs(zb - z)))
        assert kp.npt_divergence(t) == pytest.approx(oracle, abs=1e-4)
