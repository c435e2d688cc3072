import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypmetrics import geometry as g
from hypmetrics.geometry import (BoundaryCurve, Disc, DiniModulus, HalfPlane, Interval, MappedDisc,
                                 Polygon, dini_diagnostic, dini_integral, modulus_table, normal_modulus)


def test_contains_examples(disc, half_plane, interval):
    assert g.contains(disc, (0.3, 0.0))
    assert not g.contains(half_plane, (-1.0, 5.0))
    assert g.contains(interval, 0.5)
    assert not g.contains(disc, (1.0, 0.0))


def test_contains_dimension_mismatch(disc, interval):
    with pytest.raises(g.DimensionError):
        disc.contains((0.1, 0.2, 0.3))
    with pytest.raises(g.DimensionError):
        interval.contains((0.1, 0.2))


def test_boundary_distance_examples(disc, square):
    assert g.boundary_distance(disc, (0.3, 0.0)) == pytest.approx(0.7, abs=1e-15)
    assert g.boundary_distance(square, (0.2, 0.5)) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(g.NotInteriorError):
        g.boundary_distance(disc, (2.0, 0.0))


def test_analytic_distances(rng):
    d = Disc((0.5, -1.0), 2.0)
    p = d.center + rng.uniform(-1.4, 1.4, size=(500, 2))
    p = p[d.contains_many(p)]
    np.testing.assert_allclose(d.distance_many(p), 2.0 - np.linalg.norm(p - d.center, axis=1), atol=1e-12)
    h = HalfPlane((3.0, 4.0), 1.0)
    q = rng.uniform(0, 5, size=(500, 2))
    q = q[h.contains_many(q)]
    np.testing.assert_allclose(h.distance_many(q), q @ np.array([0.6, 0.8]) - 1.0, atol=1e-12)
    iv = Interval(0.0, None)
    assert iv.boundary_distance(3.5) == 3.5


def test_npt_distance_against_dense_oracle(npt_domain, rng):
    # 10^6 boundary samples, brute force
    theta = 2 * np.pi * (np.arange(10 ** 6) + 0.5) / 10 ** 6
    zb = npt_domain.map(np.exp(1j * theta))
    pts = np.vstack([[0.0, 0.0], npt_domain.map(0.5 * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))).view(float).reshape(-1, 2)])
    got = npt_domain.distance_many(pts)
    oracle = np.array([np.min(np.abs(zb - complex(*p))) for p in pts])
    bound = npt_domain.distance_error_bound()
    assert np.all(np.abs(got - oracle) <= bound + 1e-9)


def test_distance_one_lipschitz_and_ball_inside(square, npt_domain, rng):
    for d in (square, npt_domain, Disc()):
        lo, hi = d.bbox()
        p = rng.uniform(lo, hi, size=(400, 2))
        p = p[d.contains_many(p)]
        dist = d.distance_many(p)
        assert np.all(dist > 0)
        a, b = p[:-1], p[1:]
        assert np.all(np.abs(dist[:-1] - dist[1:]) <= np.linalg.norm(a - b, axis=1) + 1e-9)
        v = rng.normal(size=p.shape)
        v *= (0.99 * dist * rng.random(len(p)) / np.linalg.norm(v, axis=1))[:, None]
        assert d.contains_many(p + v).all()


def test_sample_boundary_disc():
    patch = g.sample_boundary(Disc(), 4)
    np.testing.assert_allclose(patch.points, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    np.testing.assert_allclose(patch.normals, -patch.points, atol=1e-15)


def test_sample_boundary_square_skips_corners(square):
    patch = square.sample_boundary(8)
    assert len(patch) == 4  # corners dropped, edge midpoints kept
    mids = {tuple(np.round(p, 12)) for p in patch.points}
    assert mids == {(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)}


@pytest.mark.parametrize("domain_id", ["npt", "square", "disc"])
def test_sample_boundary_normals_point_inward(domain_id, npt_domain, square):
    d = {"npt": npt_domain, "square": square, "disc": Disc()}[domain_id]
    patch = d.sample_boundary(1000)
    np.testing.assert_allclose(np.linalg.norm(patch.normals, axis=1), 1.0, atol=1e-12)
    assert np.all(d.distance_many(patch.points) < 1e-6)
    away = np.linalg.norm(patch.points - np.array([2.0, 0.0]), axis=1) > 1e-2
    probe = patch.points[away] + 1e-4 * patch.normals[away]
    assert d.contains_many(probe).all()


def test_normal_modulus_examples(square):
    circle = Disc().sample_boundary(2000)
    # a lower bound of omega(0.1) = 0.1, short by at most one sample spacing
    assert 0.1 - 2 * np.pi / 2000 <= normal_modulus(circle, 0.1) < 0.1
    assert normal_modulus(circle, 1e-2) < 1.1e-2
    corner = square.sample_boundary(4003)
    assert normal_modulus(corner, 0.01) == pytest.approx(math.sqrt(2), rel=1e-2)


def test_dini_integral_examples():
    t = np.linspace(1.0, 1e-4, 2001)
    assert dini_integral(DiniModulus(t, t.copy())) == pytest.approx(1.0 - 1e-4, rel=1e-9)
    assert dini_integral(DiniModulus(t, np.zeros_like(t))) == 0.0
    with pytest.raises(ValueError):
        dini_integral(DiniModulus(np.array([]), np.array([])))


def test_dini_flags_log_modulus():
    t = np.logspace(0, -6, 601)
    slow = DiniModulus(t, 1.0 / np.abs(np.log(t / 2.0)))
    diag = dini_diagnostic(slow)
    assert diag["possibly_non_dini"]
    assert np.all(np.diff(diag["partial"]) > 0)
    fast = dini_diagnostic(DiniModulus(t, t.copy()))
    assert not fast["possibly_non_dini"]


def test_modulus_table_monotone():
    patch = Disc().sample_boundary(500)
    table = modulus_table(patch, [0.5, 0.2, 0.1, 0.05])
    assert table.is_monotone()
    assert table.omega_at_zero < 0.1


def test_polygon_rejects_self_intersection():
    with pytest.raises(g.SpecError):
        Polygon([[0, 0], [1, 1], [1, 0], [0, 1]])


def test_from_json_roundtrip():
    specs = [{"type": "disc", "center": [0, 0], "radius": 1}, {"type": "half_plane", "normal": [1, 0], "offset": 0},
             {"type": "interval", "a": 0, "b": 1}, {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
             {"type": "mapped_disc", "map": "npt_example"}]
    for spec in specs:
        d = g.from_json(json.loads(json.dumps(spec)))
        again = g.from_json(d.to_json())
        assert type(again) is type(d)
    with pytest.raises(g.SpecError):
        g.from_json({"type": "mapped_disc", "map": "nope"})
    with pytest.raises(g.SpecError):
        g.from_json({"radius": 1})


def test_boundary_curve_circle():
    th = 2 * np.pi * np.arange(4096) / 4096
    curve = BoundaryCurve(np.column_stack([np.cos(th), np.sin(th)]))
    assert curve.contains((0.2, 0.1))
    assert not curve.contains((1.2, 0.0))
    assert curve.boundary_distance((0.5, 0.0)) == pytest.approx(0.5, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_square_distance_formula(x, y):
    sq = g.unit_square()
    p = (0.5 + x / 2, 0.5 + y / 2)
    assert sq.boundary_distance(p) == pytest.approx(min(p[0], 1 - p[0], p[1], 1 - p[1]), abs=1e-15)
