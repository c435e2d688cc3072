import math

import numpy as np
import pytest
from scipy.integrate import quad

from hypmetrics import closed_forms as cf
from hypmetrics import qh_engine as qe
from hypmetrics.geometry import Disc, HalfPlane, Interval, Polygon, unit_square

L_SHAPE = Polygon([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])


def quad_length(domain, path):
    total = 0.0
    for a, b in zip(path[:-1], path[1:]):
        a, b = np.asarray(a, float), np.asarray(b, float)
        length = np.linalg.norm(b - a)
        f = lambda t: 1.0 / domain.distance_many((a + t * (b - a))[None, :])[0]
        total += length * quad(f, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return total


def test_path_length_examples(half_plane, disc):
    assert qe.path_length(half_plane, [[1, 0], [2, 0]]) == pytest.approx(math.log(2), abs=1e-14)
    assert qe.path_length(disc, [[0.3, 0.1]]) == 0.0
    assert qe.path_length(disc, [[-0.5, 0], [0.5, 0]]) == pytest.approx(2 * math.log(2), abs=1e-14)


@pytest.mark.parametrize("domain, path", [
    (unit_square(), [[0.1, 0.2], [0.8, 0.9], [0.95, 0.1]]),
    (L_SHAPE, [[0.2, 1.7], [0.6, 0.6], [1.8, 0.3]]),
    (Disc((0.2, 0.1), 1.5), [[-1.0, 0.3], [1.2, -0.1]]),
])
def test_path_length_against_quadrature(domain, path):
    # segments crossing the medial axis have kinks in 1/d
    assert qe.path_length(domain, path) == pytest.approx(quad_length(domain, path), rel=1e-9)


def test_path_length_mapped_disc(npt_domain):
    path = [[-0.3, 0.2], [0.4, -0.3], [1.0, 0.1]]
    assert qe.path_length(npt_domain, path) == pytest.approx(quad_length(npt_domain, path), rel=1e-7)


def test_path_length_rejects_exterior(disc, square):
    with pytest.raises(qe.PathError):
        qe.path_length(disc, [[0, 0], [1.5, 0]])
    with pytest.raises(qe.PathError):
        qe.path_length(L_SHAPE, [[1.8, 0.5], [0.5, 1.8]])


def test_interval_path_length(interval):
    assert qe.path_length(interval, [0.25, 0.75]) == pytest.approx(2 * math.log(2), abs=1e-14)


def test_h_num_half_plane_examples(half_plane):
    res = qe.h_num(half_plane, (1, 0), (2, 0), 0.02)
    assert res.lower == math.log(2) or res.lower == pytest.approx(math.log(2), abs=1e-15)
    assert abs(res.upper - math.log(2)) <= 1e-3
    res = qe.h_num(half_plane, (1, 0), (1, 1), 0.02)
    assert abs(res.upper - 2 * math.asinh(0.5)) <= 2e-3
    assert res.upper >= 2 * math.asinh(0.5) - 1e-12
    zero = qe.h_num(half_plane, (1, 0), (1, 0))
    assert zero.upper == zero.lower == 0.0


def test_h_num_result_invariants(disc, square):
    for domain, z, w in [(disc, (0.9, 0.1), (0.1, 0.9)), (square, (0.1, 0.1), (0.9, 0.5)),
                         (L_SHAPE, (1.8, 0.5), (0.5, 1.8))]:
        res = qe.h_num(domain, z, w, 0.02)
        assert res.upper == qe.path_length(domain, res.path)
        assert domain.contains_many(res.path).all()
        assert np.allclose(res.path[0], z) and np.allclose(res.path[-1], w)
        assert res.lower <= res.upper
        assert res.bracket_width == res.upper - res.lower
        assert res.lower == cf.i_dist(domain.boundary_distance(z), domain.boundary_distance(w),
                                      float(np.linalg.norm(np.subtract(z, w))))


def test_h_num_symmetric_and_deterministic(disc):
    a = qe.h_num(disc, (0.7, -0.2), (-0.4, 0.5), 0.02)
    b = qe.h_num(disc, (-0.4, 0.5), (0.7, -0.2), 0.02)
    c = qe.h_num(disc, (0.7, -0.2), (-0.4, 0.5), 0.02)
    assert abs(a.upper - b.upper) <= 1e-6
    assert a.upper == c.upper


def test_h_num_triangle_of_uppers(square, rng):
    for _ in range(4):
        z, u, w = rng.uniform(0.05, 0.95, size=(3, 2))
        h = lambda p, q: qe.h_num(square, p, q, 0.02).upper
        assert h(z, w) <= h(z, u) + h(u, w) + 2e-3


def test_h_num_disc_diameter_exact(disc):
    res = qe.h_num(disc, (-0.5, 0), (0.5, 0), 0.02)
    # the diameter is the geodesic
    assert res.upper == pytest.approx(2 * math.log(2), abs=1e-12)


def test_h_num_errors(disc):
    with pytest.raises(qe.NotInteriorError):
        qe.h_num(disc, (1.2, 0), (0, 0))
    with pytest.raises(ValueError):
        qe.h_num(disc, (0.1, 0), (0, 0), resolution=0.0)


def test_interval_delegates(interval, rng):
    for z, w in rng.uniform(0.01, 0.99, size=(20, 2)):
        assert qe.h_num(Interval(0, 1), [z], [w]).upper == pytest.approx(cf.h_exact_interval(interval, z, w), abs=1e-15)


def test_refine_path_detour(half_plane):
    detour = np.array([[1.0, 0.0], [1.5, 0.5], [2.0, 0.0]])
    before = qe.path_length(half_plane, detour)
    refined = qe.refine_path(half_plane, detour, 0.02)
    after = qe.path_length(half_plane, refined)
    assert after <= before
    assert after <= math.log(2) + 1e-3


def test_refine_path_fixed_point(half_plane):
    straight = np.array([[1.0, 0.0], [1.5, 0.0], [2.0, 0.0]])
    refined = qe.refine_path(half_plane, straight, 0.02)
    assert qe.path_length(half_plane, refined) == pytest.approx(qe.path_length(half_plane, straight), abs=1e-9)


def test_refine_path_pulls_inward(disc):
    chord = np.array([[0.6, -0.7], [0.95, 0.0], [0.6, 0.7]])
    refined = qe.refine_path(disc, chord, 0.02)
    assert qe.path_length(disc, refined) < qe.path_length(disc, chord)
    assert np.max(np.linalg.norm(refined, axis=1)) < 0.95


def test_build_graph_properties(disc):
    z, w = np.array([-0.5, 0.2]), np.array([0.6, -0.1])
    dz, dw = disc.boundary_distance(z), disc.boundary_distance(w)
    delta = min(dz, dw) * qe.CLIP_FRACTION
    g = qe.build_graph(disc, z, w, 0.05, delta, qe._search_box(disc, z, w, dz, dw))
    assert np.all(disc.distance_many(g.nodes) >= delta)
    src = np.repeat(np.arange(len(g.nodes)), np.diff(g.indptr))
    lengths = np.linalg.norm(g.nodes[g.indices] - g.nodes[src], axis=1)
    assert np.all(g.weights >= lengths / 1.0 - 1e-12)
    assert np.all(g.weights > 0)
    assert len(qe.STENCIL) == 32


def test_convergence_study_half_plane(half_plane):
    table = qe.convergence_study(half_plane, (1, 0), (1.5, 0.8), [0.1, 0.05, 0.025])
    ups = table.uppers()
    assert all(b <= a + 1e-9 for a, b in zip(ups, ups[1:]))
    assert ups[-1] >= cf.s_dist(1, 1.5, math.hypot(0.5, 0.8)) - 1e-12


def test_convergence_study_interval_and_disc(interval, disc):
    t = qe.convergence_study(interval, [0.2], [0.7], [0.1, 0.05, 0.025])
    assert all(row[1] == pytest.approx(cf.h_exact_interval(interval, 0.2, 0.7), abs=1e-15) for row in t.rows)
    d = qe.convergence_study(disc, (0.8, 0.1), (-0.2, 0.7), [0.1, 0.05, 0.025])
    ups = d.uppers()
    assert all(b <= a + 1e-9 for a, b in zip(ups, ups[1:]))
    with pytest.raises(ValueError):
        qe.convergence_study(disc, (0, 0), (0.1, 0), [0.1, 0.2, 0.05])
