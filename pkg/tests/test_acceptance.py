"""Acceptance criteria 1-13, each at its stated tolerance and time budget.

Each test prints ``criterion N: PASS|FAIL ...``; a summary of all lines is
written at the end of the session. Run directly for the lines alone:

    python3 tests/test_acceptance.py
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from hypmetrics import closed_forms as cf
from hypmetrics import kobayashi_planar as kp
from hypmetrics import qh_engine as qe
from hypmetrics.bounds_lab import algebra
from hypmetrics.bounds_lab.sampling import Region, sample_pairs
from hypmetrics.bounds_lab.suites import SuiteConfig, check_inequality, check_limit
from hypmetrics.geometry import Disc, HalfPlane, Interval, unit_square

RESULTS = {}


def criterion_1():
    c0, arg = algebra.c0_solve()
    ok = abs(c0 - (1 + math.sqrt(2) / 2)) < 1e-10 and abs(arg - math.sqrt(2) / 2) < 1e-8
    return ok, f"c0={c0:.15f} argmin={arg:.15f}", 1.0


def criterion_2():
    rng = np.random.default_rng(2)
    gamma = rng.uniform(0.0, 10.0, 10 ** 4)
    c2 = rng.uniform(math.sqrt(2) / 2, 5.0, 10 ** 4)
    delta = rng.uniform(0.0, 1.0, 10 ** 4) * (gamma + 1.0)
    r1 = np.max(np.abs(algebra.g_identity_residual(gamma, c2)))
    r2 = np.max(np.abs(algebra.g_difference_residual(gamma, delta, c2)))
    return max(r1, r2) < 1e-10, f"max residuals {r1:.2e}, {r2:.2e}", 1.0


def criterion_3():
    rep = check_inequality(SuiteConfig("rho_triangle", pairs=10 ** 4, fields=10, seed=3))
    return rep.violations == 0 and len(rep.lhs) == 10 ** 5, \
        f"violations={rep.violations} min_margin={rep.min_margin:.2e}", 5.0


def criterion_4():
    rep = check_inequality(SuiteConfig("chain", pairs=10 ** 5, seed=4))
    return rep.violations == 0, f"violations={rep.violations} min_margin={rep.min_margin:.2e}", 5.0


def criterion_5():
    bad, worst = 0, math.inf
    for domain in (Disc(), unit_square()):
        rep = check_inequality(SuiteConfig("ghm", domain=domain, pairs=500, seed=5, resolution=0.02))
        bad += rep.violations
        worst = min(worst, rep.min_margin)
    return bad == 0, f"violations={bad} min(upper - i)={worst:.2e}", 120.0


def criterion_6():
    hp = HalfPlane((1.0, 0.0), 0.0)
    z, w = sample_pairs(Region(hp, d_range=(0.5, 2.0)), 100, 6, "acceptance/half_space")
    err = 0.0
    for a, b in zip(z, w):
        res = qe.h_num(hp, a, b, 0.01)
        s = cf.s_dist(a[0], b[0], float(np.linalg.norm(a - b)))
        err = max(err, abs(res.upper - s))
    ups = qe.convergence_study(hp, z[0], w[0], [0.1, 0.05, 0.025]).uppers()
    monotone = all(y <= x + 1e-9 for x, y in zip(ups, ups[1:]))
    return err <= 5e-3 and monotone, f"max |upper - s|={err:.2e} uppers={[round(u, 9) for u in ups]}", 300.0


def criterion_7():
    iv = Interval(0.0, 1.0)
    rng = np.random.default_rng(7)
    err = 0.0
    for z, w in rng.uniform(0.0, 1.0, size=(100, 2)):
        lo, hi = sorted((z, w))
        pts = [0.5] if lo < 0.5 < hi else None
        oracle = quad(lambda t: 1.0 / min(t, 1.0 - t), lo, hi, points=pts, epsabs=1e-13, epsrel=1e-13)[0]
        err = max(err, abs(qe.h_num(iv, [z], [w]).upper - oracle))
    return err <= 1e-9, f"max error {err:.2e}", 1.0


def criterion_8():
    out = []
    ok = True
    for sid in ("main_k", "main_h"):
        rep = check_inequality(SuiteConfig(sid, domain=Disc(), c=1.8, anchor=(1.0, 0.0), pairs=200, seed=8))
        ok &= rep.violations == 0 and rep.metadata["radius"] >= 0.0125
        out.append(f"{sid}: violations={rep.violations} at radius {rep.metadata['radius']}")
    return ok, "; ".join(out), 300.0


def criterion_9():
    rep = check_inequality(SuiteConfig("gap", domain=Disc(), anchor=(1.0, 0.0), radius=0.2, pairs=1000, seed=9))
    top = float(np.max(rep.lhs))
    return rep.violations == 0, f"max 2k - i_D={top:.4f} bound {cf.CONSTANTS.gap:.4f} + 0.05", 120.0


def criterion_10():
    rep = check_limit(SuiteConfig("sup_ratio", domain=Disc(), anchor=(1.0, 0.0), radii=(0.2, 0.1, 0.05),
                                  pairs=100, seed=10))
    s = rep.statistics()
    ok = s[0] > s[1] > s[2] and s[2] <= 0.55
    return ok, f"max k/upper by radius {[round(x, 4) for x in s]}", 300.0


def criterion_11():
    hp = check_limit(SuiteConfig("lim_ratio", domain=HalfPlane(), anchor=(0.0, 0.0), radii=(0.2, 0.1, 0.05),
                                 pairs=100, seed=11))
    dc = check_limit(SuiteConfig("lim_ratio", domain=Disc(), anchor=(1.0, 0.0), radii=(0.2, 0.1, 0.05),
                                 pairs=100, seed=11))
    a, b = hp.statistics(), dc.statistics()
    ok = max(a) <= 1e-3 and b[0] > b[1] > b[2]
    return ok, f"half-plane {[f'{x:.1e}' for x in a]} disc {[round(x, 4) for x in b]}", 300.0


def criterion_12():
    vals = [kp.npt_divergence(t) for t in (0.9, 0.99, 0.999)]
    increasing = vals[0] < vals[1] < vals[2]
    growth = vals[2] - vals[0]
    return increasing and growth > 1.0, \
        f"values {[round(v, 4) for v in vals]} increasing={increasing} growth={growth:.4f} (needs > 1)", 60.0


def criterion_13():
    rng = np.random.default_rng(13)
    b = rng.uniform(-0.999, 0.999, 10 ** 4)
    a = b + (0.999 - b) * rng.random(10 ** 4)
    err_k = max(abs(cf.k_disc_real(x, y) - cf.poincare_disc(x, y)) for x, y in zip(a, b))
    u = kp.from_map("npt_example")
    zeta = 0.95 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    err_inv = max(abs(kp.invert_map(u, complex(u.forward(x))) - x) for x in zeta)
    rep = check_inequality(SuiteConfig("k_le_h", domain=Disc(), pairs=100, seed=13))
    ok = err_k <= 1e-12 and err_inv <= 1e-10 and rep.violations == 0
    return ok, f"k_disc_real err {err_k:.1e}, roundtrip err {err_inv:.1e}, k <= h violations {rep.violations}", 60.0


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 14)}


def evaluate(n):
    t0 = time.perf_counter()
    ok, detail, budget = CRITERIA[n]()
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < budget
    line = f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {detail}  [{elapsed:.2f} s / {budget:g} s]"
    RESULTS[n] = line
    return passed, line


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None and RESULTS:
        reporter.write_line("")
        for n in sorted(RESULTS):
            reporter.write_line(RESULTS[n])


@pytest.mark.parametrize("n", range(1, 14))
def test_criterion(n):
    passed, line = evaluate(n)
    print(line)
    assert passed, line


if __name__ == "__main__":
    for n in CRITERIA:
        print(evaluate(n)[1], flush=True)
