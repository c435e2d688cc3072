"""Inequality and limit suites over sampled pairs.

Every suite is declared in ``SUITES`` with the domains it accepts and, when
it uses numerically computed h, which bound it uses and whether that makes
the check stronger, weaker or conservative. ``check_inequality`` and
``check_limit`` refuse suites or domains the table does not allow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import closed_forms as cf
from .. import kobayashi_planar as kp
from ..closed_forms import CONSTANTS, LipschitzField
from ..geometry import Disc, Domain, HalfPlane, Interval, MappedDisc, unit_square
from ..qh_engine import h_num
from .sampling import Region, SamplingError, block_rng, sample_pairs, sample_points, sample_triples

CLOSED_FORM_TOL = 1e-12
H_TOL = 1e-9
K_LE_H_TOL = 1e-6
GAP_SLACK = 0.05
NOISE_FLOOR = 1e-3
RADIUS_HALVINGS = 4
DEFAULT_RADIUS = 0.2
DEFAULT_RADII = (0.2, 0.1, 0.05)
DEFAULT_T = (0.9, 0.99, 0.999)
PROBE_LABEL = "hypothesis-violating probe"


class UnsoundSuiteError(ValueError):
    """Suite and domain do not form a combination the suite can check soundly."""


@dataclass(frozen=True)
class SuiteSpec:
    kind: str              # "inequality" or "limit"
    domains: str           # "any", "uniformized", "dini" (uniformized, smooth boundary) or "none"
    h_bound: str = ""      # "", "upper" or "lower"
    effect: str = ""       # how the h estimate affects the verdict
    limit: float = 0.0


SUITES = {
    "ghm": SuiteSpec("inequality", "any", "upper", "weakens: an upper below i_D exposes the engine, "
                     "a true violation hidden under the upper is not detectable"),
    "chain": SuiteSpec("inequality", "any"),
    "main_k": SuiteSpec("inequality", "dini"),
    "main_h": SuiteSpec("inequality", "dini_any", "upper", "strengthens: h <= upper <= v^c"),
    "fr": SuiteSpec("inequality", "dini"),
    "npt": SuiteSpec("inequality", "uniformized"),
    "gap": SuiteSpec("inequality", "dini", "lower", "conservative: i_D <= h, so 2k - i_D >= 2k - h"),
    "v_axioms": SuiteSpec("inequality", "any"),
    "rho_triangle": SuiteSpec("inequality", "none"),
    "k_le_h": SuiteSpec("inequality", "uniformized", "upper", "weakens: k <= h is checked against h's upper"),
    "sup_ratio": SuiteSpec("limit", "dini", "upper", "weakens: k / upper <= k / h", limit=0.5),
    "lim_ratio": SuiteSpec("limit", "dini_any", "upper", "estimate: the upper converges to h", limit=0.0),
    "q_cont": SuiteSpec("limit", "any", "upper", "estimate: the upper converges to h", limit=0.0),
    "npt_div": SuiteSpec("limit", "npt", limit=math.inf),
    "kappa_half": SuiteSpec("limit", "dini", limit=0.5),
}


@dataclass
class SuiteConfig:
    suite_id: str
    domain: Domain | None = None
    pairs: int = 100
    seed: int = 0
    resolution: float = 0.02
    anchor: tuple | None = None
    radius: float | None = None
    radii: tuple | None = None
    c: float | None = None
    fields: int = 10
    t_values: tuple | None = None
    d_range: tuple | None = None

    def __post_init__(self):
        if self.suite_id not in SUITES:
            raise ValueError(f"unknown suite {self.suite_id!r}")
        if self.pairs < 1:
            raise ValueError("pair count must be at least 1")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.radii is not None and not all(r > 0 for r in self.radii):
            raise ValueError("radii must be positive")


@dataclass(eq=False)
class SuiteReport:
    suite: str
    z: np.ndarray
    w: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tolerance: float
    metadata: dict = field(default_factory=dict)

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(self.margin < -self.tolerance))

    @property
    def max_margin(self) -> float:
        return float(np.max(self.margin))

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margin))

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def records(self):
        m = self.margin
        return [{"z": self.z[k].tolist(), "w": self.w[k].tolist(), "lhs": float(self.lhs[k]),
                 "rhs": float(self.rhs[k]), "margin": float(m[k])} for k in range(len(m))]

    def to_json(self) -> dict:
        return {"suite": self.suite, "records": self.records(), "violations": self.violations,
                "max_margin": self.max_margin, "min_margin": self.min_margin,
                "tolerance": self.tolerance, "metadata": self.metadata}


@dataclass(eq=False)
class TrendReport:
    suite: str
    rows: list            # dicts: param, statistic, slack, within
    verdicts: dict
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def statistics(self):
        return [row["statistic"] for row in self.rows]

    def to_json(self) -> dict:
        return {"suite": self.suite, "rows": self.rows, "verdicts": self.verdicts,
                "passed": self.passed, "metadata": self.metadata}


# -- domain checks -----------------------------------------------------------

def _is_npt(domain):
    return isinstance(domain, MappedDisc) and domain.map_id == "npt_example"


def _resolve_domain(cfg: SuiteConfig, spec: SuiteSpec):
    d = cfg.domain
    if spec.domains == "none":
        return None
    if spec.domains == "npt":
        if d is None:
            return MappedDisc("npt_example")
        if not _is_npt(d):
            raise UnsoundSuiteError(f"{cfg.suite_id} is defined for the npt_example map only")
        return d
    if d is None:
        d = unit_square() if spec.domains == "any" else Disc()
    if isinstance(d, Interval):
        raise UnsoundSuiteError(f"{cfg.suite_id} needs a planar domain")
    if spec.domains in ("dini", "dini_any") and _is_npt(d):
        raise UnsoundSuiteError(f"{cfg.suite_id} needs a Dini-smooth boundary; the npt_example map has an "
                                "unbounded derivative at zeta = 1")
    if spec.domains in ("uniformized", "dini"):
        try:
            kp.uniformize(d)
        except kp.IncompatibleDomainError as exc:
            raise UnsoundSuiteError(f"{cfg.suite_id}: {exc}") from None
    return d


def _default_anchor(domain):
    if isinstance(domain, Disc):
        return tuple(domain.center + np.array([domain.radius, 0.0]))
    hp = domain.exact if isinstance(domain, MappedDisc) and domain.exact is not None else domain
    if isinstance(hp, Disc):
        return tuple(hp.center + np.array([hp.radius, 0.0]))
    if isinstance(hp, HalfPlane):
        return tuple(hp.offset * hp.normal)
    raise UnsoundSuiteError("an anchor point is required for this domain")


def _metadata(cfg, spec, tolerance, **extra):
    meta = {"seed": cfg.seed, "resolution": cfg.resolution, "tolerance": tolerance, "pairs": cfg.pairs}
    if spec.h_bound:
        meta["h_bound"] = spec.h_bound
        meta["h_effect"] = spec.effect
    meta.update(extra)
    return meta


# -- evaluators ----------------------------------------------------------------

def _dists(domain, z, w):
    return domain.distance_many(z), domain.distance_many(w), np.linalg.norm(z - w, axis=1)


def _h_uppers(domain, z, w, resolution):
    return np.array([h_num(domain, z[k], w[k], resolution).upper for k in range(len(z))])


def _k_values(u, z, w):
    return np.array([kp.k_dist(u, z[k], w[k]) for k in range(len(z))])


def _ghm(cfg, domain):
    z, w = sample_pairs(Region(domain, d_range=cfg.d_range), cfg.pairs, cfg.seed, "ghm")
    dz, dw, r = _dists(domain, z, w)
    return z, w, cf.i_dist(dz, dw, r), _h_uppers(domain, z, w, cfg.resolution), H_TOL, {}


def _chain(cfg, domain):
    """``v^(1/2) <= i <= s <= v^1`` on (z, w) and the ``v^2`` triangle through u."""
    z, u, w = sample_triples(Region(domain, d_range=cfg.d_range), cfg.pairs, cfg.seed, "chain")
    dz, dw, du = domain.distance_many(z), domain.distance_many(w), domain.distance_many(u)
    r = np.linalg.norm(z - w, axis=1)
    i = cf.i_dist(dz, dw, r)
    s = cf.s_dist(dz, dw, r)
    links = [
        (cf.v_dist(0.5, dz, dw, r), i),
        (i, s),
        (s, cf.v_dist(1.0, dz, dw, r)),
        (cf.v_dist(2.0, dz, dw, r),
         cf.v_dist(2.0, dz, du, np.linalg.norm(z - u, axis=1)) + cf.v_dist(2.0, du, dw, np.linalg.norm(u - w, axis=1))),
    ]
    lhs = np.column_stack([a for a, _ in links])
    rhs = np.column_stack([b for _, b in links])
    worst = np.argmin(rhs - lhs, axis=1)
    rows = np.arange(len(z))
    return z, w, lhs[rows, worst], rhs[rows, worst], CLOSED_FORM_TOL, {"binding_link": np.bincount(worst, minlength=4).tolist()}


def _v_axioms(cfg, domain):
    c = 2.0 if cfg.c is None else float(cfg.c)
    z, u, w = sample_triples(Region(domain, d_range=cfg.d_range), cfg.pairs, cfg.seed, "v_axioms")
    dz, dw, du = domain.distance_many(z), domain.distance_many(w), domain.distance_many(u)
    lhs = cf.v_dist(c, dz, dw, np.linalg.norm(z - w, axis=1))
    rhs = cf.v_dist(c, dz, du, np.linalg.norm(z - u, axis=1)) + cf.v_dist(c, du, dw, np.linalg.norm(u - w, axis=1))
    extra = {"c": c}
    if c < 2.0:
        extra["label"] = PROBE_LABEL
    return z, w, lhs, rhs, CLOSED_FORM_TOL, extra


def _rho_triangle(cfg, domain):
    zs, ws, lhs, rhs = [], [], [], []
    box = ((-2.0, -2.0), (2.0, 2.0))
    for f_idx in range(cfg.fields):
        f = LipschitzField.random(block_rng(cfg.seed, "rho_field", f_idx))
        z, u, w = sample_triples(Region(None, box=box), cfg.pairs, cfg.seed, f"rho_triangle/{f_idx}")
        fz, fu, fw = f(z), f(u), f(w)
        zs.append(z)
        ws.append(w)
        lhs.append(cf.rho_values(fz, fw, np.linalg.norm(z - w, axis=1)))
        rhs.append(cf.rho_values(fz, fu, np.linalg.norm(z - u, axis=1))
                   + cf.rho_values(fu, fw, np.linalg.norm(u - w, axis=1)))
    return (np.vstack(zs), np.vstack(ws), np.concatenate(lhs), np.concatenate(rhs), CLOSED_FORM_TOL,
            {"fields": cfg.fields})


def _near_boundary_region(cfg, domain, radius):
    anchor = cfg.anchor if cfg.anchor is not None else _default_anchor(domain)
    return Region(domain, anchor=anchor, radius=radius), anchor


def _main(cfg, domain, which):
    """Search radii 0.2, 0.1, ... (halving up to four times) for a violation-free ball."""
    c = 1.8 if cfg.c is None else float(cfg.c)
    u = kp.uniformize(domain) if which == "k" else None
    r0 = DEFAULT_RADIUS if cfg.radius is None else cfg.radius
    tried = []
    for step in range(RADIUS_HALVINGS + 1):
        radius = r0 / 2 ** step
        region, anchor = _near_boundary_region(cfg, domain, radius)
        z, w = sample_pairs(region, cfg.pairs, cfg.seed, f"main_{which}/{step}")
        dz, dw, r = _dists(domain, z, w)
        rhs = cf.v_dist(c, dz, dw, r)
        lhs = 2.0 * _k_values(u, z, w) if which == "k" else _h_uppers(domain, z, w, cfg.resolution)
        tol = CLOSED_FORM_TOL if which == "k" else H_TOL
        bad = int(np.count_nonzero(rhs - lhs < -tol))
        tried.append({"radius": radius, "violations": bad})
        if bad == 0:
            break
    extra = {"c": c, "anchor": [float(x) for x in anchor], "radius": radius, "radius_search": tried}
    if c <= CONSTANTS.c0:
        extra["label"] = PROBE_LABEL
        extra["note"] = "c is at or below c0; violations do not bear on the bound"
    return z, w, lhs, rhs, tol, extra


def _pairs_for_constant(cfg, domain, tag):
    if cfg.anchor is not None or cfg.radius is not None:
        region, _ = _near_boundary_region(cfg, domain, cfg.radius or DEFAULT_RADIUS)
    else:
        region = Region(domain, d_range=cfg.d_range)
    return sample_pairs(region, cfg.pairs, cfg.seed, tag)


def _with_constant(z, w, lhs, rhs0, c):
    """Check against ``c`` when given; otherwise report the empirical constant."""
    estimate = float(np.max(lhs - rhs0))
    c_used = estimate if c is None else float(c)
    return z, w, lhs, rhs0 + c_used, CLOSED_FORM_TOL, {"estimated_constant": estimate, "c": c_used,
                                                        "c_given": c is not None}


def _fr(cfg, domain):
    u = kp.uniformize(domain)
    z, w = _pairs_for_constant(cfg, domain, "fr")
    dz, dw, r = _dists(domain, z, w)
    rhs0 = np.log1p(r / dz) + np.log1p(r / dw)
    return _with_constant(z, w, 2.0 * _k_values(u, z, w), rhs0, cfg.c)


def _npt(cfg, domain):
    u = kp.uniformize(domain)
    z, w = _pairs_for_constant(cfg, domain, "npt")
    dz, dw, _ = _dists(domain, z, w)
    return _with_constant(z, w, 2.0 * _k_values(u, z, w), -np.log(dz) - np.log(dw), cfg.c)


def _gap(cfg, domain):
    u = kp.uniformize(domain)
    region, anchor = _near_boundary_region(cfg, domain, cfg.radius or DEFAULT_RADIUS)
    z, w = sample_pairs(region, cfg.pairs, cfg.seed, "gap")
    dz, dw, r = _dists(domain, z, w)
    lhs = 2.0 * _k_values(u, z, w) - cf.i_dist(dz, dw, r)
    rhs = np.full(len(z), CONSTANTS.gap)
    return z, w, lhs, rhs, GAP_SLACK, {"anchor": [float(x) for x in anchor], "radius": region.radius}


def _k_le_h(cfg, domain):
    u = kp.uniformize(domain)
    z, w = sample_pairs(Region(domain, d_range=cfg.d_range), cfg.pairs, cfg.seed, "k_le_h")
    return z, w, _k_values(u, z, w), _h_uppers(domain, z, w, cfg.resolution), K_LE_H_TOL, {}


_INEQUALITY = {
    "ghm": _ghm, "chain": _chain, "main_k": lambda c, d: _main(c, d, "k"),
    "main_h": lambda c, d: _main(c, d, "h"), "fr": _fr, "npt": _npt, "gap": _gap,
    "v_axioms": _v_axioms, "rho_triangle": _rho_triangle, "k_le_h": _k_le_h,
}


def check_inequality(cfg: SuiteConfig) -> SuiteReport:
    spec = SUITES[cfg.suite_id]
    if spec.kind != "inequality":
        raise UnsoundSuiteError(f"{cfg.suite_id} is a limit suite; use check_limit")
    domain = _resolve_domain(cfg, spec)
    z, w, lhs, rhs, tol, extra = _INEQUALITY[cfg.suite_id](cfg, domain)
    meta = _metadata(cfg, spec, tol, **extra)
    if domain is not None:
        meta["domain"] = domain.to_json()
    return SuiteReport(cfg.suite_id, z, w, np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float), tol, meta)


# -- limit suites --------------------------------------------------------------

def _stat_sup_ratio(domain, z, w, cfg):
    u = kp.uniformize(domain)
    return float(np.max(_k_values(u, z, w) / _h_uppers(domain, z, w, cfg.resolution)))


def _stat_lim_ratio(domain, z, w, cfg):
    dz, dw, r = _dists(domain, z, w)
    return float(np.max(np.abs(_h_uppers(domain, z, w, cfg.resolution) / cf.s_dist(dz, dw, r) - 1.0)))


def _trend_rows(cfg, domain, stat, tag, interior=False):
    radii = cfg.radii or DEFAULT_RADII
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radius schedule must be decreasing")
    if interior:
        if cfg.anchor is None:
            raise ValueError("q_cont needs an interior anchor")
        anchor = np.asarray(cfg.anchor, dtype=float)
        if not domain.contains(anchor):
            raise ValueError("q_cont anchor must be interior")
    else:
        anchor = cfg.anchor if cfg.anchor is not None else _default_anchor(domain)
    rows = []
    for radius in radii:
        # the same draws at every radius, rescaled, so rows compare like with like
        region = Region(domain, anchor=anchor, radius=radius)
        rows.append({"param": float(radius), "statistic": stat(region, tag)})
    return rows, [float(x) for x in anchor]


def _finish_trend(cfg, spec, rows, floor, meta):
    dev = [abs(row["statistic"] - spec.limit) if spec.limit == 0.0 else row["statistic"] - spec.limit
           for row in rows]
    for row, d in zip(rows, dev):
        row["slack"] = row["param"]
        row["within"] = bool(d <= row["param"])
    verdicts = {
        "monotone": all(b <= a + floor for a, b in zip(dev, dev[1:])),
        "within_slack": all(row["within"] for row in rows),
    }
    return TrendReport(cfg.suite_id, rows, verdicts, meta)


def _npt_div(cfg, spec):
    ts = cfg.t_values or DEFAULT_T
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t schedule must be increasing")
    rows = [{"param": float(t), "statistic": kp.npt_divergence(t)} for t in ts]
    vals = [row["statistic"] for row in rows]
    verdicts = {"strictly_increasing": all(b > a for a, b in zip(vals, vals[1:]))}
    meta = {"growth": vals[-1] - vals[0], "note": "divergence to infinity is not decidable at finite t"}
    return TrendReport(cfg.suite_id, rows, verdicts, meta)


def check_limit(cfg: SuiteConfig) -> TrendReport:
    spec = SUITES[cfg.suite_id]
    if spec.kind != "limit":
        raise UnsoundSuiteError(f"{cfg.suite_id} is an inequality suite; use check_inequality")
    domain = _resolve_domain(cfg, spec)
    if cfg.suite_id == "npt_div":
        return _npt_div(cfg, spec)
    sid = cfg.suite_id
    if sid == "kappa_half":
        u = kp.uniformize(domain)

        def stat(region, tag):
            z = sample_points(region, cfg.pairs, cfg.seed, tag)
            d = domain.distance_many(z)
            return float(max(kp.kappa_metric(u, z[k], 1.0) * d[k] for k in range(len(z))))
        floor = 0.0
    else:
        fn = _stat_sup_ratio if sid == "sup_ratio" else _stat_lim_ratio

        def stat(region, tag):
            z, w = sample_pairs(region, cfg.pairs, cfg.seed, tag)
            return fn(domain, z, w, cfg)
        floor = NOISE_FLOOR
    rows, anchor = _trend_rows(cfg, domain, stat, sid, interior=(sid == "q_cont"))
    meta = _metadata(cfg, spec, floor, anchor=anchor, limit=spec.limit, domain=domain.to_json())
    return _finish_trend(cfg, spec, rows, floor, meta)


def run_suite(cfg: SuiteConfig):
    """Dispatch to :func:`check_inequality` or :func:`check_limit`."""
    if SUITES[cfg.suite_id].kind == "limit":
        return check_limit(cfg)
    return check_inequality(cfg)


__all__ = ["SUITES", "SuiteSpec", "SuiteConfig", "SuiteReport", "TrendReport", "UnsoundSuiteError",
           "SamplingError", "check_inequality", "check_limit", "run_suite", "PROBE_LABEL"]
