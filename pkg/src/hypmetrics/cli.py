"""Command line: ``dist``, ``verify`` and ``plot``.

Exit codes: 0 success, 1 a verification found violations or a failed trend,
2 invalid input, 3 metric or suite incompatible with the domain, 4 a suite
and domain that cannot be checked soundly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import closed_forms as cf
from . import kobayashi_planar as kp
from .bounds_lab import suites
from .bounds_lab.sampling import SamplingError
from .geometry import GeometryError, Interval, MappedDisc, NotInteriorError, SpecError, from_json
from .qh_engine import h_num

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_INCOMPATIBLE, EXIT_UNSOUND = 0, 1, 2, 3, 4
RECORD_COLUMNS = ["z_x", "z_y", "w_x", "w_y", "lhs", "rhs", "margin"]
METRICS = ("h", "s", "i", "v", "k", "rho")
FIELDS = ("q_ratio", "kappa_d", "divergence")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise CliError(EXIT_SPEC, f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _point(text, name, dim):
    vals = _floats(text, name)
    if len(vals) != dim:
        raise CliError(EXIT_SPEC, f"--{name}: expected {dim} coordinate(s)")
    return np.array(vals)


def _load_domain(path):
    if path is None:
        return None
    try:
        spec = json.loads(Path(path).read_text())
        return from_json(spec)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        raise CliError(EXIT_SPEC, f"invalid domain file {path}: {exc}") from None


def _manifest(args, started):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {"command": args.command, "domain_file": args.domain, "parameters": params,
            "seed": getattr(args, "seed", None), "version": __version__,
            "wall_time": round(time.perf_counter() - started, 6)}


def _dump_json(payload, path):
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, manifest, header, rows):
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


# -- dist ------------------------------------------------------------------------

def _require_interior(domain, p):
    if not domain.contains(p):
        raise CliError(EXIT_SPEC, f"point {p.tolist()} is not interior to the domain")


def cmd_dist(args, started):
    domain = _load_domain(args.domain)
    if domain is None:
        raise CliError(EXIT_SPEC, "dist needs --domain")
    z = _point(args.z, "z", domain.dim)
    w = _point(args.w, "w", domain.dim)
    for p in (z, w):
        _require_interior(domain, p)
    dz = float(domain.distance_many(z[None, :])[0])
    dw = float(domain.distance_many(w[None, :])[0])
    r = float(np.linalg.norm(z - w))
    record = {"metric": args.metric, "z": z.tolist(), "w": w.tolist()}
    if args.metric == "h":
        res = h_num(domain, z, w, args.resolution)
        record.update(lower=res.lower, upper=res.upper)
        print(f"[{res.lower:.7f}, {res.upper:.7f}]")
    else:
        if args.metric == "s":
            value = cf.s_dist(dz, dw, r)
        elif args.metric == "i":
            value = cf.i_dist(dz, dw, r)
        elif args.metric == "v":
            value = cf.v_dist(args.c if args.c is not None else 2.0, dz, dw, r)
        elif args.metric == "rho":
            # the boundary distance is a positive 1-Lipschitz field
            value = cf.rho_values(dz, dw, r)
        else:
            if isinstance(domain, Interval):
                raise CliError(EXIT_INCOMPATIBLE, "k is defined here for planar domains only")
            try:
                value = kp.k_dist(kp.uniformize(domain), z, w)
            except kp.IncompatibleDomainError as exc:
                raise CliError(EXIT_INCOMPATIBLE, str(exc)) from None
        record["value"] = value
        print(f"{value:.7f}")
    if args.out:
        _dump_json({"manifest": _manifest(args, started), "record": record}, args.out)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------

def _suite_config(args, domain):
    radii = tuple(_floats(args.radii, "radii")) if args.radii else None
    kind = suites.SUITES[args.suite].kind
    kw = dict(domain=domain, pairs=args.pairs, seed=args.seed, resolution=args.resolution, c=args.c)
    if args.anchor:
        kw["anchor"] = tuple(_point(args.anchor, "anchor", 2))
    if radii and kind == "limit":
        kw["radii"] = radii
    elif radii:
        kw["radius"] = radii[0]
    try:
        return suites.SuiteConfig(args.suite, **kw)
    except ValueError as exc:
        raise CliError(EXIT_SPEC, str(exc)) from None


def cmd_verify(args, started):
    domain = _load_domain(args.domain)
    cfg = _suite_config(args, domain)
    report = suites.run_suite(cfg)
    manifest = _manifest(args, started)
    if isinstance(report, suites.TrendReport):
        payload = {"manifest": manifest, **report.to_json()}
        for row in report.rows:
            print(f"{row['param']:<10g} {row['statistic']:.7f}")
        print("verdicts: " + ", ".join(f"{k}={'pass' if v else 'fail'}" for k, v in report.verdicts.items()))
        ok = report.passed
    else:
        payload = {"manifest": manifest, **report.to_json()}
        print(f"{report.suite}: {len(report.lhs)} records, violations={report.violations}, "
              f"min_margin={report.min_margin:.3e}")
        if report.metadata.get("label"):
            print(f"label: {report.metadata['label']}")
        ok = report.passed
    if args.out:
        out = Path(args.out)
        if out.suffix.lower() == ".csv":
            if isinstance(report, suites.TrendReport):
                rows = [[row["param"], row["statistic"]] for row in report.rows]
                _write_csv(out, manifest, ["param", "statistic"], rows)
            else:
                m = report.margin
                rows = [[*report.z[k], *report.w[k], report.lhs[k], report.rhs[k], m[k]] for k in range(len(m))]
                _write_csv(out, manifest, RECORD_COLUMNS, rows)
        else:
            _dump_json(payload, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- plot ------------------------------------------------------------------------

def _grid(domain, n):
    lo, hi = domain.bbox() if domain.bbox() is not None else (None, None)
    if lo is None:
        hp = domain.exact if isinstance(domain, MappedDisc) else domain
        foot = hp.offset * hp.normal
        tan = np.array([-hp.normal[1], hp.normal[0]])
        corners = np.array([foot, foot + 2 * hp.normal, foot + tan, foot - tan, foot + 2 * hp.normal + tan])
        lo, hi = corners.min(axis=0), corners.max(axis=0)
    xs = np.linspace(lo[0], hi[0], n + 2)[1:-1]
    ys = np.linspace(lo[1], hi[1], n + 2)[1:-1]
    X, Y = np.meshgrid(xs, ys)
    return X, Y


def _field_values(args, domain):
    if args.field == "divergence":
        t = 1.0 - np.logspace(0, -3, args.grid * 4)
        t = t[t >= 0.0]
        vals = np.array([kp.npt_divergence(x) for x in t])
        return "curve", t, vals
    if isinstance(domain, Interval):
        raise CliError(EXIT_INCOMPATIBLE, "plots need a planar domain")
    X, Y = _grid(domain, args.grid)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    inside = domain.contains_many(pts)
    vals = np.full(len(pts), np.nan)
    if args.field == "kappa_d":
        try:
            u = kp.uniformize(domain)
        except kp.IncompatibleDomainError as exc:
            raise CliError(EXIT_INCOMPATIBLE, str(exc)) from None
        d = domain.distance_many(pts)
        for k in np.nonzero(inside)[0]:
            vals[k] = kp.kappa_metric(u, pts[k], 1.0) * d[k]
    else:
        w = _point(args.w, "w", 2) if args.w else pts[inside][len(pts[inside]) // 2]
        _require_interior(domain, w)
        dw = float(domain.distance_many(w[None, :])[0])
        d = domain.distance_many(pts)
        for k in np.nonzero(inside)[0]:
            r = float(np.linalg.norm(pts[k] - w))
            if r == 0.0:
                vals[k] = 1.0
                continue
            vals[k] = cf.q_ratio(h_num(domain, pts[k], w, args.resolution).upper, cf.s_dist(d[k], dw, r), False)
    return "grid", (X, Y), vals.reshape(X.shape)


def _save_svg(path, manifest, kind, x, vals, field):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "hypmetrics"
    fig, ax = plt.subplots(figsize=(5, 4))
    if kind == "curve":
        ax.plot(x, vals, marker=".")
        ax.set_xlabel("t")
        ax.set_ylabel(field)
    else:
        X, Y = x
        mesh = ax.pcolormesh(X, Y, vals, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=field)
        ax.set_aspect("equal")
    ax.set_title(field)
    fig.savefig(path, format="svg", metadata={"Description": json.dumps(manifest, sort_keys=True), "Date": None})
    plt.close(fig)


def cmd_plot(args, started):
    domain = _load_domain(args.domain)
    if domain is None and args.field != "divergence":
        raise CliError(EXIT_SPEC, "plot needs --domain")
    if args.field == "divergence" and domain is not None and not (
            isinstance(domain, MappedDisc) and domain.map_id == "npt_example"):
        raise CliError(EXIT_INCOMPATIBLE, "the divergence field is defined for the npt_example map")
    kind, x, vals = _field_values(args, domain)
    manifest = _manifest(args, started)
    out = Path(args.out or f"{args.field}.csv")
    csv_path = out.with_suffix(".csv")
    if kind == "curve":
        _write_csv(csv_path, manifest, ["t", "value"], [[a, b] for a, b in zip(x, vals)])
        finite = vals
    else:
        X, Y = x
        _write_csv(csv_path, manifest, ["x", "y", "value"],
                   [[a, b, c] for a, b, c in zip(X.ravel(), Y.ravel(), vals.ravel())])
        finite = vals[np.isfinite(vals)]
    if out.suffix.lower() == ".svg":
        _save_svg(out, manifest, kind, x, vals, args.field)
    print(f"{args.field}: {np.size(finite)} values in [{np.min(finite):.7f}, {np.max(finite):.7f}] -> {csv_path}")
    return EXIT_OK


# -- entry -----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="hypmetrics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--domain", help="domain JSON file")
        p.add_argument("--resolution", type=float, default=0.02, help="lattice resolution for h")
        p.add_argument("--c", type=float, default=None, help="constant for v^c suites and metrics")
        p.add_argument("--out", help="output file (.json, .csv or .svg)")

    p = sub.add_parser("dist", help="distance between two points")
    common(p)
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--w", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("--suite", choices=sorted(suites.SUITES), required=True)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anchor", help="anchor point x,y")
    p.add_argument("--radii", help="radius schedule r1,r2,...")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="sample a field on a grid or curve")
    common(p)
    p.add_argument("--field", choices=FIELDS, required=True)
    p.add_argument("--w", help="fixed second point for q_ratio")
    p.add_argument("--grid", type=int, default=12, help="grid points per axis")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except suites.UnsoundSuiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOUND
    except (kp.IncompatibleDomainError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except (SpecError, NotInteriorError, kp.InversionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
