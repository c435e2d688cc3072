"""Compiled vs pure-Python kernels, and end-to-end h_num.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each row reports the best of ``--repeat`` runs per backend and the speedup.
"""

import argparse
import json
import time

import numpy as np

from hypmetrics import kernels, qh_engine
from hypmetrics.geometry import Disc, MappedDisc, unit_square


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    disc = Disc()
    z, w = np.array([-0.6, 0.1]), np.array([0.7, -0.2])
    graph = qh_engine.build_graph(disc, z, w, 0.01, 1e-3, qh_engine._search_box(disc, z, w, 0.4, 0.3, full=True))
    seg_pts = rng.uniform(-1, 1, size=(2000, 2))
    sa, sb = rng.uniform(-1, 1, size=(400, 2)), rng.uniform(-1, 1, size=(400, 2))
    p = rng.uniform(-0.7, 0.7, size=(20000, 2))
    q = rng.uniform(-0.7, 0.7, size=(20000, 2))
    kind, params = disc.kernel_spec()
    t = np.linspace(0.0, 1.0, 80)[:, None]
    path = np.ascontiguousarray((1 - t) * z + t * w + 0.05 * np.sin(np.pi * t) * np.array([[0.3, 1.0]]))
    npt = MappedDisc("npt_example")
    poly = npt.poly
    near_pts = rng.uniform(-0.5, 1.5, size=(5000, 2))
    square = unit_square()
    return [
        ("dijkstra", f"{len(graph.nodes)} nodes",
         lambda: kernels.dijkstra(graph.indptr, graph.indices, graph.weights, graph.source, graph.target)),
        ("segment_distances", "2000 pts x 400 segs", lambda: kernels.segment_distances(seg_pts, sa, sb)),
        ("segment_lengths", "20000 disc segments", lambda: kernels.segment_lengths(p, q, kind, params)),
        ("descend", "80-vertex disc path", lambda: kernels.descend(path.copy(), kind, params)),
        ("polyline_nearest", f"5000 pts, {poly.n}-gon",
         lambda: kernels.polyline_nearest(near_pts, poly.v, 256, poly.thickness)),
        ("h_num disc", "rho=0.02", lambda: qh_engine.h_num(disc, z, w, 0.02)),
        ("h_num square", "rho=0.02", lambda: qh_engine.h_num(square, [0.1, 0.2], [0.9, 0.7], 0.02)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", default=None)
    args = parser.parse_args()
    if "cython" not in kernels.available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rows = []
    print(f"{'kernel':<18} {'size':<22} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for name, size, fn in cases():
        out = {}
        for backend in ("cython", "python"):
            kernels.set_backend(backend)
            fn()  # warm caches
            out[backend] = best_time(fn, args.repeat)
        kernels.set_backend("cython")
        ratio = out["python"] / out["cython"]
        rows.append({"kernel": name, "size": size, **out, "speedup": ratio})
        print(f"{name:<18} {size:<22} {out['cython']:>10.4f} {out['python']:>10.4f} {ratio:>7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
