import json
import math
import subprocess
import sys

import pytest

from hypmetrics.cli import RECORD_COLUMNS, main


@pytest.fixture
def files(tmp_path):
    specs = {"hp": {"type": "half_plane", "normal": [1, 0], "offset": 0}, "disc": {"type": "disc"},
             "npt": {"type": "mapped_disc", "map": "npt_example"},
             "square": {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
             "interval": {"type": "interval", "a": 0, "b": 1}, "bad": {"type": "blob"}}
    out = {}
    for name, spec in specs.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(spec))
        out[name] = str(path)
    out["dir"] = tmp_path
    return out


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_dist_examples(files, capsys):
    code, out = run(["dist", "--metric", "s", "--domain", files["hp"], "--z", "1,0", "--w", "2,0"], capsys)
    assert code == 0 and out.out.strip() == "0.6931472"
    code, out = run(["dist", "--metric", "h", "--domain", files["hp"], "--z", "1,0", "--w", "1,1"], capsys)
    lo, hi = json.loads(out.out.strip())
    assert code == 0 and lo <= 0.9624237 <= hi
    code, out = run(["dist", "--metric", "k", "--domain", files["disc"], "--z", "0.5,0", "--w", "0,0"], capsys)
    assert code == 0 and out.out.strip() == "0.5493061"
    code, out = run(["dist", "--metric", "i", "--domain", files["interval"], "--z", "0.25", "--w", "0.75"], capsys)
    assert code == 0 and float(out.out) == pytest.approx(2 * math.log(2), abs=1e-7)
    code, out = run(["dist", "--metric", "rho", "--domain", files["disc"], "--z", "0,0", "--w", "0.5,0"], capsys)
    assert out.out.strip() == "0.3465736"


def test_dist_errors(files, capsys):
    assert run(["dist", "--metric", "s", "--domain", files["bad"], "--z", "1,0", "--w", "2,0"], capsys)[0] == 2
    assert run(["dist", "--metric", "s", "--domain", files["hp"], "--z=-1,0", "--w", "2,0"], capsys)[0] == 2
    assert run(["dist", "--metric", "s", "--domain", files["hp"], "--z", "a,b", "--w", "2,0"], capsys)[0] == 2
    assert run(["dist", "--metric", "k", "--domain", files["square"], "--z", "0.5,0.5", "--w", "0.2,0.2"], capsys)[0] == 3
    assert run(["dist", "--metric", "k", "--domain", files["interval"], "--z", "0.5", "--w", "0.2"], capsys)[0] == 3


def test_dist_json_record(files, capsys):
    out = files["dir"] / "d.json"
    run(["dist", "--metric", "v", "--c", "2", "--domain", files["disc"], "--z", "0,0", "--w", "0.5,0", "--out", str(out)], capsys)
    payload = json.loads(out.read_text())
    assert payload["manifest"]["command"] == "dist"
    assert payload["record"]["value"] == pytest.approx(2 * math.log(1 + 2 * 0.5 / math.sqrt(0.5)))


def test_verify_exit_codes(files, capsys):
    assert run(["verify", "--suite", "chain", "--pairs", "2000"], capsys)[0] == 0
    assert run(["verify", "--suite", "npt_div", "--domain", files["npt"]], capsys)[0] == 0
    assert run(["verify", "--suite", "main_k", "--domain", files["npt"]], capsys)[0] == 4
    assert run(["verify", "--suite", "main_k", "--domain", files["square"]], capsys)[0] == 4
    assert run(["verify", "--suite", "ghm", "--domain", files["bad"]], capsys)[0] == 2
    # the constant is below the threshold and the check is strict enough to fail
    assert run(["verify", "--suite", "fr", "--domain", files["disc"], "--c", "-1"], capsys)[0] == 1


def test_verify_json_reproducible(files, capsys):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    for path in (a, b):
        run(["verify", "--suite", "ghm", "--domain", files["disc"], "--pairs", "5", "--seed", "7", "--out", str(a if path == a else b)], capsys)
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    for j in (ja, jb):
        j["manifest"].pop("wall_time")
        j["manifest"]["parameters"].pop("out")
    assert ja == jb
    assert set(ja) >= {"manifest", "suite", "records", "violations", "max_margin", "min_margin"}
    assert ja["manifest"]["seed"] == 7 and ja["manifest"]["version"]


def test_verify_csv(files, capsys):
    path = files["dir"] / "r.csv"
    run(["verify", "--suite", "main_k", "--domain", files["disc"], "--c", "1.8", "--pairs", "20", "--out", str(path)], capsys)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    assert json.loads(lines[0][len("# manifest: "):])["command"] == "verify"
    assert lines[1].split(",") == RECORD_COLUMNS
    assert len(lines) == 22


def test_verify_limit_radii(files, capsys):
    code, out = run(["verify", "--suite", "kappa_half", "--domain", files["disc"], "--radii", "0.2,0.1"], capsys)
    assert code == 0
    assert "monotone=pass" in out.out


def test_plot_fields(files, capsys):
    d = files["dir"]
    code, out = run(["plot", "--field", "divergence", "--domain", files["npt"], "--out", str(d / "div.svg")], capsys)
    assert code == 0
    svg = (d / "div.svg").read_text()
    assert "<dc:description>" in svg and '"command": "plot"' in svg
    rows = [l.split(",") for l in (d / "div.csv").read_text().splitlines()[2:]]
    vals = [float(r[1]) for r in rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    code, _ = run(["plot", "--field", "q_ratio", "--domain", files["hp"], "--grid", "4", "--out", str(d / "q.csv")], capsys)
    vals = [float(l.split(",")[2]) for l in (d / "q.csv").read_text().splitlines()[2:]]
    assert code == 0 and max(abs(v - 1) for v in vals) < 1e-3
    code, _ = run(["plot", "--field", "kappa_d", "--domain", files["disc"], "--out", str(d / "k.csv")], capsys)
    rows = [l.split(",") for l in (d / "k.csv").read_text().splitlines()[2:]]
    vals = {(float(x), float(y)): float(v) for x, y, v in rows}
    finite = {k: v for k, v in vals.items() if math.isfinite(v)}
    near_edge = [v for (x, y), v in finite.items() if math.hypot(x, y) > 0.8]
    assert min(near_edge) < 0.56 and min(finite.values()) >= 0.5
    assert run(["plot", "--field", "kappa_d", "--domain", files["square"]], capsys)[0] == 3


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "hypmetrics", "dist", "--metric", "s", "--domain", files["hp"],
                           "--z", "1,0", "--w", "2,0"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.6931472"
