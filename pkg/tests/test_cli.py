import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from willmore_tori.cli import main
from willmore_tori.fields import TorusGrid, read_field, write_field
from willmore_tori.geometry import ConformalTorusMetric
from willmore_tori.moduli import ModuliPoint


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_metric(path, lattice, fn, n=64):
    grid = TorusGrid(lattice, n, n)
    write_field(ConformalTorusMetric.from_function(grid, fn).u, path)
    return path


def test_tau_and_sigma(capsys):
    code, out, _ = run(["tau", "--y", "2", "--p", "2"], capsys)
    assert code == 0 and abs(float(out) - 0.1987553) < 1e-4
    code, out, _ = run(["tau", "--y", "0.9"], capsys)
    assert code == 0 and "unconstrained (region rule applies)" in out
    code, out, _ = run(["sigma", "--V", "4"], capsys)
    assert code == 0 and float(out) <= 0.1987553 + 1e-7


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["tau", "--y", "2", "--p", "1"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["tau", "--y", "2", "--bogus"])
    assert e.value.code == 1


def test_bound(capsys):
    code, out, _ = run(["bound", "--K", str(2 * math.pi), "--p", "2", "--V", "1"], capsys)
    d = json.loads(out)
    assert code == 0 and d["S"] == pytest.approx(3.518266, abs=1e-6)
    code, _, err = run(["bound", "--K", "13", "--V", "1"], capsys)
    assert code == 1 and "4π" in err


def test_certify_li_yau(tmp_path, capsys):
    path = write_metric(tmp_path / "a.json", ModuliPoint(0.5, 0.9), lambda a, b: 0 * a)
    code, out, _ = run(["certify", str(path)], capsys)
    d = json.loads(out)
    assert code == 0 and d["certificate"]["rule"] == "LiYauRegion"
    assert d["report"]["V_g0"] == pytest.approx(0.9)


def test_certify_small_curvature(tmp_path, capsys):
    # K_2 ~ 0.1 on Gamma_{0,2}: certified (the direct oscillation rule comes first in the order)
    path = write_metric(tmp_path / "b.json", ModuliPoint(0, 2), lambda a, b: 0.0018 * np.cos(2 * math.pi * a))
    code, out, _ = run(["certify", str(path), "--quiet"], capsys)
    d = json.loads(out)
    assert d["report"]["Kp"] < 0.1987553
    assert code == 0 and d["certificate"]["status"] == "Certified"


def test_certify_uncertified(tmp_path, capsys):
    path = write_metric(tmp_path / "c.json", ModuliPoint(0, 3),
                        lambda a, b: 0.5 * np.cos(2 * math.pi * a) + 0.4 * np.sin(2 * math.pi * b / 3))
    code, out, err = run(["certify", str(path)], capsys)
    d = json.loads(out)
    assert code == 2 and d["certificate"]["status"] == "Uncertified"
    assert d["certificate"]["lower_bound"] > 0
    assert "osc_u" in err


def test_certify_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["certify", str(bad)], capsys)
    assert code == 1 and "error" in err
    code, _, _ = run(["certify", str(tmp_path / "missing.json")], capsys)
    assert code == 1


def test_moduli_map(tmp_path, capsys):
    out = tmp_path / "map.csv"
    code, _, _ = run(["moduli-map", "--xs", "0:0.5:11", "--ys", "0.9:3:22", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(rows[0]) == ["x", "y", "region", "tau"]
    find = {(round(float(r["x"]), 6), round(float(r["y"]), 6)): r for r in rows}
    assert find[(0.3, 1.1)]["region"] == "montiel_ros"
    assert find[(0.5, 0.9)]["region"] == "li_yau"
    col = sorted((float(r["y"]), float(r["tau"])) for r in rows
                 if float(r["x"]) == 0 and 1.1 - 1e-9 <= float(r["y"]) <= 3 + 1e-9)
    taus = [t for _, t in col]
    assert len(taus) > 10 and all(a < b for a, b in zip(taus, taus[1:]))
    # no point inside the unit circle
    assert all(float(r["x"]) ** 2 + float(r["y"]) ** 2 >= 1 - 1e-12 for r in rows)


def test_generate_cone_and_cylinder(tmp_path, capsys):
    out = tmp_path / "cone.json"
    code, text, _ = run(["generate", "--family", "cone", "--beta", "0.5236", "--R", "0.2",
                         "--ratio", "2.718", "--n", "512", "--out", str(out)], capsys)
    assert code == 0
    vals = dict(line.split() for line in text.strip().splitlines())
    assert float(vals["K1"]) == pytest.approx(2 * math.pi, rel=0.02)
    assert float(vals["osc_u"]) >= 1.0 - 1e-3
    assert read_field(out).grid.n1 == 512
    out2 = tmp_path / "cyl.json"
    code, text, _ = run(["generate", "--family", "cylinder", "--R", "0.05", "--ratio", "3",
                         "--n", "256", "--out", str(out2)], capsys)
    vals = dict(line.split() for line in text.strip().splitlines())
    assert code == 0 and float(vals["osc_u"]) >= 3


def test_generate_random_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["generate", "--family", "random", "--seed", "7", "--n", "32", "--out", str(path),
                    "--quiet"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_cone_does_not_fit(tmp_path, capsys):
    code, _, err = run(["generate", "--family", "cylinder", "--R", "0.45", "--ratio", "1", "--n", "64",
                        "--out", str(tmp_path / "x.json")], capsys)
    assert code == 1 and "cone does not fit" in err


def test_willmore_builtin(capsys):
    code, out, _ = run(["willmore", "--builtin", "clifford", "--n", "64"], capsys)
    d = json.loads(out)
    assert code == 0 and d["holds"] and d["W"] == pytest.approx(2 * math.pi**2, rel=1e-9)
    code, out, _ = run(["willmore", "--R", "2", "--r", "1", "--n", "64"], capsys)
    assert code == 0 and json.loads(out)["W"] == pytest.approx(4 * math.pi**2 / math.sqrt(3))


def test_help_lists_subcommands():
    res = subprocess.run([sys.executable, "-m", "willmore_tori.cli", "--help"], capture_output=True, text=True)
    for cmd in ("certify", "bound", "tau", "sigma", "moduli-map", "generate", "willmore", "validate"):
        assert cmd in res.stdout
