import csv
import subprocess
import sys

import numpy as np
import pytest

from savbc.bsc_example import BsSavbcParams, bs_region_boundary
from savbc.channels import (SavbcSpec, StateFamily, StochasticMatrix, bs_savbc, bsc, emit_spec,
                            identity_channel, random_spec)
from savbc.cli import main
from savbc.regions import RateRegion

FAST = ["--directions", "16", "--restarts", "4", "--iterations", "400"]


@pytest.fixture
def files(tmp_path):
    def write(name, spec):
        p = tmp_path / name
        p.write_text(emit_spec(spec))
        return str(p)

    xor = StateFamily((identity_channel(2), StochasticMatrix([[0, 1], [1, 0]])), ("s0", "s1"))
    return {
        "bs": write("bs.json", bs_savbc(0.1, 0.05, 0.2)),
        "xor": write("xor.json", SavbcSpec(bsc(0.1), xor)),
        "single": write("single.json", SavbcSpec(bsc(0.1), StateFamily((bsc(0.2),)))),
        "useless": write("useless.json", SavbcSpec(bsc(0.5), StateFamily((bsc(0.2),)))),
        "random": write("random.json", random_spec(np.random.default_rng(1), 2, 2, 2, 2)),
        "dir": tmp_path,
    }


def _read_region(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["rc", "rp"]
    return RateRegion.hull([(float(a), float(b)) for a, b in rows[1:]])


def test_region_matches_closed_form(files, capsys):
    out = str(files["dir"] / "r.csv")
    assert main(["region", "-i", files["bs"], "-o", out, *FAST]) == 0
    ref = bs_region_boundary(BsSavbcParams(0.1, 0.05, 0.2)).hull
    assert _read_region(out).distance(ref) <= 1e-2
    meta = (files["dir"] / "r.json").read_text()
    assert '"spec_sha256"' in meta and '"nondeterministic"' in meta


def test_region_output_is_byte_identical(files):
    a, b = files["dir"] / "a.csv", files["dir"] / "b.csv"
    for path in (a, b):
        assert main(["region", "-i", files["random"], "-o", str(path), "--seed", "4", *FAST]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_region_zero_capacity(files):
    out = str(files["dir"] / "z.csv")
    assert main(["region", "-i", files["useless"], "-o", out, *FAST]) == 0
    assert np.allclose(_read_region(out).vertices, 0.0, atol=1e-9)


def test_region_budget_exhausted(files):
    out = files["dir"] / "x.csv"
    assert main(["region", "-i", files["random"], "-o", str(out), "--max-seconds", "0"]) == 3
    assert out.exists()


def test_malformed_spec(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text('{"x_size": 2, "y_size": 2, "z_size": 2, "W": [[0.5, 0.6], [0, 1]], "states": []}')
    assert main(["region", "-i", str(bad)]) == 2
    assert "W" in capsys.readouterr().err


def test_missing_file(files):
    assert main(["symmetrizable", "-i", str(files["dir"] / "nope.json")]) == 2


def test_symmetrizable_outputs(files, capsys):
    assert main(["symmetrizable", "-i", files["xor"]]) == 0
    out = capsys.readouterr().out
    assert "verdict: symmetrizable" in out and "x=0: 1 0" in out and "x=1: 0 1" in out
    assert main(["symmetrizable", "-i", files["single"]]) == 0
    assert "verdict: nonsymmetrizable" in capsys.readouterr().out


def test_bsc_figure(files, capsys):
    d = files["dir"] / "fig"
    args = ["bsc-figure", "--p", "0.1", "--p-min", "0.05", "-o", str(d)]
    assert main(args + ["--p-max", "0.15", "--p-max", "0.25", "--p-max", "0.4"]) == 0
    hulls = [_read_region_any(d / f"hull_pmax_{pm}.csv") for pm in ("0.15", "0.25", "0.4")]
    assert hulls[0].contains_region(hulls[1], 1e-9) and hulls[1].contains_region(hulls[2], 1e-9)
    assert main(["bsc-figure", "--p", "0.2", "--p-min", "0.0", "--p-max", "0.1", "-o", str(d)]) == 0
    tri = _read_region_any(d / "hull_pmax_0.1.csv")
    assert len(tri) == 3
    assert main(["bsc-figure", "--p", "0.5", "--p-min", "0", "--p-max", "0.1", "-o", str(d)]) == 2


def _read_region_any(path):
    with open(path) as f:
        rows = list(csv.reader(f))[1:]
    return RateRegion.hull([(float(a), float(b)) for a, b in rows])


def test_figure_rendering(files):
    pytest.importorskip("matplotlib")
    png = files["dir"] / "f.png"
    assert main(["bsc-figure", "--p", "0.1", "--p-min", "0.05", "--p-max", "0.2",
                 "-o", str(files["dir"]), "--figure", str(png)]) == 0
    assert png.read_bytes()[:4] == b"\x89PNG"


def test_verify_passes_and_negative_control(files, capsys):
    assert main(["verify", "-i", files["random"], "--samples", "20", *FAST]) == 0
    assert main(["verify", "-i", files["single"], "--samples", "20", *FAST]) == 0
    bad = files["dir"] / "bad_region.csv"
    bad.write_text("rc,rp\n0,0\n0.9,0\n0,0.1\n")
    assert main(["verify", "-i", files["bs"], "--samples", "5", "--region", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "worst witnesses for corner_triangle" in err


def test_simulate(files, capsys):
    log = files["dir"] / "sim.csv"
    assert main(["simulate", "-i", files["bs"], "--n", "6", "--trials", "500", "-o", str(log)]) == 0
    assert "p_err: 0\n" in capsys.readouterr().out
    assert main(["simulate", "-i", files["bs"], "--n", "6", "--rc", "0.1", "--rp", "0.1",
                 "--trials", "500", "--adversary", "greedy", "-o", str(log)]) == 0
    assert len(log.read_text().splitlines()) == 3
    assert main(["simulate", "-i", files["bs"], "--n", "20"]) == 2


def test_simulate_inside_vs_outside(files, capsys):
    errs = []
    for rc, rp in [(0.08, 0.1), (0.25, 0.32)]:
        assert main(["simulate", "-i", files["bs"], "--n", "8", "--rc", str(rc), "--rp", str(rp),
                     "--trials", "4000", "--seed", "2"]) == 0
        out = capsys.readouterr().out
        errs.append(float(out.split("p_err: ")[1].split()[0]))
    assert errs[0] < errs[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "savbc", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for name in ("region", "symmetrizable", "bsc-figure", "verify", "simulate"):
        assert name in r.stdout
