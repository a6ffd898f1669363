"""End-to-end CLI runs: artifacts, manifests, determinism, exit codes."""

import hashlib
import json

import numpy as np
import pytest

from thinfilm.cli import main


SIM_CFG = """\
[model]
variant = canonical
c = 1.0

[initial]
mean = 1.0
perturbations = 1:0.05

[numerics]
n = 16
horizon = 5.0
samples = 25
snapshot_every = 10
"""


def run(tmp_path, name, cfg_text, command, extra=()):
    cfg = tmp_path / f"{name}.ini"
    cfg.write_text(cfg_text)
    out = tmp_path / name
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def manifest_of(out):
    return json.loads((out / "manifest.json").read_text())


def test_simulate_artifacts_and_manifest(tmp_path):
    code, out = run(tmp_path, "sim", SIM_CFG, "simulate")
    assert code == 0
    assert (out / "trace.csv").exists()
    assert (out / "asymptotics.json").exists()
    assert (out / "snapshot_00000.tflm").exists()
    man = manifest_of(out)
    assert man["command"] == "simulate"
    # the manifest covers every artifact except itself, with true hashes
    produced = {p.name for p in out.iterdir()} - {"manifest.json"}
    assert set(man["files"]) == produced
    for name, digest in man["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    result = json.loads((out / "asymptotics.json").read_text())
    assert result["halted"] is False
    assert result["mean"] == pytest.approx(1.0)


def test_simulate_reruns_are_byte_identical(tmp_path):
    _, out1 = run(tmp_path, "rep1", SIM_CFG, "simulate")
    _, out2 = run(tmp_path, "rep2", SIM_CFG, "simulate")
    names1 = sorted(p.name for p in out1.iterdir())
    assert names1 == sorted(p.name for p in out2.iterdir())
    for name in names1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


STEADY_CFG = """\
[steady]
variant = with_shear
mean = 2.0
wave_speed = 1.0
n = 8
probe = yes
trials = 4
amplitude = 0.05
"""


def test_steady_command(tmp_path):
    code, out = run(tmp_path, "steady", STEADY_CFG, "steady")
    assert code == 0
    report = json.loads((out / "steady.json").read_text())
    assert report["classification"] == "Constant"
    assert report["J"] == pytest.approx(0.0, abs=1e-9)
    assert report["probe"]["fraction_expected"] == 1.0
    assert (out / "steady_coeffs.csv").exists()


def test_travel_command(tmp_path):
    cfg = """\
[steady]
h_star = 2.0
wave_speed = 0.5
n = 8
"""
    code, out = run(tmp_path, "travel", cfg, "travel")
    assert code == 0
    report = json.loads((out / "travel.json").read_text())
    assert report["J"] == pytest.approx(1.0)
    assert report["companion_root"] == pytest.approx(-1.0)
    assert report["newton"]["classification"] == "Constant"


def test_asymptotics_command(tmp_path):
    # synthetic trace following the decay law exactly
    t = np.linspace(0.0, 2000.0, 300)
    rho = 2.0 / np.sqrt(t + 25.0)
    phase = 9.0 * np.log(t + 25.0) + 0.3
    trace = tmp_path / "trace.csv"
    with open(trace, "w") as fh:
        fh.write("t,mass,min_h,h4_norm,rho,phase_unwrapped,"
                 "slaving_defect,dist_M0\n")
        for i in range(t.size):
            fh.write(f"{t[i]},6.28,0.9,0.1,{rho[i]},{phase[i]},0,0\n")
    cfg = f"""\
[fit]
trace = {trace}
c = 1.0
t_min = 100
t_max = 2000
"""
    code, out = run(tmp_path, "fit", cfg, "asymptotics")
    assert code == 0
    result = json.loads((out / "asymptotics.json").read_text())
    assert result["K_hat"] == pytest.approx(2.0, rel=1e-6)
    assert result["Ktilde_hat"] == pytest.approx(9.0, rel=1e-6)
    assert result["t0_hat"] == pytest.approx(25.0, rel=1e-4)


def test_nondim_command(tmp_path, capsys):
    cfg = """\
[nondim]
gamma_tilde = 0.05
rho2 = 1000
r1 = 1e-3
omega = 6.283185307179586
d = 30e-6
r2 = 2e-3
mu1 = 0.1
mu2 = 1e-3
rho1 = 900
"""
    code, out = run(tmp_path, "nondim", cfg, "nondim")
    assert code == 0
    line = capsys.readouterr().out
    assert "gamma = 1266.5" in line and "eps = 0.03" in line
    report = json.loads((out / "nondim.json").read_text())
    assert report["gamma"] == pytest.approx(1266.51, abs=0.01)
    assert report["eta"] == 2.0


SPIRAL_CFG = """\
[model]
variant = physical
eps = 0.01
gamma = 10000
re = 1.0
mu = 1.0
eta = 2.0

[initial]
mean = 1.0
perturbations = 1:0.04

[numerics]
n = 16
horizon = 60.0
samples = 60
"""


def test_spiral_command(tmp_path):
    code, out = run(tmp_path, "spiral", SPIRAL_CFG, "spiral")
    assert code == 0
    report = json.loads((out / "spiral.json").read_text())
    lam = np.sqrt(8.0)
    assert report["r0_pred"] == pytest.approx(1.0 + 0.01 * lam, rel=1e-10)
    assert report["r0_fit_max_error"] < 1e-3
    lines = (out / "spiral.csv").read_text().strip().splitlines()
    assert lines[0].startswith("t,delta_pred,delta_fit")
    assert len(lines) > 2


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[bogus]\nx = 1\n")
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert exc.value.code == 2


def test_missing_config_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(tmp_path / "nope.ini"),
              "--out", str(tmp_path / "o")])
    assert exc.value.code == 2
