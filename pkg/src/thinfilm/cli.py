"""Command-line front end: declarative configs in, CSV/JSON artifacts out.

Subcommands:

    simulate     integrate a model and emit trace.csv + asymptotics.json
    steady       solve a steady/traveling problem (optionally probe basins)
    travel       traveling-wave flux diagnostics J(h*) and Newton check
    asymptotics  fit the amplitude/phase laws to an existing trace CSV
    nondim       dimensional inputs -> nondimensional parameter JSON
    spiral       simulate, map to physical variables, fit the center spiral

Every run writes a manifest.json listing each produced file with its
SHA-256, so outputs are verifiable and byte-reproducible (17-significant-
digit floats, no wall-clock data).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import evolution, geometry, manifold, steady
from .models import ModelSpec, canonical_transform, nondimensionalize
from .spectral import write_coeffs_csv, write_snapshot

log = logging.getLogger("thinfilm")


def _setup_logging():
    level = os.environ.get("TFILM_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finish(out: Path, command: str, seed: int, cfg_text: str,
            files: list[Path]) -> None:
    manifest = {
        "command": command,
        "seed": seed,
        "config_sha256": hashlib.sha256(cfg_text.encode()).hexdigest(),
        "files": {f.name: _sha256(f) for f in sorted(files)},
    }
    _write_json(out / "manifest.json", manifest)


def _fit_from_trace(trace, window):
    t, rho, phase = manifold.extract_reduced(trace)
    return manifold.fit_asymptotics(t, rho, phase, window=window)


def cmd_simulate(cfg, out: Path, args) -> int:
    model = cfgmod.build_model(cfg)
    num = cfgmod.build_numerics(cfg)
    h0 = cfgmod.build_initial(cfg, num["n_max"])
    log.info("simulate: variant=%s N=%d horizon=%g", model.variant,
             num["n_max"], num["horizon"])
    trace = evolution.simulate(
        model, h0, num["horizon"], num["samples"], rtol=num["rtol"],
        atol=num["atol"], positivity_floor=num["positivity_floor"],
        dt0=num["dt0"], snapshot_every=num["snapshot_every"])
    files = []
    trace_path = out / "trace.csv"
    trace.write_csv(trace_path)
    files.append(trace_path)
    for i, (t_snap, h_snap) in enumerate(trace.snapshots):
        p = out / f"snapshot_{i:05d}.tflm"
        write_snapshot(h_snap, p)
        files.append(p)
    final = out / "final_coeffs.csv"
    # the trace keeps diagnostics only; re-derive the final field if snapshotted
    if trace.snapshots:
        write_coeffs_csv(trace.snapshots[-1][1], final)
        files.append(final)
    result = {"halted": trace.halted, "mean": trace.mean,
              "frame_speed": trace.frame_speed,
              "final_time": float(trace.t[-1])}
    if not trace.halted and trace.rho[-1] > 0:
        try:
            fit = _fit_from_trace(trace, cfgmod.build_fit_window(cfg))
            result["asymptotics"] = fit.to_dict(trace.mean)
        except ValueError as exc:
            log.warning("asymptotic fit skipped: %s", exc)
    _write_json(out / "asymptotics.json", result)
    files.append(out / "asymptotics.json")
    _finish(out, "simulate", args.seed, cfg.raw_text, files)
    if trace.halted and not args.allow_halt:
        log.error("simulation halted (positivity/step-size); "
                  "rerun with --allow-halt to accept")
        return 1
    return 0


def _steady_problem(cfg) -> tuple[steady.SteadyProblem, int]:
    d = cfg.steady
    variant = d.get("variant", "with_shear")
    wave_speed = float(d.get("wave_speed", 0.0))
    n_max = int(d.get("n", 16))
    if "j" in d:
        constraint = steady.GivenJ(float(d["j"]))
    elif "mean" in d:
        constraint = steady.GivenMean(float(d["mean"]))
    else:
        raise cfgmod.ConfigError("section [steady] needs 'j' or 'mean'")
    return steady.SteadyProblem(variant, constraint, wave_speed), n_max


def cmd_steady(cfg, out: Path, args) -> int:
    problem, n_max = _steady_problem(cfg)
    d = cfg.steady
    if isinstance(problem.constraint, steady.GivenMean):
        base = problem.constraint.h_star
    else:
        base = float(np.sqrt(2.0 * max(problem.constraint.J, 0.25)))
    rng = np.random.default_rng(args.seed)
    amp = float(d.get("init_amplitude", 0.01))
    h_init = steady._random_perturbation(rng, n_max, amp).shift_mean(base)
    sol = steady.newton_solve(problem, h_init)
    files = []
    coeffs_path = out / "steady_coeffs.csv"
    write_coeffs_csv(sol.h, coeffs_path)
    files.append(coeffs_path)
    report = {
        "variant": problem.variant, "c": sol.c, "J": sol.J,
        "classification": sol.classification,
        "residual": sol.residual_norm, "coeffs_file": coeffs_path.name,
    }
    if cfgmod.build_bool(d, "probe"):
        report["probe"] = steady.uniqueness_probe(
            problem,
            float(d.get("h_star", base)),
            float(d.get("amplitude", 0.01)),
            int(d.get("trials", 20)),
            args.seed, n_max=n_max, jobs=args.jobs)
    _write_json(out / "steady.json", report)
    files.append(out / "steady.json")
    _finish(out, "steady", args.seed, cfg.raw_text, files)
    return 0


def cmd_travel(cfg, out: Path, args) -> int:
    d = cfg.steady
    h_star = float(d.get("h_star", d.get("mean", 1.0)))
    c = float(d.get("wave_speed", 1.0))
    j_val, companion = steady.travelling_wave_J(h_star, c)
    report = {"h_star": h_star, "c": c, "J": j_val, "companion_root": companion}
    problem = steady.SteadyProblem(
        d.get("variant", "with_shear"), steady.GivenMean(h_star), c)
    n_max = int(d.get("n", 16))
    rng = np.random.default_rng(args.seed)
    amp = float(d.get("init_amplitude", 0.01))
    h_init = steady._random_perturbation(rng, n_max, amp).shift_mean(h_star)
    try:
        sol = steady.newton_solve(problem, h_init)
        report["newton"] = {"classification": sol.classification,
                            "J": sol.J, "residual": sol.residual_norm}
    except (steady.NoConvergence, steady.SingularJacobian) as exc:
        report["newton"] = {"error": str(exc)}
    _write_json(out / "travel.json", report)
    _finish(out, "travel", args.seed, cfg.raw_text, [out / "travel.json"])
    return 0


def cmd_asymptotics(cfg, out: Path, args) -> int:
    d = cfg.fit
    if "trace" not in d:
        raise cfgmod.ConfigError("section [fit] needs 'trace' (CSV path)")
    data = np.genfromtxt(d["trace"], delimiter=",", names=True)
    fit = manifold.fit_asymptotics(
        data["t"], data["rho"], data["phase_unwrapped"],
        window=cfgmod.build_fit_window(cfg))
    c = float(d.get("c", 1.0))
    _write_json(out / "asymptotics.json", fit.to_dict(c))
    _finish(out, "asymptotics", args.seed, cfg.raw_text,
            [out / "asymptotics.json"])
    return 0


def cmd_nondim(cfg, out: Path, args) -> int:
    d = cfg.nondim
    keys = ("gamma_tilde", "rho2", "r1", "omega", "d", "r2", "mu1", "mu2",
            "rho1")
    try:
        vals = {k: float(d[k]) for k in keys}
    except KeyError as exc:
        raise cfgmod.ConfigError(f"section [nondim] missing {exc}") from exc
    p = nondimensionalize(**vals)
    report = {"eps": p.eps, "gamma": p.gamma, "re": p.re, "mu": p.mu,
              "eta": p.eta, "zeta": p.zeta, "b": p.b}
    _write_json(out / "nondim.json", report)
    print(f"gamma = {p.gamma:.6g}, eps = {p.eps:.6g}")
    _finish(out, "nondim", args.seed, cfg.raw_text, [out / "nondim.json"])
    return 0


def cmd_spiral(cfg, out: Path, args) -> int:
    model = cfgmod.build_model(cfg)
    if model.variant != "physical":
        raise cfgmod.ConfigError("spiral needs a physical [model] section")
    phys = model.phys
    num = cfgmod.build_numerics(cfg)
    h0 = cfgmod.build_initial(cfg, num["n_max"])
    c = h0.mean
    snap_every = num["snapshot_every"] or max(1, num["samples"] // 50)
    canonical = ModelSpec.canonical(c)
    trace = evolution.simulate(
        canonical, h0, num["horizon"], num["samples"], rtol=num["rtol"],
        atol=num["atol"], dt0=num["dt0"], snapshot_every=snap_every)
    if trace.halted and not args.allow_halt:
        log.error("underlying simulation halted")
        return 1
    fit = _fit_from_trace(trace, cfgmod.build_fit_window(cfg))
    tr = canonical_transform(phys)
    # physical validity t_phys >= 10/(A eps lam) means rescaled t_bar >= 10
    valid = [(t, h) for t, h in trace.snapshots if t >= 10.0]
    if len(valid) < 2:
        raise cfgmod.ConfigError("horizon too short for the spiral window")
    series = geometry.spiral_fit_series(valid, tr, phys)
    offset = float(cfg.spiral.get("time_offset", fit.t0_hat))
    pred = geometry.predicted_spiral(
        phys, c, fit.C0_hat, series["t"], time_offset=offset,
        K=float(cfg.spiral["k"]) if "k" in cfg.spiral else None)
    files = []
    geometry.write_spiral_csv(out / "spiral.csv", pred, series)
    files.append(out / "spiral.csv")
    rel = np.abs(series["delta_fit"] - pred.delta) / pred.delta
    report = {
        "r0_pred": pred.r0,
        "r0_fit_max_error": float(np.max(np.abs(series["r_fit"] - pred.r0))),
        "delta_max_rel_error": float(np.max(rel)),
        "time_offset": offset,
        "asymptotics": fit.to_dict(c),
    }
    _write_json(out / "spiral.json", report)
    files.append(out / "spiral.json")
    _finish(out, "spiral", args.seed, cfg.raw_text, files)
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "steady": cmd_steady,
    "travel": cmd_travel,
    "asymptotics": cmd_asymptotics,
    "nondim": cmd_nondim,
    "spiral": cmd_spiral,
}


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="thinfilm",
        description="Spectral simulation and analysis of thin-film "
                    "interface equations between rotating cylinders.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="run config (INI)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for sweeps/trials")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--allow-halt", action="store_true",
                        help="exit 0 even if a simulation halted early")
    args = parser.parse_args(argv)

    try:
        cfg = cfgmod.load_config(args.config)
    except (OSError, cfgmod.ConfigError) as exc:
        parser.exit(2, f"thinfilm: {exc}\n")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, out, args)
    except cfgmod.ConfigError as exc:
        parser.exit(2, f"thinfilm: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
