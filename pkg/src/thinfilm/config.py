"""Run-configuration parsing (INI-style key/value files with sections).

The grammar is documented in docs/config.md.  A config file drives one
CLI command; sections are [model], [initial], [numerics], [fit],
[steady], [spiral], [nondim], [output].  All values are flat scalars
except ``perturbations``, a comma list of n:amplitude:phase triples.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec, model_from_dict
from .spectral import SpectralField, read_snapshot


class ConfigError(ValueError):
    """Invalid or missing configuration, with key diagnostics."""


@dataclass
class RunConfig:
    model: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    numerics: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    steady: dict = field(default_factory=dict)
    spiral: dict = field(default_factory=dict)
    nondim: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    raw_text: str = ""


_SECTIONS = ("model", "initial", "numerics", "fit", "steady", "spiral",
             "nondim", "output")


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    with open(path) as fh:
        text = fh.read()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    cfg = RunConfig(raw_text=text)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        getattr(cfg, section).update(dict(parser.items(section)))
    return cfg


def _get(d: dict, key: str, cast, default=None, section: str = ""):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in section [{section}]")
    try:
        return cast(d[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"bad value for '{key}' in [{section}]: {d[key]!r}") from exc


def _bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def build_model(cfg: RunConfig) -> ModelSpec:
    d = dict(cfg.model)
    if "variant" not in d:
        raise ConfigError("missing key 'variant' in section [model]")
    try:
        return model_from_dict(d)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid [model] section: {exc}") from exc


def parse_perturbations(text: str) -> list[tuple[int, float, float]]:
    """Comma list of n:amplitude:phase (phase optional, radians)."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad perturbation {chunk!r} (want n:amp[:phase])")
        n = int(parts[0])
        if n < 1:
            raise ConfigError(f"perturbation mode must be >= 1, got {n}")
        amp = float(parts[1])
        phase = float(parts[2]) if len(parts) == 3 else 0.0
        out.append((n, amp, phase))
    return out


def build_initial(cfg: RunConfig, n_max: int) -> SpectralField:
    """Initial data: mean + sum amp*cos(n theta + phase), or a snapshot."""
    d = cfg.initial
    if "snapshot" in d:
        h = read_snapshot(d["snapshot"])
        if h.n_max != n_max:
            raise ConfigError(
                f"snapshot N={h.n_max} does not match numerics N={n_max}")
        return h
    mean = _get(d, "mean", float, section="initial")
    coeffs = np.zeros(2 * n_max + 1, np.complex128)
    coeffs[n_max] = mean
    for n, amp, phase in parse_perturbations(d.get("perturbations", "")):
        if n > n_max:
            raise ConfigError(f"perturbation mode {n} exceeds N={n_max}")
        a = 0.5 * amp * np.exp(1j * phase)
        coeffs[n_max + n] += a
        coeffs[n_max - n] += np.conj(a)
    return SpectralField(coeffs)


def build_numerics(cfg: RunConfig) -> dict:
    d = cfg.numerics
    sec = "numerics"
    return {
        "n_max": _get(d, "n", int, section=sec),
        "horizon": _get(d, "horizon", float, section=sec),
        "samples": _get(d, "samples", int, 400, sec),
        "rtol": _get(d, "rtol", float, 1e-9, sec),
        "atol": _get(d, "atol", float, 1e-12, sec),
        "dt0": _get(d, "dt0", float, 1e-6, sec),
        "positivity_floor": _get(d, "positivity_floor", float, 1e-6, sec),
        "snapshot_every": _get(d, "snapshot_every", int, 0, sec),
    }


def build_fit_window(cfg: RunConfig) -> tuple[float, float] | None:
    d = cfg.fit
    if "t_min" in d or "t_max" in d:
        return (_get(d, "t_min", float, section="fit"),
                _get(d, "t_max", float, section="fit"))
    return None


def build_bool(cfg_section: dict, key: str, default: bool = False) -> bool:
    if key not in cfg_section:
        return default
    return _bool(cfg_section[key])
