"""Steady states and traveling waves of the interface flux equation.

A profile h is steady (in the frame moving at speed c) exactly when the
integrated flux

    F(h) = -c h + s h^2/2 + h^3 (h' + h''')

is a constant J, with s = 1 for the equation with shear ("with_shear")
and s = 0 when only surface tension acts ("surface_tension").  The
module provides the analytic branches (the constant sqrt(2J) and the
off-center-circle family c1 + c2 sin(theta - theta0)), a Newton solver
on Fourier collocation with an analytically assembled spectral Jacobian,
and a randomized probe of the near-constant uniqueness behavior.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kernels import conv_full
from .models import _third_order_flux
from .spectral import SpectralField, modes

STEADY_VARIANTS = ("with_shear", "surface_tension")

RESIDUAL_TOL = 1e-10
_MAX_ITER = 50


class NoPositiveSolution(ValueError):
    """The constant branch sqrt(2J) needs J > 0."""


class NotPositive(ValueError):
    """The circular family needs |c2| < c1."""


class SingularJacobian(RuntimeError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class GivenJ:
    J: float


@dataclass(frozen=True)
class GivenMean:
    h_star: float


@dataclass(frozen=True)
class SteadyProblem:
    """Which flux equation, which constraint, which wave speed."""

    variant: str
    constraint: GivenJ | GivenMean
    wave_speed: float = 0.0

    def __post_init__(self):
        if self.variant not in STEADY_VARIANTS:
            raise ValueError(f"unknown steady variant {self.variant!r}")
        if not isinstance(self.constraint, (GivenJ, GivenMean)):
            raise ValueError("constraint must be GivenJ or GivenMean")


@dataclass(frozen=True)
class SteadySolution:
    h: SpectralField
    J: float
    c: float
    residual_norm: float
    classification: str  # "Constant" | "CircularFamily" | "Nonconstant"


def _shear_weight(variant: str) -> float:
    if variant not in STEADY_VARIANTS:
        raise ValueError(f"unknown steady variant {variant!r}")
    return 1.0 if variant == "with_shear" else 0.0


def flux(variant: str, c: float, h: SpectralField) -> SpectralField:
    """F(h) = -c h + s h^2/2 + h^3 (h' + h''') as a field."""
    s = _shear_weight(variant)
    n_max = h.n_max
    cf = h.coeffs
    out = -c * cf + _third_order_flux(cf, n_max)
    if s:
        out = out + conv_full(cf, cf)[n_max: 3 * n_max + 1] / 2.0
    return SpectralField(out)


def _classify(h: SpectralField, variant: str, c: float, J: float) -> str:
    # tolerance consistent with RESIDUAL_TOL: a Newton iterate converged to
    # residual 1e-10 may carry coefficient remnants a couple of orders above
    scale = max(1.0, abs(h.mean))
    tol = 100.0 * RESIDUAL_TOL * scale
    n = h.n_max
    mags = np.abs(h.coeffs)
    if np.all(np.delete(mags, n) <= tol):
        return "Constant"
    higher = mags.copy()
    higher[n - 1: n + 2] = 0.0
    if (variant == "surface_tension" and c == 0.0
            and np.all(higher <= tol) and abs(J) <= tol):
        return "CircularFamily"
    return "Nonconstant"


def constant_branch(J: float) -> SteadySolution:
    """The constant steady state h = sqrt(2J) of the sheared equation."""
    if J <= 0:
        raise NoPositiveSolution(
            f"the flux equation has no positive constant solution for J={J}")
    h = SpectralField.constant(float(np.sqrt(2.0 * J)), 1)
    return SteadySolution(h=h, J=float(J), c=0.0, residual_norm=0.0,
                          classification="Constant")


def circular_family(c1: float, c2: float, theta0: float,
                    n_max: int = 8) -> SteadySolution:
    """h = c1 + c2 sin(theta - theta0): the off-center-circle steady family.

    These solve the surface-tension-only equation with J = 0 because
    h' + h''' vanishes identically on the first harmonic.
    """
    if c1 <= 0 or abs(c2) >= c1:
        raise NotPositive(f"need 0 <= |c2| < c1, got c1={c1}, c2={c2}")
    h = SpectralField.harmonic(n_max, mean=c1,
                               cos={1: -c2 * np.sin(theta0)},
                               sin={1: c2 * np.cos(theta0)})
    res = flux("surface_tension", 0.0, h)
    residual = float(np.sqrt(2.0 * np.pi * np.sum(np.abs(res.coeffs) ** 2)))
    return SteadySolution(h=h, J=0.0, c=0.0, residual_norm=residual,
                          classification=_classify(h, "surface_tension", 0.0, 0.0))


def travelling_wave_J(h_star: float, c: float) -> tuple[float, float]:
    """J(h*) = -c h* + h*^2/2 and the companion root 2c - h*.

    The constants x with -c x + x^2/2 = J are exactly {h*, 2c - h*}
    (the quadratic factors as (x - h*)(x + h* - 2c)/2).
    """
    if h_star <= 0:
        raise ValueError("h_star must be positive")
    return -c * h_star + h_star**2 / 2.0, 2.0 * c - h_star


# ---- Newton on Fourier collocation ---------------------------------------


def _product_matrix(u_full: np.ndarray, n_max: int) -> np.ndarray:
    """Matrix of g -> truncation of u*g on coefficients -N..N.

    ``u_full`` holds the coefficients of u over modes -B..B (any B >= 0);
    entry (n, m) is u_{n-m}.
    """
    b = (u_full.size - 1) // 2
    n = modes(n_max)
    idx = n[:, None] - n[None, :]
    out = np.zeros((2 * n_max + 1, 2 * n_max + 1), np.complex128)
    ok = np.abs(idx) <= b
    out[ok] = u_full[idx[ok] + b]
    return out


def _flux_jacobian(variant: str, c: float, h: SpectralField) -> np.ndarray:
    """Complex matrix of DF(h): g -> -c g + s h g + 3h^2 (h'+h''') g + h^3 (g'+g''')."""
    s = _shear_weight(variant)
    n_max = h.n_max
    cf = h.coeffs
    d = 1j * modes(n_max)
    w = (d + d**3) * cf
    h2 = conv_full(cf, cf)
    h3 = conv_full(h2, cf)
    m = -c * np.eye(2 * n_max + 1, dtype=np.complex128)
    if s:
        m += _product_matrix(cf, n_max)
    m += _product_matrix(conv_full(3.0 * h2, w), n_max)
    m += _product_matrix(h3, n_max) * (d + d**3)[None, :]
    return m


def _x_to_field(x: np.ndarray, n_max: int) -> SpectralField:
    c = np.zeros(2 * n_max + 1, np.complex128)
    c[n_max] = x[0]
    c[n_max + 1:] = x[1: n_max + 1] + 1j * x[n_max + 1:]
    c[:n_max] = np.conj(c[n_max + 1:][::-1])
    return SpectralField(c)


def _field_to_x(h: SpectralField) -> np.ndarray:
    n = h.n_max
    pos = h.coeffs[n + 1:]
    return np.concatenate([[h.mean], pos.real, pos.imag])


def _real_rows(m_complex: np.ndarray, n_max: int) -> np.ndarray:
    """Real system of the complex operator on conjugate-symmetric vectors.

    Unknowns: [a0, Re a_1..a_N, Im a_1..a_N]; equations: Re and Im of the
    complex rows n = 0..N (2N+2 real rows, the Im row of n=0 included as
    a consistency row; it is identically zero for symmetric operators).
    """
    rows_c = m_complex[n_max:, :]  # rows n = 0..N
    col0 = rows_c[:, n_max]
    pos = rows_c[:, n_max + 1:]
    neg = rows_c[:, :n_max][:, ::-1]
    re_cols = pos + neg
    im_cols = 1j * (pos - neg)
    comp = np.hstack([col0[:, None], re_cols, im_cols])
    return np.vstack([comp.real, comp.imag])


def _complex_to_real_rhs(v: np.ndarray, n_max: int) -> np.ndarray:
    rows = v[n_max:]
    return np.concatenate([rows.real, rows.imag])


def newton_solve(problem: SteadyProblem, h_init: SpectralField) -> SteadySolution:
    """Newton iteration for F(h) = J under the problem's constraint.

    For GivenMean, J is an extra unknown and the mean equation an extra
    row (bordered system).  The rotational kernel is pinned by the phase
    condition Im(a1 e^{-i phi_ref}) = 0 with phi_ref from the initial
    guess; remaining kernel directions (genuine solution families) are
    handled by the minimum-norm least-squares update.
    """
    n_max = h_init.n_max
    c = problem.wave_speed
    given_mean = isinstance(problem.constraint, GivenMean)
    a1 = h_init.coeff(1)
    phi_ref = float(np.angle(a1)) if abs(a1) > 1e-14 else 0.0
    phase_row = np.zeros(2 * n_max + 1 + (1 if given_mean else 0))
    phase_row[1] = -np.sin(phi_ref)
    phase_row[n_max + 1] = np.cos(phi_ref)

    x = _field_to_x(h_init)
    if given_mean:
        h_star = problem.constraint.h_star
        j_val = float(flux(problem.variant, c, h_init).mean)
        x = np.concatenate([x, [j_val]])
    else:
        j_val = problem.constraint.J

    def residual_vec(xv: np.ndarray) -> tuple[np.ndarray, SpectralField, float]:
        h = _x_to_field(xv[: 2 * n_max + 1], n_max)
        jv = xv[-1] if given_mean else j_val
        g = flux(problem.variant, c, h).coeffs.copy()
        g[n_max] -= jv
        parts = [_complex_to_real_rhs(g, n_max)]
        if given_mean:
            parts.append([h.mean - h_star])
        parts.append([xv[n_max + 1] * np.cos(phi_ref)
                      - xv[1] * np.sin(phi_ref)])
        return np.concatenate(parts), h, float(jv)

    res, h, jv = residual_vec(x)
    res_norm = float(np.linalg.norm(res))
    for _ in range(_MAX_ITER):
        if res_norm <= RESIDUAL_TOL:
            break
        jac_c = _flux_jacobian(problem.variant, c, h)
        jac = _real_rows(jac_c, n_max)
        if given_mean:
            dj = np.zeros((jac.shape[0], 1))
            dj[0, 0] = -1.0  # d(residual mode-0)/dJ
            jac = np.hstack([jac, dj])
            mean_row = np.zeros((1, jac.shape[1]))
            mean_row[0, 0] = 1.0
            jac = np.vstack([jac, mean_row])
        jac = np.vstack([jac, phase_row])
        delta, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian("non-finite Newton update")
        lam = 1.0
        for _ in range(10):
            trial = x + lam * delta
            t_res, t_h, t_j = residual_vec(trial)
            t_norm = float(np.linalg.norm(t_res))
            if t_norm < res_norm or res_norm == 0.0:
                break
            lam /= 2.0
        else:
            raise NoConvergence(
                f"line search stalled at residual {res_norm:.3e}")
        x, res, h, jv, res_norm = trial, t_res, t_h, t_j, t_norm
    if res_norm > RESIDUAL_TOL:
        raise NoConvergence(
            f"residual {res_norm:.3e} after {_MAX_ITER} iterations")
    field_res = flux(problem.variant, c, h).coeffs.copy()
    field_res[n_max] -= jv
    residual_norm = float(np.sqrt(2.0 * np.pi * np.sum(np.abs(field_res) ** 2)))
    return SteadySolution(h=h, J=jv, c=c, residual_norm=residual_norm,
                          classification=_classify(h, problem.variant, c, jv))


# ---- randomized uniqueness probe -----------------------------------------


def _random_perturbation(rng: np.random.Generator, n_max: int,
                         amplitude: float) -> SpectralField:
    k = min(3, n_max)
    amps = {n: (rng.normal() + 1j * rng.normal()) for n in range(1, k + 1)}
    pert = SpectralField.from_modes(n_max, amps)
    peak = float(np.max(np.abs(pert.grid_values(max(8 * n_max, 64)))))
    return SpectralField(pert.coeffs * (amplitude / peak))


def _expected_class(problem: SteadyProblem) -> tuple[str, ...]:
    if problem.variant == "surface_tension" and problem.wave_speed == 0.0:
        return ("Constant", "CircularFamily")
    return ("Constant",)


def _one_trial(problem: SteadyProblem, h_star: float, amplitude: float,
               n_max: int, seed_pair: tuple[int, int]) -> str:
    rng = np.random.default_rng(seed_pair)
    pert = _random_perturbation(rng, n_max, amplitude)
    h0 = pert.shift_mean(h_star)
    try:
        sol = newton_solve(problem, h0)
    except (NoConvergence, SingularJacobian):
        return "failed"
    return sol.classification


def uniqueness_probe(problem: SteadyProblem, h_star: float, amplitude: float,
                     trials: int, seed: int, n_max: int = 16,
                     jobs: int = 1) -> dict:
    """Launch Newton from random perturbations; tally where it lands.

    Also bisects (along one fixed random direction) for the largest
    perturbation amplitude that still returns to the expected family.
    """
    if not 0 < amplitude < h_star:
        raise ValueError("need 0 < amplitude < h_star")
    expected = _expected_class(problem)
    args = [(problem, h_star, amplitude, n_max, (seed, i))
            for i in range(trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda a: _one_trial(*a), args))
    else:
        outcomes = [_one_trial(*a) for a in args]
    counts = {k: outcomes.count(k)
              for k in ("Constant", "CircularFamily", "Nonconstant", "failed")}
    n_expected = sum(counts[k] for k in expected if k in counts)

    rng = np.random.default_rng((seed, trials))
    direction = _random_perturbation(rng, n_max, 1.0)

    def returns(amp: float) -> bool:
        h0 = SpectralField(direction.coeffs * amp).shift_mean(h_star)
        try:
            sol = newton_solve(problem, h0)
        except (NoConvergence, SingularJacobian, ValueError):
            return False
        return sol.classification in expected

    lo, hi = amplitude, 0.95 * h_star
    if returns(hi):
        basin = hi
    elif not returns(lo):
        basin = 0.0
    else:
        for _ in range(25):
            mid = 0.5 * (lo + hi)
            if returns(mid):
                lo = mid
            else:
                hi = mid
        basin = lo
    return {
        "trials": trials,
        "expected_classes": list(expected),
        "counts": counts,
        "fraction_expected": n_expected / trials,
        "basin_amplitude": float(basin),
    }
