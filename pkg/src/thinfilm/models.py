"""Interface-evolution equations, nondimensional groups and frame changes.

Four right-hand-side variants are provided, all in divergence form:

* canonical:        h_t = -d(h^2/2) - d(h^3 (h' + h'''))
* surface_tension:  h_t = -d(h^3 (h' + h'''))
* mixed:            h_t = -k d(h^2/2) - d(h^3 (h' + h''')), k = 1/(gamma eps^2)
* physical:         the unscaled thin-layer equation (inner or outer layer)

(d is the theta-derivative.)  The exact amplitude/angle/time rescalings
that map the physical variants onto the canonical one are implemented as
FrameTransform values acting on Fourier coefficients, so round trips are
exact to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import conv_center, conv_full
from .spectral import SpectralField, modes

VARIANTS = ("canonical", "surface_tension", "mixed", "physical")


@dataclass(frozen=True)
class PhysicalParams:
    """Nondimensional parameter set of the two-fluid problem.

    eps = d/R1, gamma = surface tension / (rho2 R1^3 omega^2), eta = R2/R1,
    re = Reynolds number of the outer fluid, mu = mu1/mu2, zeta = rho1/rho2.
    zeta drops out of every leading-order equation; carried for completeness.
    """

    eps: float
    gamma: float
    re: float
    mu: float
    eta: float
    zeta: float = 1.0
    layer: str = "inner"

    def __post_init__(self):
        if self.eps <= 0 or self.gamma <= 0 or self.re <= 0 or self.mu <= 0:
            raise ValueError("eps, gamma, re, mu must be positive")
        if self.eta <= 1:
            raise ValueError("radius ratio eta must exceed 1")
        if self.layer not in ("inner", "outer"):
            raise ValueError(f"layer must be 'inner' or 'outer', got {self.layer!r}")
        if self.layer == "inner" and self.eps >= self.eta - 1:
            raise ValueError("inner layer requires eps < eta - 1")

    @property
    def b(self) -> float:
        """Rescaled surface tension b = gamma * eps^2."""
        return self.gamma * self.eps**2


@dataclass(frozen=True)
class ModelSpec:
    """Which interface equation is integrated, plus its parameters."""

    variant: str
    c: float | None = None
    mixed_coeff: float | None = None
    phys: PhysicalParams | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant in ("canonical", "surface_tension"):
            if self.c is None or self.c <= 0:
                raise ValueError(f"{self.variant} requires c > 0")
        if self.variant == "mixed":
            if self.mixed_coeff is None or self.mixed_coeff < 0:
                raise ValueError("mixed requires mixed_coeff >= 0")
        if self.variant == "physical" and self.phys is None:
            raise ValueError("physical requires PhysicalParams")

    @staticmethod
    def canonical(c: float) -> "ModelSpec":
        return ModelSpec("canonical", c=c)

    @staticmethod
    def surface_tension(c: float) -> "ModelSpec":
        return ModelSpec("surface_tension", c=c)

    @staticmethod
    def mixed(mixed_coeff: float, c: float | None = None) -> "ModelSpec":
        return ModelSpec("mixed", c=c, mixed_coeff=mixed_coeff)

    @staticmethod
    def physical(phys: PhysicalParams) -> "ModelSpec":
        return ModelSpec("physical", phys=phys)


@dataclass(frozen=True)
class FrameTransform:
    """theta_bar = angle_sign * theta + drift * t,  t_bar = time_scale * t,
    h = lam * h_bar."""

    lam: float
    angle_sign: int = -1
    drift: float = 0.0
    time_scale: float = 1.0

    def __post_init__(self):
        if self.lam <= 0 or self.time_scale <= 0:
            raise ValueError("lam and time_scale must be positive")
        if self.angle_sign not in (-1, 1):
            raise ValueError("angle_sign must be +-1")


# ---- flux building blocks ----------------------------------------------


def _third_order_flux(coeffs: np.ndarray, n_max: int) -> np.ndarray:
    """Truncated coefficients of h^3 (h' + h''') via exact convolutions."""
    n = modes(n_max)
    w = (1j * n + (1j * n) ** 3) * coeffs
    h2 = conv_full(coeffs, coeffs)
    h3 = conv_full(h2, coeffs)
    return conv_center(h3, w, n_max)


def _half_square(coeffs: np.ndarray, n_max: int) -> np.ndarray:
    return conv_center(coeffs, coeffs, n_max) / 2.0


def rhs(model: ModelSpec, h: SpectralField) -> SpectralField:
    """Right-hand side h_t of the selected equation (zero-mean by form)."""
    n_max = h.n_max
    d = 1j * modes(n_max)
    c = h.coeffs
    if model.variant == "canonical":
        flux = _half_square(c, n_max) + _third_order_flux(c, n_max)
    elif model.variant == "surface_tension":
        flux = _third_order_flux(c, n_max)
    elif model.variant == "mixed":
        flux = model.mixed_coeff * _half_square(c, n_max) + _third_order_flux(c, n_max)
    else:
        p = model.phys
        if p.layer == "outer":
            return rhs_unscaled_outer(p, h)
        return _rhs_unscaled_inner(p, h)
    return SpectralField(-d * flux)


def _rhs_unscaled_inner(p: PhysicalParams, h: SpectralField) -> SpectralField:
    # h_t = -(1 - eps h) h' - eps [ (gamma eps^2 Re / 3 mu) d(h^3(h'+h'''))
    #        - (1/mu)((1+eta^2)/(eta^2-1)) d(h^2/2) + ((mu-1)/mu) d(h^2/2) ]
    n_max = h.n_max
    d = 1j * modes(n_max)
    c = h.coeffs
    sq = _half_square(c, n_max)
    # (1 - eps h) h' = d(h - eps h^2/2)
    transport = d * (c - p.eps * sq)
    shear = (-(1.0 + p.eta**2) / (p.mu * (p.eta**2 - 1.0)) + (p.mu - 1.0) / p.mu)
    stiff = p.gamma * p.eps**2 * p.re / (3.0 * p.mu)
    flux = stiff * _third_order_flux(c, n_max) + shear * sq
    return SpectralField(-transport - p.eps * d * flux)


def rhs_unscaled_outer(p: PhysicalParams, h: SpectralField) -> SpectralField:
    """Unscaled evolution for a thin layer on the external cylinder."""
    if p.layer != "outer":
        raise ValueError("rhs_unscaled_outer requires layer='outer'")
    n_max = h.n_max
    d = 1j * modes(n_max)
    c = h.coeffs
    sq = _half_square(c, n_max)
    # (1/eta + eps h / eta^2) h' = d(h/eta + eps h^2 / (2 eta^2))
    transport = d * (c / p.eta + p.eps * sq / p.eta**2)
    shear = ((1.0 - p.mu) * (p.eta**2 - 1.0) - p.mu * p.eta * (1.0 + p.eta**2)) / (
        p.eta**2 * (p.eta**2 - 1.0)
    )
    stiff = p.gamma * p.eps**2 * p.re / (3.0 * p.eta**3)
    flux = stiff * _third_order_flux(c, n_max) + shear * sq
    return SpectralField(transport - p.eps * d * flux)


def linearized_symbol_for(model: ModelSpec, mean: float, n_max: int) -> np.ndarray:
    """Exact linearization of rhs() around the constant field = mean."""
    n = modes(n_max).astype(float)
    stiffsym = -(mean**3) * (n**4 - n**2)
    if model.variant == "canonical":
        return stiffsym - 1j * mean * n
    if model.variant == "surface_tension":
        return stiffsym.astype(np.complex128)
    if model.variant == "mixed":
        return stiffsym - 1j * model.mixed_coeff * mean * n
    p = model.phys
    if p.layer == "inner":
        stiff = p.gamma * p.eps**2 * p.re / (3.0 * p.mu)
        shear = (-(1.0 + p.eta**2) / (p.mu * (p.eta**2 - 1.0)) + (p.mu - 1.0) / p.mu)
        lam = -p.eps * stiff * mean**3 * (n**4 - n**2)
        return lam - 1j * n * ((1.0 - p.eps * mean) + p.eps * shear * mean)
    stiff = p.gamma * p.eps**2 * p.re / (3.0 * p.eta**3)
    shear = ((1.0 - p.mu) * (p.eta**2 - 1.0) - p.mu * p.eta * (1.0 + p.eta**2)) / (
        p.eta**2 * (p.eta**2 - 1.0)
    )
    lam = -p.eps * stiff * mean**3 * (n**4 - n**2)
    return lam + 1j * n * (1.0 / p.eta + p.eps * mean / p.eta**2 - p.eps * shear * mean)


def frame_speed(model: ModelSpec, mean: float) -> float:
    """Rotation speed of the neutral n=1 mode in the linearization.

    The first-harmonic coefficient satisfies a_1(t) = e^{-i s t} * (slow),
    with s the value returned here; extract_reduced uses it to recover the
    co-rotating (slow) phase exactly.
    """
    sym = linearized_symbol_for(model, mean, 1)
    return float(-sym[2].imag)


# ---- nondimensionalization and rescalings -------------------------------


def nondimensionalize(gamma_tilde: float, rho2: float, r1: float, omega: float,
                      d: float, r2: float, mu1: float, mu2: float,
                      rho1: float) -> PhysicalParams:
    """Dimensional inputs (SI units, omega in rad/s) to PhysicalParams.

    The worked oil/water example (gamma_tilde=0.05 N/m, rho2=1000 kg/m^3,
    R1=1 mm, d=30 um) gives gamma ~= 1267 when omega is one revolution per
    second (2 pi rad/s); a literal 1 rpm = 2 pi/60 rad/s gives a much
    larger gamma.  This function does not guess: it takes rad/s.
    """
    vals = dict(gamma_tilde=gamma_tilde, rho2=rho2, r1=r1, omega=omega, d=d,
                r2=r2, mu1=mu1, mu2=mu2, rho1=rho1)
    for name, v in vals.items():
        if v <= 0:
            raise ValueError(f"{name} must be positive, got {v}")
    if r2 <= r1:
        raise ValueError("r2 must exceed r1")
    return PhysicalParams(
        eps=d / r1,
        gamma=gamma_tilde / (rho2 * r1**3 * omega**2),
        re=rho2 * omega * r1**2 / mu2,
        mu=mu1 / mu2,
        eta=r2 / r1,
        zeta=rho1 / rho2,
        layer="inner",
    )


def canonical_transform(phys: PhysicalParams, regime: str = "balanced") -> FrameTransform:
    """Change of variables mapping the physical equation to a rescaled one.

    regime='balanced': gamma ~ b/eps^2; maps onto the canonical equation.
    regime='strong':   gamma >> 1/eps^2 (inner layer); maps onto the mixed
                       equation with coefficient 1/(gamma eps^2).
    """
    eta, re, mu, eps = phys.eta, phys.re, phys.mu, phys.eps
    if regime == "balanced":
        if phys.layer == "inner":
            lam = np.sqrt(6.0 * eta**2 / (re * (eta**2 - 1.0) * phys.b))
            ts = 2.0 * eta**2 * lam * eps / (mu * (eta**2 - 1.0))
            return FrameTransform(lam=lam, angle_sign=-1, drift=1.0, time_scale=ts)
        num = mu * eta * (1.0 + eta**2) + mu * (eta**2 - 1.0)
        lam = np.sqrt(3.0 * num * eta / (phys.b * re * (eta**2 - 1.0)))
        ts = num / (eta**2 * (eta**2 - 1.0)) * eps * lam
        return FrameTransform(lam=lam, angle_sign=-1, drift=-1.0 / eta, time_scale=ts)
    if regime == "strong":
        if phys.layer != "inner":
            raise ValueError("strong-surface-tension rescaling is for the inner layer")
        lam = np.sqrt(6.0 * eta**2 / (re * (eta**2 - 1.0)))
        ts = 2.0 * eta**2 * lam * eps**3 * phys.gamma / (mu * (eta**2 - 1.0))
        return FrameTransform(lam=lam, angle_sign=-1, drift=1.0, time_scale=ts)
    raise ValueError(f"unknown regime {regime!r}")


def apply_transform(tr: FrameTransform, h_phys: SpectralField,
                    t_phys: float) -> tuple[SpectralField, float]:
    """Map (h, t) in physical variables to (h_bar, t_bar).

    Exact on coefficients: the angle reflection flips indices (conjugate
    symmetry makes this a real operation) and the drift multiplies a_m by
    a phase.
    """
    c = h_phys.coeffs
    if tr.angle_sign == -1:
        c = c[::-1]
    m = modes(h_phys.n_max)
    c = c * np.exp(-1j * m * tr.drift * t_phys) / tr.lam
    return SpectralField(c), tr.time_scale * t_phys


def invert_transform(tr: FrameTransform, h_bar: SpectralField,
                     t_bar: float) -> tuple[SpectralField, float]:
    """Inverse of apply_transform; exact round trip."""
    t_phys = t_bar / tr.time_scale
    m = modes(h_bar.n_max)
    c = h_bar.coeffs * tr.lam * np.exp(1j * m * tr.drift * t_phys)
    if tr.angle_sign == -1:
        c = c[::-1]
    return SpectralField(c), t_phys


# ---- run-config (de)serialization ---------------------------------------


def model_to_dict(model: ModelSpec) -> dict:
    out: dict = {"variant": model.variant}
    if model.c is not None:
        out["c"] = model.c
    if model.mixed_coeff is not None:
        out["mixed_coeff"] = model.mixed_coeff
    if model.phys is not None:
        p = model.phys
        out.update(eps=p.eps, gamma=p.gamma, re=p.re, mu=p.mu, eta=p.eta,
                   zeta=p.zeta, layer=p.layer)
    return out


def model_from_dict(d: dict) -> ModelSpec:
    variant = d["variant"]
    if variant == "physical":
        gamma = d.get("gamma")
        if gamma is None:
            gamma = float(d["b"]) / float(d["eps"]) ** 2
        phys = PhysicalParams(
            eps=float(d["eps"]), gamma=float(gamma), re=float(d["re"]),
            mu=float(d["mu"]), eta=float(d["eta"]),
            zeta=float(d.get("zeta", 1.0)), layer=d.get("layer", "inner"),
        )
        return ModelSpec.physical(phys)
    if variant == "mixed":
        return ModelSpec.mixed(float(d["mixed_coeff"]),
                               float(d["c"]) if "c" in d else None)
    return ModelSpec(variant, c=float(d["c"]))
