"""Interface geometry: curvature, circle fits, center-spiral predictions."""

import numpy as np
import pytest

import thinfilm as tf
from thinfilm.geometry import (InterfaceCurve, spiral_fit_series,
                               write_spiral_csv)


PHYS = tf.PhysicalParams(eps=0.01, gamma=1e4, re=1.0, mu=1.0, eta=2.0)


# ---- curvature ---------------------------------------------------------------


def test_curvature_of_circle():
    h = tf.SpectralField.constant(1.0, 8)
    k = tf.curvature(h, 0.1)
    assert k.mean == pytest.approx(1.0 / 1.1, rel=1e-12)
    assert np.max(np.abs(k.grid_values() - 1.0 / 1.1)) < 1e-12


def test_curvature_of_unit_circle():
    h = tf.SpectralField.zeros(8)
    k = tf.curvature(h, 0.5)
    assert np.max(np.abs(k.grid_values() - 1.0)) < 1e-13


def test_curvature_linearization_is_second_order():
    """kappa = 1 - eps (h + h'') + O(eps^2): halving eps must cut the
    defect of the linear form by ~4."""
    h = tf.SpectralField.harmonic(8, cos={2: 1.0}, sin={3: 0.5})
    lin = h + tf.derivative(h, 2)

    def defect(eps):
        k = tf.curvature(h, eps)
        m = 256
        approx = 1.0 - eps * lin.grid_values(m)
        return np.max(np.abs(k.grid_values(m) - approx))

    d1, d2 = defect(1e-2), defect(5e-3)
    assert d1 / d2 == pytest.approx(4.0, rel=0.15)
    assert d1 < 5e-3


def test_curvature_validation():
    h = tf.SpectralField.constant(-3.0, 4)
    with pytest.raises(ValueError):
        tf.curvature(h, 0.5)  # radius 1 + eps h <= 0
    with pytest.raises(ValueError):
        tf.curvature(tf.SpectralField.zeros(4), 0.0)


# ---- interface curves --------------------------------------------------------


def test_interface_curve_conventions():
    h = tf.SpectralField.constant(1.0, 4)
    inner = tf.interface_curve(h, PHYS, m=64)
    np.testing.assert_allclose(inner.r, 1.0 + PHYS.eps, rtol=1e-14)
    outer_phys = tf.PhysicalParams(eps=0.01, gamma=1e4, re=1.0, mu=1.0,
                                   eta=2.0, layer="outer")
    outer = tf.interface_curve(h, outer_phys, m=64)
    np.testing.assert_allclose(outer.r, 2.0 - 0.01, rtol=1e-14)
    x, y = inner.xy
    np.testing.assert_allclose(np.hypot(x, y), inner.r, rtol=1e-14)


def test_interface_curve_validation():
    with pytest.raises(ValueError):
        InterfaceCurve(theta=np.array([0.0, 1.0]), r=np.array([1.0]))
    with pytest.raises(ValueError):
        InterfaceCurve(theta=np.array([0.0, 1.0]), r=np.array([1.0, -1.0]))


# ---- circle fitting ----------------------------------------------------------


def test_fit_circle_exact():
    theta = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    cx, cy, radius = 0.3, -0.2, 2.0
    # polar samples about the origin of an off-center circle
    x = cx + radius * np.cos(theta)
    y = cy + radius * np.sin(theta)
    curve = InterfaceCurve(theta=np.arctan2(y, x), r=np.hypot(x, y))
    center, r_hat, rms = tf.fit_circle(curve)
    np.testing.assert_allclose(center, [cx, cy], atol=1e-12)
    assert r_hat == pytest.approx(radius, abs=1e-12)
    assert rms < 1e-12


def test_fit_circle_of_first_harmonic_interface():
    """a1 = rho e^{i phi} gives h = c + 2 rho cos(theta + phi), so the
    interface is, to O(eps^2), a circle of radius 1 + eps c centered at
    distance 2 eps rho in direction -phi."""
    eps, rho, phi = 1e-3, 0.15, 0.7
    h = tf.SpectralField.from_modes(16, {0: 1.0, 1: rho * np.exp(1j * phi)})
    phys = tf.PhysicalParams(eps=eps, gamma=1e4, re=1.0, mu=1.0, eta=2.0)
    center, r_hat, rms = tf.fit_circle(tf.interface_curve(h, phys))
    delta = np.hypot(*center)
    assert delta == pytest.approx(2.0 * eps * rho, rel=1e-4)
    assert np.arctan2(center[1], center[0]) == pytest.approx(-phi, abs=1e-4)
    assert r_hat == pytest.approx(1.0 + eps, rel=1e-6)
    assert rms < 1e-5


def test_fit_circle_needs_enough_samples():
    theta = np.linspace(0, 2 * np.pi, 4, endpoint=False)
    with pytest.raises(ValueError):
        tf.fit_circle(InterfaceCurve(theta=theta, r=np.ones(4)))


# ---- distance to the circle family -------------------------------------------


def test_dist_to_M0_examples():
    h = tf.SpectralField.harmonic(8, mean=1.0, cos={2: 0.1})
    d = tf.dist_to_M0(h, 1.0)
    assert d == pytest.approx(0.1 * 25.0 * np.sqrt(np.pi), rel=1e-13)
    # first-harmonic content costs nothing: it moves along the family
    h2 = tf.SpectralField.harmonic(8, mean=1.0, cos={1: 0.3})
    assert tf.dist_to_M0(h2, 1.0) == 0.0


def test_dist_to_M0_flag_and_validation():
    h = tf.SpectralField.harmonic(8, mean=1.0, cos={1: 1.5})
    d, outside = tf.dist_to_M0(h, 1.0, with_flag=True)
    assert outside  # c2 = 1.5 >= c = 1: leaves the positive family
    d2, ok = tf.dist_to_M0(
        tf.SpectralField.harmonic(8, mean=1.0, cos={1: 0.3}), 1.0,
        with_flag=True)
    assert not ok
    with pytest.raises(ValueError):
        tf.dist_to_M0(h, 2.0)  # mean mismatch
    with pytest.raises(ValueError):
        tf.dist_to_M0(tf.SpectralField.harmonic(4, mean=-1.0), -1.0)


def test_dist_to_M0_is_true_minimum():
    """Brute-force check: no member of the circle family is closer."""
    rng = np.random.default_rng(2)
    h = tf.SpectralField.harmonic(8, mean=1.0, cos={1: 0.1, 2: 0.05},
                                  sin={3: 0.02})
    d = tf.dist_to_M0(h, 1.0)
    for _ in range(200):
        a1 = 0.2 * (rng.normal() + 1j * rng.normal())
        member = tf.SpectralField.from_modes(8, {0: 1.0, 1: a1})
        dist = tf.sobolev_norm(h - member, 4, homogeneous=False)
        assert dist >= d - 1e-12


# ---- predicted spiral ---------------------------------------------------------


def test_predicted_spiral_factors():
    # eta=2, re=mu=1, b=1: lam = sqrt(8), time factor ts = (8/3) eps lam
    tr = tf.canonical_transform(PHYS)
    ts = tr.time_scale
    t = np.linspace(20.0 / ts, 100.0 / ts, 5)
    pred = tf.predicted_spiral(PHYS, 1.0, 0.0, t)
    assert pred.r0 == pytest.approx(1.0 + 0.01 * np.sqrt(8.0), rel=1e-12)
    want_delta = 2.0 * np.sqrt(6.0) * 0.01 * np.sqrt(8.0) / np.sqrt(ts * t)
    np.testing.assert_allclose(pred.delta, want_delta, rtol=1e-12)
    # angular rate: rotation at (1 - eps c A lam) plus the log correction
    a_lam = ts / 0.01  # A * lam
    want_theta = (1.0 - 0.01 * a_lam) * t + 9.0 * np.log(ts * t)
    np.testing.assert_allclose(pred.theta_c, want_theta, rtol=1e-12)


def test_predicted_spiral_sqrt_law():
    tr = tf.canonical_transform(PHYS)
    ts = tr.time_scale
    t = np.array([100.0, 400.0]) / ts
    pred = tf.predicted_spiral(PHYS, 1.0, 0.0, t)
    assert pred.delta[1] == pytest.approx(pred.delta[0] / 2.0, rel=1e-12)


def test_predicted_spiral_rejects_early_window():
    tr = tf.canonical_transform(PHYS)
    with pytest.raises(ValueError):
        tf.predicted_spiral(PHYS, 1.0, 0.0, np.array([1.0 / tr.time_scale]))


def test_spiral_fit_series_and_csv(tmp_path):
    """Snapshots of a family member pull back to near-circles whose offset
    matches the first-harmonic amplitude."""
    tr = tf.canonical_transform(PHYS)
    rho = 0.05
    ts = tr.time_scale
    snaps = []
    for t_bar in (20.0, 40.0):
        h_bar = tf.SpectralField.from_modes(16, {0: 1.0, 1: rho})
        snaps.append((t_bar, h_bar))
    fit = spiral_fit_series(snaps, tr, PHYS)
    np.testing.assert_allclose(fit["t"], np.array([20.0, 40.0]) / ts,
                               rtol=1e-12)
    np.testing.assert_allclose(fit["delta_fit"],
                               2.0 * PHYS.eps * tr.lam * rho, rtol=1e-3)
    np.testing.assert_allclose(fit["r_fit"], 1.0 + PHYS.eps * tr.lam,
                               rtol=1e-4)
    assert np.all(fit["rms"] < 1e-4)

    pred = tf.predicted_spiral(PHYS, 1.0, 0.0, fit["t"])
    p = tmp_path / "spiral.csv"
    write_spiral_csv(p, pred, fit)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "t,delta_pred,delta_fit,theta_pred,theta_fit,r0_pred,r_fit"
    assert len(lines) == 3
