"""Time integration: conservation, linear decay rates, halting, diagnostics."""

import numpy as np
import pytest

import thinfilm as tf
from thinfilm.evolution import SimulationState, min_height, step


# ---- min_height -------------------------------------------------------------


def test_min_height_constant():
    assert min_height(tf.SpectralField.constant(2.0, 8)) == pytest.approx(2.0)


def test_min_height_touches_zero():
    h = tf.SpectralField.harmonic(8, mean=1.0, sin={1: 1.0})
    assert min_height(h) == pytest.approx(0.0, abs=1e-6)


def test_min_height_third_harmonic():
    h = tf.SpectralField.harmonic(16, mean=1.0, cos={3: 0.3})
    assert min_height(h) == pytest.approx(0.7, abs=1e-10)


def test_min_height_off_grid_minimum():
    # minimum at an irrational angle: the Newton polish must find it
    h = tf.SpectralField.harmonic(16, mean=1.0, cos={1: 0.2}, sin={1: 0.3})
    amp = np.hypot(0.2, 0.3)
    assert min_height(h) == pytest.approx(1.0 - amp, abs=1e-12)


# ---- basic integration properties -------------------------------------------


def test_constant_state_is_fixed_point():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.constant(1.0, 16)
    trace = tf.simulate(model, h0, 1.0, 10)
    assert not trace.halted
    assert np.max(np.abs(trace.h4_norm)) <= 1e-12


def test_second_harmonic_decay_rate():
    """Linear theory: a cos(2 theta) perturbation of h = 1 decays at
    rate c^3 (n^4 - n^2) = 12 (plus O(amplitude) corrections)."""
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(32, mean=1.0, cos={2: 1e-4})
    t_end = 0.5
    trace = tf.simulate(model, h0, t_end, 50)
    a2_0 = 0.5e-4
    a2_end = abs(trace.snapshots[0][1].coeff(2)) if trace.snapshots else None
    # measure on the stored H4 norm, dominated by the n=2 pair
    rate = -np.log(trace.h4_norm[-1] / trace.h4_norm[0]) / t_end
    assert rate == pytest.approx(12.0, rel=0.01)


def test_neutral_mode_amplitude_persists():
    # cos(theta) is neutral at linear order: over a short time the
    # amplitude must not drift beyond the cubic prediction
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(32, mean=1.0, cos={1: 1e-3})
    trace = tf.simulate(model, h0, 1.0, 20)
    assert abs(trace.rho[-1] / trace.rho[0] - 1.0) <= 1e-3


def test_mass_is_conserved_exactly():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(32, mean=1.0, cos={1: 0.2}, sin={3: 0.1})
    trace = tf.simulate(model, h0, 2.0, 40)
    np.testing.assert_array_equal(trace.mass, trace.mass[0])
    assert trace.mass[0] == pytest.approx(2.0 * np.pi)


def test_simulate_validates_inputs():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(8, mean=1.0, cos={1: 0.1})
    with pytest.raises(ValueError):
        tf.simulate(model, h0, -1.0)
    with pytest.raises(ValueError):
        tf.simulate(model, h0.shift_mean(0.5), 1.0)  # mean != c
    with pytest.raises(ValueError):
        tf.simulate(model, tf.SpectralField.harmonic(8, mean=1.0, cos={1: 2.0}),
                    1.0)  # not positive
    with pytest.raises(ValueError):
        tf.simulate(model, h0, 1.0, np.array([0.5, 1.0]))  # must start at 0


def test_custom_sample_times():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(16, mean=1.0, cos={1: 0.05})
    times = np.array([0.0, 0.1, 0.5, 1.0])
    trace = tf.simulate(model, h0, 1.0, times)
    np.testing.assert_allclose(trace.t, times, rtol=1e-12)


def test_positivity_halt_sets_flag():
    # a large first harmonic transiently steepens: min h dips from 0.100
    # to 0.096 before relaxing, so a floor at 0.098 halts the run early
    model = tf.ModelSpec.mixed(1.0, 1.0)
    h0 = tf.SpectralField.harmonic(8, mean=1.0, cos={1: 0.9})
    trace = tf.simulate(model, h0, 5.0, 50, positivity_floor=0.098)
    assert trace.halted
    assert trace.t[-1] < 5.0
    assert trace.min_h[-1] <= 0.098


def test_step_wrapper_and_positivity_exception():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(16, mean=1.0, cos={1: 0.05})
    st = SimulationState(t=0.0, h=h0, dt=1e-4)
    st2 = step(model, st)
    assert st2.t > 0 and st2.step_count == 1
    bad = SimulationState(
        t=0.0, h=tf.SpectralField.harmonic(16, mean=1.0, cos={1: 0.999}),
        dt=1e-8)
    with pytest.raises(tf.PositivityLost):
        step(model, bad, positivity_floor=0.5)


def test_snapshots_and_comoving_phase():
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(32, mean=1.0, cos={1: 0.05})
    trace = tf.simulate(model, h0, 1.0, 20, snapshot_every=5)
    assert len(trace.snapshots) == 5  # samples 0,5,10,15,20
    assert trace.frame_speed == pytest.approx(1.0)
    # initial phase of a1 = 0.025 (real, positive) is 0; the co-rotating
    # phase drifts only at the slow cubic rate
    assert abs(trace.phase[0]) < 1e-12
    assert abs(trace.phase[-1]) < 0.01
    # the raw coefficient, by contrast, rotates at speed ~1
    raw = np.angle(trace.a1[-1] * np.exp(-1j * trace.frame_speed * trace.t[-1]))
    assert abs(raw) > 0.5


def test_integrator_accuracy_against_tight_tolerance():
    """Same run at loose and very tight tolerances must agree."""
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(24, mean=1.0, cos={1: 0.05}, sin={2: 0.02})
    loose = tf.simulate(model, h0, 2.0, 4, rtol=1e-7)
    tight = tf.simulate(model, h0, 2.0, 4, rtol=1e-12)
    diff = np.abs(loose.a1[-1] - tight.a1[-1])
    assert diff < 1e-5  # accumulated global error vs the 1e-7 local tolerance


def test_trace_csv(tmp_path):
    model = tf.ModelSpec.canonical(1.0)
    h0 = tf.SpectralField.harmonic(16, mean=1.0, cos={1: 0.05})
    trace = tf.simulate(model, h0, 0.5, 5)
    p = tmp_path / "trace.csv"
    trace.write_csv(p)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == ("t,mass,min_h,h4_norm,rho,phase_unwrapped,"
                        "slaving_defect,dist_M0")
    assert len(lines) == 7
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == 0.0
    assert first[1] == pytest.approx(2.0 * np.pi)
