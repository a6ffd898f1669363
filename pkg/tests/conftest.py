"""Shared fixtures: the long reference run and the acceptance report.

The amplitude-law run (c=1, h0 = 1 + 0.05 cos, N=64, horizon 2e4) takes
a couple of minutes, so it is computed once per session and shared by
every acceptance criterion that needs it.  Each acceptance test records
a PASS/FAIL line that is echoed in the terminal summary.
"""

import numpy as np
import pytest

import thinfilm as tf

ACCEPTANCE_LINES: list[str] = []


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="session")
def a5_run():
    """Canonical c=1, h0 = 1 + 0.05 cos theta, N=64, horizon 2e4."""
    h0 = tf.SpectralField.harmonic(64, mean=1.0, cos={1: 0.05})
    model = tf.ModelSpec.canonical(1.0)
    trace = tf.simulate(model, h0, 2.0e4, 400, snapshot_every=5)
    assert not trace.halted
    fit = tf.fit_asymptotics(trace.t, trace.rho, trace.phase)
    return {"trace": trace, "fit": fit, "model": model, "rho0": 0.025}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
