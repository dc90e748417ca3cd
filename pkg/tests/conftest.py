import sys

import numpy as np
import pytest


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def random_reciprocal_z(n, rng, scale=50.0):
    """Random symmetric impedance matrix with a positive-definite resistive part."""
    a = rng.standard_normal((n, n))
    r = a @ a.T + n * np.eye(n)
    x = rng.standard_normal((n, n))
    return scale * (r + 1j * (x + x.T)) / n


def random_passive_s(n, rng, eta=0.8):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    p, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return eta * q @ np.diag(rng.random(n)) @ p


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
