import numpy as np
import pytest
from scipy.linalg import expm

from qeewitness.linalg import SX, SY, SZ

OMEGA = 1.346


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def su2(h, t):
    """exp(-i t h.I) from the axis-angle formula, no eigendecomposition."""
    h = np.asarray(h, dtype=float)
    mag = np.linalg.norm(h)
    if mag == 0:
        return np.eye(2, dtype=complex)
    n = h / mag
    ns = n[0] * 2 * SX + n[1] * 2 * SY + n[2] * 2 * SZ
    return np.cos(mag * t / 2) * np.eye(2) - 1j * np.sin(mag * t / 2) * ns


def expm_prop(h, t):
    return expm(-1j * np.asarray(h) * t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance(request):
    """Record a one-line verdict that is echoed in the terminal summary."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(number, ok, text):
        lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
