"""Self-checks that compare fast paths against independent oracles.

Each check returns a :class:`CheckResult`; :func:`run_all` runs the default
suite.  ``fault`` deliberately corrupts one side of a check so the suite
itself can be shown to catch errors.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import dephasing as dm
from .nvbath import Bath, BathSpin
from .protocol import bath_coherence, delta_L_analytic, echo_trace, spin_factor

FAULTS = ("eq14-sign",)
OMEGA = 1.346


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.max_error = float(self.max_error)

    def as_dict(self):
        return asdict(self)


def check_single_spin_closed_form(seed: int = 0, draws: int = 1000, tol: float = 1e-10,
                                  fault: str | None = None) -> CheckResult:
    """Numeric ``L0 - L1`` against the closed-form single-spin difference."""
    rng = np.random.default_rng(seed)
    amax = 2 * np.pi * 0.5
    p = rng.uniform(-1, 1, draws)
    ax, az = rng.uniform(-amax, amax, (2, draws))
    tau, t = rng.uniform(0, 40, (2, draws))
    err = 0.0
    for k in range(draws):
        spin = BathSpin((0.0, 0.0, 1.0), (ax[k], 0.0, az[k]), OMEGA, p[k])
        numeric = spin_factor(spin, 0, tau[k], t[k]) - spin_factor(spin, 1, tau[k], t[k])
        closed = delta_L_analytic(p[k], ax[k], az[k], OMEGA, tau[k], t[k])
        if fault == "eq14-sign":
            closed = -closed
        err = max(err, abs(numeric - closed))
    return CheckResult("single-spin-closed-form", err < tol, err, tol)


def _random_bath(rng, n):
    a = rng.uniform(-2.0, 2.0, (n, 3))
    p = rng.uniform(-1.0, 1.0, n)
    return Bath(rng.normal(size=(n, 3)), a, p, OMEGA)


def check_factorization(seed: int = 1, baths: int = 20, max_spins: int = 4, points: int = 5,
                        tol: float = 1e-10) -> CheckResult:
    """Product formula against full qubit (x) bath evolution."""
    rng = np.random.default_rng(seed)
    err = 0.0
    for _ in range(baths):
        n = int(rng.integers(1, max_spins + 1))
        bath = _random_bath(rng, n)
        model = dm.spin_bath_model(bath.larmor, bath.couplings)
        r0 = dm.polarized_product_state(bath.polarization)
        for tau, t in rng.uniform(0, 10, (points, 2)):
            for prep in (0, 1):
                fast = bath_coherence(bath, prep, tau, t)
                ref = dm.joint_oracle(model, r0, prep, tau, t)
                err = max(err, abs(fast - ref))
    return CheckResult("factorization-vs-joint", err < tol, err, tol)


def check_witness_consistency(seed: int = 2, models: int = 30, tol: float = 1e-10) -> CheckResult:
    """Differing protocol coherences must coincide with a non-zero criterion distance."""
    rng = np.random.default_rng(seed)
    bad = 0
    worst = 0.0
    for _ in range(models):
        n = int(rng.integers(1, 4))
        bath = _random_bath(rng, n)
        model = dm.spin_bath_model(bath.larmor, bath.couplings)
        r0 = dm.polarized_product_state(bath.polarization)
        tau = float(rng.uniform(0, 10))
        ts = np.linspace(0, 10, 11)
        diff = max(abs(dm.protocol_coherence(model, r0, 0, tau, t)
                       - dm.protocol_coherence(model, r0, 1, tau, t)) for t in ts)
        rep = dm.qee_criterion(model, r0, tau)
        if diff > 1e-8 and rep.distance <= tol:
            bad += 1
            worst = max(worst, diff)
    return CheckResult("witness-criterion", bad == 0, worst, tol, f"{bad} violations")


def check_echo_commuting(seed: int = 3, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = 6
    a = np.zeros((n, 3))
    a[:, 2] = rng.uniform(-2, 2, n)
    bath = Bath(rng.normal(size=(n, 3)), a, rng.uniform(-1, 1, n), OMEGA)
    taus = np.linspace(0, 40, 201)
    err = float(np.max(np.abs(np.abs(echo_trace(bath, taus)) - 0.5)))
    return CheckResult("echo-commuting", err < tol, err, tol)


def run_all(fault: str | None = None) -> list[CheckResult]:
    return [
        check_single_spin_closed_form(fault=fault),
        check_factorization(),
        check_witness_consistency(),
        check_echo_commuting(),
    ]
