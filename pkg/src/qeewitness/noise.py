"""Qubit dephasing by an external classical field that does not depend on the qubit.

Such a field ``dxi(t)`` only contributes the random phase
``exp(-i int_0^t dxi(t') dt')``; the pre-superposition stage leaves a
pointer-state qubit untouched, so coherence cannot depend on which state was
prepared or for how long.  The common-mode field and the mean level energy
drop out and are not simulated.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ValidationError
from .protocol import CSV_HEADER

KINDS = ("ornstein-uhlenbeck", "random-telegraph")
BLOCK = 1024  # trajectories per independently seeded block


@dataclass(frozen=True)
class NoiseProcess:
    """Stationary noise with std ``sigma`` (rad/us), correlation time ``corr_time`` (us)
    and offset ``mean``.  Both kinds have autocorrelation ``sigma^2 exp(-|s|/corr_time)``."""

    kind: str = "ornstein-uhlenbeck"
    sigma: float = 1.0
    corr_time: float = 1.0
    mean: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.sigma >= 0:
            raise ValidationError("sigma must be >= 0")
        if not self.corr_time > 0:
            raise ValidationError("corr_time must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class NoiseTrajectory:
    dt: float
    samples: np.ndarray


@dataclass(frozen=True, eq=False)
class NoiseEnsemble:
    """Trajectories stored row-wise; indexing yields :class:`NoiseTrajectory`."""

    dt: float
    samples: np.ndarray  # (count, n_steps)

    def __len__(self):
        return self.samples.shape[0]

    def __getitem__(self, k) -> NoiseTrajectory:
        return NoiseTrajectory(self.dt, self.samples[k])

    @property
    def duration(self) -> float:
        return self.dt * (self.samples.shape[1] - 1)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.shape[1])


def _block(proc: NoiseProcess, rng: np.random.Generator, count: int, n: int, dt: float) -> np.ndarray:
    x = np.empty((count, n))
    decay = np.exp(-dt / proc.corr_time)
    if proc.kind == "ornstein-uhlenbeck":
        x[:, 0] = rng.standard_normal(count)
        kick = np.sqrt(-np.expm1(-2.0 * dt / proc.corr_time))
        noise = rng.standard_normal((count, n - 1))
        for i in range(1, n):
            x[:, i] = decay * x[:, i - 1] + kick * noise[:, i - 1]
    else:
        # symmetric telegraph: flip probability per step keeps <x(0)x(s)> = exp(-s/tc)
        x[:, 0] = np.where(rng.random(count) < 0.5, -1.0, 1.0)
        flips = rng.random((count, n - 1)) < 0.5 * (1.0 - decay)
        sign = np.where(flips, -1.0, 1.0)
        x[:, 1:] = x[:, :1] * np.cumprod(sign, axis=1)
    return proc.mean + proc.sigma * x


def sample_trajectories(proc: NoiseProcess, dt: float, T: float, count: int) -> NoiseEnsemble:
    """``count`` stationary trajectories on ``[0, T]`` from exact one-step updates.

    Trajectories are generated in blocks of ``BLOCK`` with child seeds spawned
    from ``proc.seed``, so each trajectory depends only on the seed and its index.
    """
    if not dt > 0 or not T >= dt or count < 1:
        raise ValidationError("need dt > 0, T >= dt and count >= 1")
    if dt > proc.corr_time / 20:
        warnings.warn(f"dt={dt:g} exceeds corr_time/20; phase integrals will be biased",
                      stacklevel=2)
    n = int(np.floor(T / dt + 1e-9)) + 1
    n_blocks = -(-count // BLOCK)
    children = np.random.SeedSequence(int(proc.seed)).spawn(n_blocks)
    blocks = []
    for child in children:
        blocks.append(_block(proc, np.random.default_rng(child), BLOCK, n, dt))
    return NoiseEnsemble(float(dt), np.vstack(blocks)[:count])


def noise_coherence(trajs: NoiseEnsemble, prep: int = 0, tau: float = 0.0,
                    t_max: float | None = None) -> np.ndarray:
    """``1/2 < exp(-i int_0^t dxi) >`` on the trajectory time grid up to ``t_max``.

    ``prep`` and ``tau`` are validated and otherwise unused: with a qubit-
    independent field the result cannot depend on them.  The phase integral
    uses the trapezoidal rule and starts at the superposition-creation instant.
    """
    if prep not in (0, 1):
        raise ValidationError("prep must be 0 or 1")
    if not tau >= 0:
        raise ValidationError("tau must be >= 0")
    n = trajs.samples.shape[1]
    if t_max is not None:
        if t_max > trajs.duration * (1 + 1e-12):
            raise ValidationError(f"t_max={t_max} beyond trajectory horizon {trajs.duration}")
        n = int(np.floor(t_max / trajs.dt + 1e-9)) + 1
    phase = cumulative_trapezoid(trajs.samples[:, :n], dx=trajs.dt, axis=1, initial=0.0)
    return 0.5 * np.mean(np.exp(-1j * phase), axis=0)


def noise_trace_csv(trajs: NoiseEnsemble, tau: float = 0.0, t_max: float | None = None) -> str:
    """Coherence for both preparations in the protocol CSV layout."""
    rho0 = noise_coherence(trajs, 0, tau, t_max)
    rho1 = noise_coherence(trajs, 1, tau, t_max)
    t = trajs.times[: len(rho0)]
    dn = 2.0 * (rho0 - rho1)
    cols = [np.full_like(t, tau), t, rho0.real, rho0.imag, rho1.real, rho1.imag,
            dn.real, dn.imag, np.abs(rho0), np.abs(rho1)]
    lines = [CSV_HEADER]
    for row in zip(*cols):
        lines.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"
