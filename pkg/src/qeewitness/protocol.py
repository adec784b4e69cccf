"""Factorized evaluation of the two-preparation protocol for a non-interacting spin bath.

For a bath of independent spin-1/2 nuclei with ``V0 = 0`` every quantity
factorizes over spins.  Single-spin propagators are SU(2) elements written
as ``U = w - i (x, y, z).sigma`` and handled as quaternions, so no matrix is
ever built.  With ``M(t) = u1^+(t) u0(t) = m0 - i m.sigma`` and the nuclear
Bloch vector ``r(tau)`` after the preparation stage, the single-spin factor is
``L(tau, t) = Tr(M rho) = m0(t) - i m(t).r(tau)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dephasing import DEFAULT_QEE_TOL, EntanglementReport
from .errors import ValidationError
from .nvbath import Bath, BathSpin

CSV_HEADER = ("tau_us,t_us,re_rho0,im_rho0,re_rho1,im_rho1,"
              "re_dnorm,im_dnorm,abs_rho0,abs_rho1")


# -- quaternion helpers ------------------------------------------------------

def _qmul(a, b):
    """Product of SU(2) elements given as (w, x, y, z) tuples of arrays."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + bw * ax + ay * bz - az * by,
            aw * by + bw * ay + az * bx - ax * bz,
            aw * bz + bw * az + ax * by - ay * bx)


def _qdag(a):
    w, x, y, z = a
    return (w, -x, -y, -z)


class _SpinAxes:
    """Precomputed rotation axes of the two conditional Hamiltonians of one spin."""

    def __init__(self, larmor: float, a):
        ax, ay, az = (float(v) for v in a)
        self.omega = float(larmor)
        self.hz = self.omega + az
        self.big = float(np.sqrt(ax * ax + ay * ay + self.hz * self.hz))
        if self.big > 0:
            self.n = (ax / self.big, ay / self.big, self.hz / self.big)
        else:
            self.n = (0.0, 0.0, 1.0)
        # |n_perp|^2 computed from the transverse couplings, exact zero on axis
        self.nperp2 = (ax * ax + ay * ay) / self.big ** 2 if self.big > 0 else 0.0

    def u0(self, t):
        half = 0.5 * self.omega * np.asarray(t, dtype=float)
        s = np.sin(half)
        zero = np.zeros_like(s)
        return (np.cos(half), zero, zero, s)

    def u1(self, t):
        half = 0.5 * self.big * np.asarray(t, dtype=float)
        s = np.sin(half)
        return (np.cos(half), s * self.n[0], s * self.n[1], s * self.n[2])

    def bloch_after(self, prep: int, tau, p: float):
        """Nuclear Bloch vector after ``tau`` under branch ``prep``, starting from (0, 0, p)."""
        tau = np.asarray(tau, dtype=float)
        if prep == 0 or p == 0.0:
            zero = np.zeros_like(tau)
            return (zero, zero, zero + p)
        half = 0.5 * self.big * tau
        s, c = np.sin(half), np.cos(half)
        sin_th = 2.0 * s * c
        one_minus_cos = 2.0 * s * s
        nx, ny, nz = self.n
        return (p * (sin_th * ny + one_minus_cos * nz * nx),
                p * (-sin_th * nx + one_minus_cos * nz * ny),
                p * (1.0 - one_minus_cos * self.nperp2))


def _factor(axes: _SpinAxes, p: float, prep: int, tau, t):
    """Single-spin factor ``L^(prep)(tau, t)``; ``tau`` and ``t`` broadcast."""
    m0, mx, my, mz = _qmul(_qdag(axes.u1(t)), axes.u0(t))
    rx, ry, rz = axes.bloch_after(prep, tau, p)
    return m0 - 1j * (mx * rx + my * ry + mz * rz)


def spin_factor(spin: BathSpin, prep: int, tau, t):
    """``L_k^(prep)(tau, t) = Tr(u0(t) u_prep(tau) rho_k u_prep^+(tau) u1^+(t))``.

    ``rho_k = (1 + p_k sigma_z)/2``, ``u0`` is generated by ``omega I_z`` and
    ``u1`` by ``A_zx I_x + A_zy I_y + (omega + A_zz) I_z``.  Accepts scalars or
    broadcastable arrays for ``tau`` and ``t``.
    """
    if prep not in (0, 1):
        raise ValidationError("prep must be 0 or 1")
    out = _factor(_SpinAxes(spin.larmor, spin.A), float(spin.polarization), prep, tau, t)
    return complex(out) if np.ndim(out) == 0 else out


def delta_L_analytic(p: float, A_x: float, A_z: float, omega: float, tau, t):
    """Closed form of ``L^(0) - L^(1)`` for one spin with ``A_zy = 0``.

    ``-2i p A_x^2 sin(omega t/2) sin(W tau/2) sin(W (tau+t)/2) / W^2`` with
    ``W = sqrt(A_x^2 + (A_z + omega)^2)``, for ``rho = (1 + p sigma_z)/2``.
    """
    big = np.hypot(A_x, A_z + omega)
    if big == 0:
        raise ValidationError("degenerate spin: sqrt(A_x^2 + (A_z + omega)^2) = 0")
    tau = np.asarray(tau, dtype=float)
    t = np.asarray(t, dtype=float)
    out = (-2j * p * A_x ** 2 * np.sin(0.5 * omega * t) * np.sin(0.5 * big * tau)
           * np.sin(0.5 * big * (tau + t)) / big ** 2)
    return complex(out) if np.ndim(out) == 0 else out


def echo_factor(spin: BathSpin, tau):
    """Single-spin ``Tr(u1 u0 rho u1^+ u0^+)`` at equal times ``tau``."""
    axes = _SpinAxes(spin.larmor, spin.A)
    u0, u1 = axes.u0(tau), axes.u1(tau)
    m0, _, _, mz = _qmul(_qdag(_qmul(u0, u1)), _qmul(u1, u0))
    out = m0 - 1j * mz * float(spin.polarization)
    return complex(out) if np.ndim(out) == 0 else out


# -- bath level ------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    """Inclusive ``(min, max, steps)`` grids in us; ``diagonal`` selects the t = tau slice."""

    tau_min: float = 0.0
    tau_max: float = 40.0
    tau_steps: int = 200
    t_min: float = 0.0
    t_max: float = 40.0
    t_steps: int = 200
    diagonal: bool = False

    def __post_init__(self):
        if self.tau_steps < 1 or self.t_steps < 1:
            raise ValidationError("grids need at least one step")
        if self.tau_min < 0 or self.t_min < 0:
            raise ValidationError("times must be >= 0")
        if self.tau_max < self.tau_min or self.t_max < self.t_min:
            raise ValidationError("grid max must be >= min")

    @property
    def taus(self) -> np.ndarray:
        return np.linspace(self.tau_min, self.tau_max, self.tau_steps)

    @property
    def ts(self) -> np.ndarray:
        return self.taus if self.diagonal else np.linspace(self.t_min, self.t_max, self.t_steps)


@dataclass(eq=False)
class ProtocolTrace:
    tau_grid: np.ndarray
    t_grid: np.ndarray
    rho0: np.ndarray
    rho1: np.ndarray
    delta_norm: np.ndarray
    diagonal: bool = False
    metadata: dict = field(default_factory=dict)

    def points(self):
        """``(tau, t)`` arrays aligned with the flattened (row-major) data."""
        if self.diagonal:
            return self.tau_grid, self.t_grid
        tau, t = np.meshgrid(self.tau_grid, self.t_grid, indexing="ij")
        return tau.ravel(), t.ravel()

    def to_csv(self) -> str:
        tau, t = self.points()
        r0, r1, dn = self.rho0.ravel(), self.rho1.ravel(), self.delta_norm.ravel()
        cols = [tau, t, r0.real, r0.imag, r1.real, r1.imag, dn.real, dn.imag, np.abs(r0), np.abs(r1)]
        lines = [CSV_HEADER]
        for row in zip(*cols):
            lines.append(",".join(format(float(v), ".17g") for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _bath_product(bath: Bath, prep: int, tau, t):
    shape = np.broadcast_shapes(np.shape(tau), np.shape(t))
    acc = np.ones(shape, dtype=complex)
    for k in range(len(bath)):
        axes = _SpinAxes(bath.larmor, bath.couplings[k])
        acc *= _factor(axes, float(bath.polarization[k]), prep, tau, t)
    return acc


def bath_coherence(bath: Bath, prep: int, tau, t):
    """``1/2 prod_k L_k^(prep)(tau, t)``, multiplied in ascending spin index."""
    if prep not in (0, 1):
        raise ValidationError("prep must be 0 or 1")
    return 0.5 * _bath_product(bath, prep, np.asarray(tau, float), np.asarray(t, float))


def _chunks(n: int, workers: int):
    edges = np.linspace(0, n, max(1, min(workers, n)) + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def protocol_trace(bath: Bath, grid: TimeGrid, workers: int = 1) -> ProtocolTrace:
    """Both protocol coherences and ``2 (rho0 - rho1)`` over ``grid``.

    Work is split over tau rows (or diagonal points) across ``workers``
    threads.  Each grid point is reduced over spins in the same order
    regardless of the split, so the output does not depend on ``workers``.
    """
    if len(bath) == 0:
        raise ValidationError("bath is empty")
    taus, ts = grid.taus, grid.ts
    if grid.diagonal:
        shape = (len(taus),)
    else:
        shape = (len(taus), len(ts))
    rho0 = np.empty(shape, dtype=complex)
    rho1 = np.empty(shape, dtype=complex)

    def run(sl):
        if grid.diagonal:
            tau, t = taus[sl], ts[sl]
        else:
            tau, t = taus[sl, None], ts[None, :]
        rho0[sl] = bath_coherence(bath, 0, tau, t)
        rho1[sl] = bath_coherence(bath, 1, tau, t)

    chunks = _chunks(len(taus), workers)
    if len(chunks) == 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(run, chunks))
    meta = {"n_spins": len(bath), "larmor": bath.larmor, **bath.meta}
    return ProtocolTrace(taus, ts, rho0, rho1, 2.0 * (rho0 - rho1), grid.diagonal, meta)


def echo_trace(bath: Bath, taus) -> np.ndarray:
    """Echo coherence ``1/2 prod_k Tr(u1 u0 rho_k u1^+ u0^+)`` for each ``tau``."""
    taus = np.asarray(taus, dtype=float)
    if len(bath) == 0 or taus.size == 0:
        raise ValidationError("echo_trace needs a non-empty bath and tau grid")
    acc = np.ones(taus.shape, dtype=complex)
    for spin in bath:
        acc *= echo_factor(spin, taus)
    return 0.5 * acc


def bath_qee_criterion(bath: Bath, tau: float, tol: float = DEFAULT_QEE_TOL) -> EntanglementReport:
    """Entanglement criterion for a product-state spin bath, evaluated per spin.

    Returns the *relative* Frobenius distance ``||s0 - s1|| / ||s0||`` between
    the two conditional bath states at ``tau``.  The absolute distance of
    mixed states on 2^N dimensions is exponentially small in N, which makes a
    fixed threshold meaningless; the ratio is dimension-free.  Per spin,
    ``1 - Tr(s0 s1)/Tr(s0^2) = 2 p^2 sin^2(W tau/2) n_perp^2 / (1 + p^2)``.
    """
    if tau < 0:
        raise ValidationError("tau must be >= 0")
    log_overlap = 0.0
    for k in range(len(bath)):
        p = float(bath.polarization[k])
        if p == 0.0:
            continue
        axes = _SpinAxes(bath.larmor, bath.couplings[k])
        deficit = 2.0 * p * p * np.sin(0.5 * axes.big * tau) ** 2 * axes.nperp2 / (1.0 + p * p)
        with np.errstate(divide="ignore"):
            log_overlap += np.log1p(-deficit)
    d = abs(float(np.sqrt(-2.0 * np.expm1(log_overlap))))
    return EntanglementReport(float(tau), d, bool(d > tol), float(tol), "relative-frobenius")
