"""Generic pure-dephasing qubit-environment model and the two-preparation witness.

The joint Hamiltonian is ``sum_i eps_i |i><i| + H_E + sum_i |i><i| (x) V_i``, so
the joint propagator is block diagonal with conditional environment
propagators ``w_i(t) = exp(-i (H_E + V_i) t)``.  Everything here works on
dense environment matrices and is meant for small environments (d_E up to a
few dozen) where it serves as ground truth for the factorized NV engine.

All coherences are reported in the qubit rotating frame: the phase
``exp(-i (eps_0 - eps_1) t)`` is removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import CapacityError, ValidationError

DEFAULT_QEE_TOL = 1e-9
STATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureDephasingModel:
    h_env: np.ndarray
    v0: np.ndarray
    v1: np.ndarray
    eps0: float = 0.0
    eps1: float = 0.0
    _spectra: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        h_env = linalg.as_hermitian(self.h_env, "H_env")
        v0 = linalg.as_hermitian(self.v0, "V0")
        v1 = linalg.as_hermitian(self.v1, "V1")
        if not (h_env.shape == v0.shape == v1.shape):
            raise ValidationError("H_env, V0 and V1 must share one dimension")
        object.__setattr__(self, "h_env", h_env)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "v1", v1)

    @property
    def dim(self) -> int:
        return self.h_env.shape[0]

    @property
    def h0(self) -> np.ndarray:
        return self.h_env + self.v0

    @property
    def h1(self) -> np.ndarray:
        return self.h_env + self.v1

    def conditional_hamiltonian(self, i: int) -> np.ndarray:
        _check_branch(i)
        return self.h0 if i == 0 else self.h1

    def w(self, i: int, t: float) -> np.ndarray:
        """Conditional propagator ``w_i(t)``; spectra are cached per branch."""
        _check_branch(i)
        if t == 0:
            return np.eye(self.dim, dtype=complex)
        if i not in self._spectra:
            self._spectra[i] = linalg.eigh(self.conditional_hamiltonian(i))
        evals, evecs = self._spectra[i]
        return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


@dataclass(frozen=True)
class EntanglementReport:
    tau: float
    distance: float
    qee_detected: bool
    tolerance_used: float
    norm: str = "frobenius"

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "distance": self.distance,
            "qee_detected": self.qee_detected,
            "tolerance_used": self.tolerance_used,
            "norm": self.norm,
        }


def _check_branch(i: int) -> None:
    if i not in (0, 1):
        raise ValidationError(f"qubit branch / preparation must be 0 or 1, got {i!r}")


def _check_time(x: float, name: str) -> None:
    if not np.isfinite(x) or x < 0:
        raise ValidationError(f"{name} must be finite and >= 0, got {x!r}")


def env_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate an environment density matrix and return it as a complex array."""
    rho = linalg.as_hermitian(rho, "R0", rtol=tol)
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValidationError("R0 must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValidationError("R0 must be positive semidefinite")
    return rho


def _state_for(model: PureDephasingModel, r0) -> np.ndarray:
    rho = env_state(r0)
    if rho.shape != (model.dim, model.dim):
        raise ValidationError(f"R0 has shape {rho.shape}, model environment dimension is {model.dim}")
    return rho


def conditional_propagators(model: PureDephasingModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    return model.w(0, t), model.w(1, t)


def conditional_states(model: PureDephasingModel, r0, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Environment states after time ``tau`` with the qubit held in |0> and |1>."""
    rho = _state_for(model, r0)
    w0, w1 = conditional_propagators(model, tau)
    return w0 @ rho @ w0.conj().T, w1 @ rho @ w1.conj().T


def qee_criterion(model: PureDephasingModel, r0, tau: float, tol: float = DEFAULT_QEE_TOL,
                  norm: str = "frobenius") -> EntanglementReport:
    """Entanglement test at ``tau``: do the two conditional environment states differ?

    For a pure initial qubit superposition, qubit-environment entanglement is
    present iff ``w0 R0 w0^+ != w1 R0 w1^+``.  ``norm`` selects the distance
    ("frobenius" or "trace"); the verdict is ``distance > tol``.
    """
    _check_time(tau, "tau")
    s0, s1 = conditional_states(model, r0, tau)
    if norm == "frobenius":
        d = linalg.frobenius_distance(s0, s1)
    elif norm == "trace":
        d = linalg.trace_distance(s0, s1)
    else:
        raise ValidationError(f"unknown norm {norm!r}")
    return EntanglementReport(float(tau), d, bool(d > tol), float(tol), norm)


def protocol_coherence(model: PureDephasingModel, r0, prep: int, tau: float, t: float) -> complex:
    """Coherence ``rho_01^(prep)(tau, t)`` of the two-preparation protocol.

    The qubit sits in ``|prep>`` for ``tau``, is rotated to ``(|0>+|1>)/sqrt 2``
    and then dephases for ``t``:
    ``1/2 Tr(w0(t) w_prep(tau) R0 w_prep^+(tau) w1^+(t))``.
    """
    _check_branch(prep)
    _check_time(tau, "tau")
    _check_time(t, "t")
    rho = _state_for(model, r0)
    wp = model.w(prep, tau)
    r_tau = wp @ rho @ wp.conj().T
    if t == 0:
        return complex(0.5 * np.trace(r_tau).real)
    return complex(0.5 * np.trace(model.w(0, t) @ r_tau @ model.w(1, t).conj().T))


def echo_coherence(model: PureDephasingModel, r0, tau: float) -> complex:
    """Spin-echo coherence ``1/2 Tr(w1 w0 R0 w1^+ w0^+)`` with all propagators at ``tau``.

    Its magnitude stays at 1/2 for every ``tau`` iff ``[H0, H1] = 0``.
    """
    _check_time(tau, "tau")
    rho = _state_for(model, r0)
    w0, w1 = conditional_propagators(model, tau)
    return complex(0.5 * np.trace(w1 @ w0 @ rho @ w1.conj().T @ w0.conj().T))


def commutator_norm(model: PureDephasingModel) -> float:
    return float(np.linalg.norm(linalg.commutator(model.h0, model.h1)))


_PREP_ROTATIONS = {
    # unitaries G with G|prep> = (|0>+|1>)/sqrt 2
    0: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    1: np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2),
}


def joint_hamiltonian(model: PureDephasingModel) -> np.ndarray:
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    eye_e = np.eye(model.dim, dtype=complex)
    return (model.eps0 * np.kron(p0, eye_e) + model.eps1 * np.kron(p1, eye_e)
            + np.kron(linalg.ID2, model.h_env)
            + np.kron(p0, model.v0) + np.kron(p1, model.v1))


def joint_oracle(model: PureDephasingModel, r0, prep: int, tau: float, t: float,
                 cap: int = linalg.DEFAULT_DIM_CAP) -> complex:
    """Protocol coherence from explicit qubit (x) environment evolution.

    Builds the full joint Hamiltonian, evolves ``|prep><prep| (x) R0`` for
    ``tau``, applies the superposition-creating rotation on the qubit, evolves
    for ``t``, traces out the environment and reads the (0, 1) element.
    Shares no code path with :func:`protocol_coherence` beyond the model.
    """
    _check_branch(prep)
    _check_time(tau, "tau")
    _check_time(t, "t")
    rho_e = _state_for(model, r0)
    d = model.dim
    if 2 * d > cap:
        raise CapacityError(f"joint dimension {2 * d} exceeds cap {cap}")
    h = joint_hamiltonian(model)
    qubit = np.zeros((2, 2), dtype=complex)
    qubit[prep, prep] = 1.0
    state = np.kron(qubit, rho_e)

    u_tau = linalg.propagator(h, tau)
    state = u_tau @ state @ u_tau.conj().T
    g = np.kron(_PREP_ROTATIONS[prep], np.eye(d))
    state = g @ state @ g.conj().T
    u_t = linalg.propagator(h, t)
    state = u_t @ state @ u_t.conj().T

    reduced = np.einsum("iaja->ij", state.reshape(2, d, 2, d))
    # rotating frame
    return complex(reduced[0, 1] * np.exp(1j * (model.eps0 - model.eps1) * t))


# -- model builders for spin-1/2 environments ------------------------------

def spin_bath_model(larmor, couplings, eps0: float = 0.0, eps1: float = 0.0,
                    cap: int = linalg.DEFAULT_DIM_CAP) -> PureDephasingModel:
    """Dense NV-type model: ``H_E = sum_k w_k I^z_k``, ``V0 = 0``,
    ``V1 = sum_k A_k . I_k`` for non-interacting spin-1/2 nuclei.

    ``larmor`` is a scalar or one value per spin; ``couplings`` has shape (N, 3)
    holding (A_x, A_y, A_z) per spin.
    """
    a = np.atleast_2d(np.asarray(couplings, dtype=float))
    n = a.shape[0]
    w = np.broadcast_to(np.asarray(larmor, dtype=float), (n,))
    d = 2 ** n
    if d > cap:
        raise CapacityError(f"environment dimension {d} exceeds cap {cap}")
    h_env = np.zeros((d, d), dtype=complex)
    v1 = np.zeros((d, d), dtype=complex)
    for k in range(n):
        ix, iy, iz = (linalg.embed(s, k, n, cap=cap) for s in (linalg.SX, linalg.SY, linalg.SZ))
        h_env += w[k] * iz
        v1 += a[k, 0] * ix + a[k, 1] * iy + a[k, 2] * iz
    return PureDephasingModel(h_env, np.zeros((d, d)), v1, eps0, eps1)


def polarized_product_state(polarizations) -> np.ndarray:
    """``(x)_k (1 + p_k sigma_z) / 2``."""
    return linalg.kron_all(
        [0.5 * (linalg.ID2 + 2.0 * p * linalg.SZ) for p in np.atleast_1d(polarizations)])
