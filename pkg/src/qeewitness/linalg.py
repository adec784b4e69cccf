"""Dense complex linear algebra used by the dephasing and bath modules.

Operators are plain ``numpy`` arrays.  Hamiltonians are in rad/us with
hbar = 1 and times are in us, so propagators are ``exp(-1j * H * t)``.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, NumericalError, ValidationError

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10
DEFAULT_DIM_CAP = 4096

# spin-1/2 operators I_j = sigma_j / 2
SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite, square complex array or raise ValidationError."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = max(np.linalg.norm(a), 1.0)
    return bool(np.linalg.norm(a - a.conj().T) <= rtol * scale)


def as_hermitian(a, name: str = "operator", rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    m = as_matrix(a, name)
    if not is_hermitian(m, rtol):
        raise ValidationError(f"{name} is not Hermitian within relative tolerance {rtol:g}")
    return m


def eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc


def propagator(h, t: float) -> np.ndarray:
    """Unitary ``exp(-i H t)`` from the spectral decomposition of ``H``.

    Negative ``t`` gives the inverse propagator.
    """
    h = as_hermitian(h, "generator")
    if not np.isfinite(t):
        raise ValidationError("time must be finite")
    evals, evecs = eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    return bool(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) <= atol)


def kron(a, b, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    dim = a.shape[0] * b.shape[0]
    if dim > cap:
        raise CapacityError(f"Kronecker product dimension {dim} exceeds cap {cap}")
    return np.kron(a, b)


def kron_all(mats, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = kron(out, m, cap)
    return out


def embed(op, site: int, n_sites: int, local_dim: int = 2, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Place a single-site operator at ``site`` of an ``n_sites`` tensor product."""
    eye = np.eye(local_dim, dtype=complex)
    return kron_all([op if k == site else eye for k in range(n_sites)], cap)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")


def frobenius_distance(a, b) -> float:
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _check_same_shape(a, b)
    return float(np.linalg.norm(a - b))


def trace_distance(a, b) -> float:
    """Trace norm ``||A - B||_1`` of the difference of two Hermitian matrices."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _check_same_shape(a, b)
    d = a - b
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
