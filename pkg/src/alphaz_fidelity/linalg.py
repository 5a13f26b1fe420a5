"""Dense Hermitian linear algebra: spectral decomposition, fractional powers, exponentials."""

from typing import Callable, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from .config import HERMITIAN_TOL, PSD_CLAMP, UNITARY_TOL
from .errors import NotPSDError, ParameterError, ValidationError

_PHASE_FLOOR = 1e-12
_TIE_DECIMALS = 9


class EigenSystem(BaseModel):
    """Descending eigenvalues with orthonormal eigenvector columns."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a: object, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex 2-D array or raise ValidationError."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(a))))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * _scale(a))


def is_skew_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a + a.conj().T)) <= tol * _scale(a))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    d = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(d))) <= tol)


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of AB - BA."""
    return float(np.linalg.norm(a @ b - b @ a))


def _phase_normalize(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nonzero = np.flatnonzero(np.abs(col) > _PHASE_FLOOR)
        if nonzero.size:
            lead = col[nonzero[0]]
            out[:, j] = col * (np.conj(lead) / abs(lead))
    return out


def _column_key(col: np.ndarray) -> Tuple[float, ...]:
    parts = np.empty(2 * col.shape[0])
    parts[0::2] = np.round(col.real, _TIE_DECIMALS)
    parts[1::2] = np.round(col.imag, _TIE_DECIMALS)
    return tuple(parts.tolist())


def eig_hermitian(h: object) -> EigenSystem:
    """Eigendecomposition with descending eigenvalues and reproducible eigenvectors.

    Each eigenvector is rotated so its first non-negligible component is real and
    positive; eigenvectors sharing an eigenvalue are ordered by their components,
    largest first.

    Raises:
        ValidationError: if the input is not Hermitian within tolerance.
    """
    a = as_matrix(h)
    if not is_hermitian(a):
        raise ValidationError("matrix is not Hermitian within tolerance")
    w, v = scipy.linalg.eigh(hermitize(a))
    w = w[::-1].copy()
    v = _phase_normalize(v[:, ::-1])

    tie_tol = 1e-10 * max(1.0, float(np.max(np.abs(w))))
    order = []
    i = 0
    d = w.shape[0]
    while i < d:
        j = i + 1
        while j < d and abs(w[j] - w[i]) <= tie_tol:
            j += 1
        group = list(range(i, j))
        if len(group) > 1:
            group.sort(key=lambda k: _column_key(v[:, k]), reverse=True)
        order.extend(group)
        i = j
    return EigenSystem(eigenvalues=w, eigenvectors=v[:, order])


def _clamped_spectrum(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = as_matrix(a)
    if not is_hermitian(a):
        raise ValidationError("matrix is not Hermitian within tolerance")
    w, v = scipy.linalg.eigh(hermitize(a))
    if w.size and w[0] < -PSD_CLAMP:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} below -{PSD_CLAMP:g}")
    w = np.where(w <= PSD_CLAMP, 0.0, w)
    return w, v


def spectral_map(
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    fn: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """V diag(fn(w)) V* for a precomputed Hermitian eigensystem."""
    mapped = fn(eigenvalues)
    return hermitize((eigenvectors * mapped) @ eigenvectors.conj().T)


def support_power(eigenvalues: np.ndarray, p: float) -> np.ndarray:
    """lambda^p on the support, 0 on the kernel, for any real p."""
    w = np.asarray(eigenvalues, dtype=float)
    out = np.zeros_like(w)
    mask = w > PSD_CLAMP
    out[mask] = w[mask] ** p
    return out


def frac_power(a: object, p: float) -> np.ndarray:
    """Fractional power of a PSD matrix with the kernel convention 0^p = 0.

    Raises:
        NotPSDError: if an eigenvalue lies below -1e-10.
    """
    w, v = _clamped_spectrum(a)
    return spectral_map(w, v, lambda x: support_power(x, p))


def trace_power(a: object, z: float) -> float:
    """Sum of lambda_i^z over the spectrum of a PSD matrix.

    Raises:
        ParameterError: if z is not positive.
        NotPSDError: if an eigenvalue lies below -1e-10.
    """
    if not z > 0:
        raise ParameterError(f"trace_power needs z > 0, got {z}")
    w, _ = _clamped_spectrum(a)
    return float(np.sum(support_power(w, z)))


def exp_skew(l: object) -> np.ndarray:
    """exp(L) for skew-Hermitian L through the eigendecomposition of iL."""
    a = as_matrix(l, "generator")
    if not is_skew_hermitian(a):
        raise ValidationError("generator is not skew-Hermitian within tolerance")
    h = hermitize(1j * a)
    w, v = scipy.linalg.eigh(h)
    return (v * np.exp(-1j * w)) @ v.conj().T


def unitary_log(u: object) -> np.ndarray:
    """Principal logarithm of a unitary; eigenphases lie in (-pi, pi].

    An eigenvalue at -1 is assigned phase +pi.
    """
    a = as_matrix(u, "unitary")
    if not is_unitary(a, tol=1e-9):
        raise ValidationError("matrix is not unitary within tolerance")
    t, z = scipy.linalg.schur(a, output="complex")
    phases = np.angle(np.diag(t))
    phases = np.where(phases <= -np.pi + 1e-12, np.pi, phases)
    log = (z * (1j * phases)) @ z.conj().T
    return (log - log.conj().T) / 2


def expm_hermitian(h: object) -> np.ndarray:
    """exp(H) for Hermitian H."""
    a = as_matrix(h)
    if not is_hermitian(a):
        raise ValidationError("matrix is not Hermitian within tolerance")
    w, v = scipy.linalg.eigh(hermitize(a))
    return spectral_map(w, v, np.exp)
