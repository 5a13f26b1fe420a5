"""The alpha-z-fidelity, its classical reduction, Renyi entropies and the region classifier."""

import math
import numbers
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from .config import (
    COMMUTE_TOL,
    FORM_CHECK_TOL,
    PSD_CLAMP,
    RANK_FLOOR,
    SUPPORT_INCLUSION_TOL,
    TRACE_TOL,
    debug_checks_enabled,
)
from .errors import ParameterError, SupportError, ValidationError
from .linalg import hermitize, spectral_map, support_power, trace_power
from .logging_config import get_logger
from .states import DensityMatrix

logger = get_logger(__name__)


class Region(str, Enum):
    CONCAVE = "concave"
    CONVEX_DPI = "convex-dpi"
    NEITHER = "neither"


def _check_positive(name: str, value: float) -> None:
    if isinstance(value, bool) or not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def classify_region(alpha: float, z: float) -> Region:
    """Region of (alpha, z) in which F is concave, or convex with data processing.

    Boundaries are closed.
    """
    _check_positive("alpha", alpha)
    _check_positive("z", z)
    if 0 < alpha < 1 and z >= max(alpha, 1 - alpha):
        return Region.CONCAVE
    if 1 < alpha <= 2 and alpha / 2 <= z <= alpha:
        return Region.CONVEX_DPI
    if alpha >= 2 and alpha - 1 <= z <= alpha:
        return Region.CONVEX_DPI
    return Region.NEITHER


class ParamPoint(BaseModel):
    """An (alpha, z) pair."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    z: float

    @classmethod
    def of(cls, alpha: float, z: float) -> "ParamPoint":
        _check_positive("alpha", alpha)
        _check_positive("z", z)
        return cls(alpha=float(alpha), z=float(z))

    @property
    def region(self) -> Region:
        return classify_region(self.alpha, self.z)

    @property
    def sigma_exponent(self) -> float:
        return (1 - self.alpha) / (2 * self.z)

    @property
    def rho_exponent(self) -> float:
        return self.alpha / self.z

    def __str__(self) -> str:
        return f"(alpha={self.alpha:g}, z={self.z:g})"


class FidelityValue(BaseModel):
    """T is the inner trace quantity and F = T^(1/alpha)."""

    model_config = ConfigDict(frozen=True)

    trace_quantity: float
    fidelity: float
    support_violation: bool = False
    commuting: bool = False


def supports_included(rho: DensityMatrix, sigma: DensityMatrix) -> bool:
    """True when supp(rho) lies inside supp(sigma).

    Every eigenvector of rho with eigenvalue above 1e-10 must keep squared norm
    at least 1 - 1e-8 after projection onto sigma's support.
    """
    _check_dims(rho, sigma)
    if sigma.is_full_rank:
        return True
    vecs = rho.support_basis()
    if vecs.shape[1] == 0:
        return True
    sigma_support = sigma.support_basis()
    weights = np.sum(np.abs(sigma_support.conj().T @ vecs) ** 2, axis=0)
    return bool(np.all(weights >= 1 - SUPPORT_INCLUSION_TOL))


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def _joint_spectrum(rho: DensityMatrix, sigma: DensityMatrix) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Eigenvalues of rho and sigma on a common eigenbasis, if one of the cached bases diagonalizes both."""
    v = rho.eigenbasis
    m = v.conj().T @ sigma.matrix @ v
    if np.max(np.abs(m - np.diag(np.diag(m)))) <= COMMUTE_TOL:
        return np.asarray(rho.spectrum_desc), np.clip(np.diag(m).real, 0.0, None)
    w = sigma.eigenbasis
    n = w.conj().T @ rho.matrix @ w
    if np.max(np.abs(n - np.diag(np.diag(n)))) <= COMMUTE_TOL:
        return np.clip(np.diag(n).real, 0.0, None), np.asarray(sigma.spectrum_desc)
    return None


def _commuting_trace(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    mask = (p > PSD_CLAMP) & (q > PSD_CLAMP)
    return float(np.sum(p[mask] ** alpha * q[mask] ** (1 - alpha)))


def _singular_trace(y: np.ndarray, z: float) -> float:
    """Sum of s^(2z) over the numerically nonzero singular values of Y."""
    s = scipy.linalg.svdvals(y)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    threshold = max(y.shape[0] * np.finfo(float).eps * s[0], RANK_FLOOR)
    s = s[s > threshold]
    return float(np.sum(s ** (2 * z)))


def _state_power(state: DensityMatrix, p: float) -> np.ndarray:
    return spectral_map(state.spectrum_desc, state.eigenbasis, lambda w: support_power(w, p))


def symmetric_form_trace(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> float:
    """Tr[(rho^(alpha/2z) sigma^((1-alpha)/z) rho^(alpha/2z))^z]."""
    _check_dims(rho, sigma)
    r = _state_power(rho, p.alpha / (2 * p.z))
    s = _state_power(sigma, (1 - p.alpha) / p.z)
    return trace_power(hermitize(r @ s @ r), p.z)


def alpha_z_fidelity(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    p: ParamPoint,
    strict: bool = True,
    check_forms: Optional[bool] = None,
) -> FidelityValue:
    """F_{alpha,z}(rho, sigma) = Tr[(sigma^((1-alpha)/2z) rho^(alpha/z) sigma^((1-alpha)/2z))^z]^(1/alpha).

    Powers are taken on the support (0^p = 0). For alpha > 1 a support violation
    raises SupportError when ``strict``; otherwise the support-restricted value is
    returned with ``support_violation`` set.

    Raises:
        ValidationError: on dimension mismatch.
        SupportError: supp(rho) not inside supp(sigma), alpha > 1, strict mode.
    """
    _check_dims(rho, sigma)
    violation = p.alpha > 1 and not supports_included(rho, sigma)
    if violation:
        if strict:
            raise SupportError(f"supp(rho) is not contained in supp(sigma) at alpha={p.alpha:g}")
        logger.warning(f"Support violation at {p}; evaluating on the support of sigma")

    joint = _joint_spectrum(rho, sigma)
    if joint is not None:
        trace = _commuting_trace(joint[0], joint[1], p.alpha)
    else:
        y = _state_power(sigma, p.sigma_exponent) @ _state_power(rho, p.alpha / (2 * p.z))
        trace = _singular_trace(y, p.z)
    logger.debug(f"T{p} = {trace:.17g} ({'commuting' if joint is not None else 'general'} path)")

    if check_forms or (check_forms is None and debug_checks_enabled()):
        other = symmetric_form_trace(rho, sigma, p)
        if abs(other - trace) > FORM_CHECK_TOL * max(1.0, abs(trace)):
            raise AssertionError(f"symmetric form disagrees at {p}: {trace!r} vs {other!r}")

    return FidelityValue(
        trace_quantity=trace,
        fidelity=trace ** (1 / p.alpha),
        support_violation=violation,
        commuting=joint is not None,
    )


def _validate_distribution(v: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty vector")
    if np.any(arr < 0):
        raise ValidationError(f"{name} has a negative entry")
    if abs(float(arr.sum()) - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} sums to {arr.sum():.12g}, expected 1")
    return arr


def classical_fidelity(p: Sequence[float], q: Sequence[float], alpha: float) -> float:
    """(sum_i p_i^alpha q_i^(1-alpha))^(1/alpha).

    Terms with p_i = 0 vanish. A term with q_i = 0 < p_i vanishes for alpha < 1
    and makes the result +inf for alpha > 1.
    """
    _check_positive("alpha", alpha)
    pv = _validate_distribution(p, "p")
    qv = _validate_distribution(q, "q")
    if pv.size != qv.size:
        raise ValidationError(f"length mismatch: {pv.size} vs {qv.size}")
    live = pv > 0
    if alpha > 1 and np.any(live & (qv == 0)):
        return math.inf
    if alpha == 1:
        return float(pv[live].sum())
    both = live & (qv > 0)
    total = float(np.sum(pv[both] ** alpha * qv[both] ** (1 - alpha)))
    return total ** (1 / alpha)


def _log_map(fidelity: float, alpha: float) -> float:
    if fidelity == math.inf:
        return math.inf
    if fidelity <= 0:
        return math.inf if alpha < 1 else -math.inf
    return alpha / (alpha - 1) * math.log(fidelity)


def classical_renyi(p: Sequence[float], q: Sequence[float], alpha: float) -> float:
    """(alpha/(alpha-1)) log F^C(p, q), +inf when supp(p) is not inside supp(q)."""
    _check_positive("alpha", alpha)
    if alpha == 1:
        raise ParameterError("Renyi divergence is not defined at alpha = 1")
    pv = _validate_distribution(p, "p")
    qv = _validate_distribution(q, "q")
    if pv.size != qv.size:
        raise ValidationError(f"length mismatch: {pv.size} vs {qv.size}")
    if np.any((pv > 0) & (qv == 0)):
        return math.inf
    return _log_map(classical_fidelity(pv, qv, alpha), alpha)


def renyi_entropy(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> float:
    """S_{alpha,z}(rho||sigma) with the natural logarithm; +inf off the support.

    Raises:
        ParameterError: at alpha = 1.
    """
    if p.alpha == 1:
        raise ParameterError("S_{alpha,z} is not defined at alpha = 1")
    if not supports_included(rho, sigma):
        return math.inf
    return _log_map(alpha_z_fidelity(rho, sigma, p).fidelity, p.alpha)


def renyi_from_fidelity(fidelity: float, alpha: float) -> float:
    """The map F -> (alpha/(alpha-1)) log F."""
    if alpha == 1:
        raise ParameterError("Renyi divergence is not defined at alpha = 1")
    return _log_map(fidelity, alpha)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = scipy.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(Tr|sqrt(rho) sqrt(sigma)|)^2, evaluated through the nuclear norm."""
    _check_dims(rho, sigma)
    product = _psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix)
    return float(np.linalg.norm(product, "nuc") ** 2)


def alpha_fidelity(rho: DensityMatrix, sigma: DensityMatrix, alpha: float) -> float:
    """Single-parameter F_alpha = Tr[(sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha))^alpha]^(1/alpha)."""
    _check_positive("alpha", alpha)
    _check_dims(rho, sigma)
    if alpha > 1 and not supports_included(rho, sigma):
        raise SupportError(f"supp(rho) is not contained in supp(sigma) at alpha={alpha:g}")
    s = _state_power(sigma, (1 - alpha) / (2 * alpha))
    return trace_power(hermitize(s @ rho.matrix @ s), alpha) ** (1 / alpha)


class OrbitFunctional:
    """Evaluates U -> F(rho, U sigma U*) for many unitaries at fixed (rho, sigma, alpha, z).

    Singular values of (U sigma U*)^a rho^b equal those of sigma^a U* rho^b, so both
    powers are computed once. Powers follow the support convention.
    """

    def __init__(self, rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint):
        _check_dims(rho, sigma)
        self.p = p
        self.dim = rho.dim
        self._sigma_power = _state_power(sigma, p.sigma_exponent)
        self._rho_power = _state_power(rho, p.alpha / (2 * p.z))

    def traces(self, unitaries: np.ndarray) -> np.ndarray:
        """T for a stack of unitaries of shape (n, d, d)."""
        u = np.asarray(unitaries, dtype=complex)
        if u.ndim == 2:
            u = u[None]
        y = self._sigma_power @ np.conj(np.swapaxes(u, -1, -2)) @ self._rho_power
        s = np.linalg.svd(y, compute_uv=False)
        threshold = np.maximum(self.dim * np.finfo(float).eps * s[:, :1], RANK_FLOOR)
        s = np.where(s > threshold, s, 0.0)
        return np.sum(s ** (2 * self.p.z), axis=1)

    def values(self, unitaries: np.ndarray) -> np.ndarray:
        return self.traces(unitaries) ** (1 / self.p.alpha)

    def value(self, unitary: np.ndarray) -> float:
        return float(self.values(np.asarray(unitary)[None])[0])
