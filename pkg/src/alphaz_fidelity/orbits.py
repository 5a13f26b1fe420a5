"""Extrema of the alpha-z-fidelity over the unitary orbit of sigma.

The closed forms pair the sorted spectra of rho and sigma: the aligned pairing
(largest with largest) or the reversed pairing (largest with smallest). Between
the minimizing and maximizing unitaries every intermediate value is reached
along a continuous path, which ``solve_orbit_target`` searches.
"""

from enum import Enum
from typing import Optional

import numpy as np
import scipy.optimize
from pydantic import BaseModel, ConfigDict

from .errors import (
    ParameterError,
    PreconditionError,
    RangeError,
    UnsupportedRegionError,
    ValidationError,
)
from .fidelity import (
    OrbitFunctional,
    ParamPoint,
    Region,
    alpha_z_fidelity,
    classical_fidelity,
    classical_renyi,
)
from .linalg import exp_skew, unitary_log
from .logging_config import get_logger
from .states import DensityMatrix, UnitaryMatrix

logger = get_logger(__name__)

ORBIT_MIN_REGION = (
    "z in (0, 1) with alpha != 1, or 1 < alpha <= 2 with alpha/2 <= z <= alpha, "
    "or alpha >= 2 with alpha - 1 <= z <= alpha"
)
ORBIT_PATH_REGION = (
    "0 < alpha < 1 with 0 < z < 1, or 1 < alpha <= 2 with alpha/2 <= z <= alpha, "
    "or alpha >= 2 with alpha - 1 <= z <= alpha"
)

TARGET_SLACK = 1e-9
SCAN_POINTS = 256


class Pairing(str, Enum):
    ALIGNED = "aligned"
    REVERSED = "reversed"


class ExtremumKind(str, Enum):
    MAX = "max"
    MIN = "min"


class OrbitExtremum(BaseModel):
    """Closed-form extremum and a unitary U with F(rho, U sigma U*) equal to it."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    achieving_unitary: UnitaryMatrix
    kind: ExtremumKind
    pairing: Pairing
    branch: str


class GeodesicPath(BaseModel):
    """U_t = exp((1 - t) L0 + t L1) for t in [0, 1]."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    l0: np.ndarray
    l1: np.ndarray

    @classmethod
    def between(cls, start: UnitaryMatrix, end: UnitaryMatrix) -> "GeodesicPath":
        return cls(l0=unitary_log(start.matrix), l1=unitary_log(end.matrix))

    def generator(self, t: float) -> np.ndarray:
        return (1 - t) * self.l0 + t * self.l1

    def unitary_at(self, t: float) -> UnitaryMatrix:
        if not 0.0 <= t <= 1.0:
            raise ParameterError(f"path parameter must lie in [0, 1], got {t}")
        return UnitaryMatrix.from_array(exp_skew(self.generator(t)))


class OrbitTarget(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    unitary: UnitaryMatrix
    achieved: float


class RenyiExtrema(BaseModel):
    """Orbit extrema of S_{alpha,z}; None where no closed form covers (alpha, z)."""

    model_config = ConfigDict(frozen=True)

    max: Optional[float]
    min: Optional[float]


def _require_alpha(p: ParamPoint) -> None:
    if p.alpha == 1:
        raise ParameterError("orbit extrema are defined for alpha != 1")


def _require_full_rank_sigma(sigma: DensityMatrix, p: ParamPoint) -> None:
    if p.alpha > 1 and not sigma.is_full_rank:
        raise PreconditionError(
            f"orbit extrema at alpha={p.alpha:g} > 1 need a full-rank sigma (rank {sigma.rank} < {sigma.dim})"
        )


def achieving_unitary(rho: DensityMatrix, sigma: DensityMatrix, pairing: Pairing) -> UnitaryMatrix:
    """Unitary sending sigma's i-th descending eigenvector to rho's i-th (aligned) or (d-1-i)-th (reversed)."""
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    v_rho = rho.eigenbasis
    if pairing is Pairing.REVERSED:
        v_rho = v_rho[:, ::-1]
    return UnitaryMatrix.from_array(v_rho @ sigma.eigenbasis.conj().T)


def paired_value(rho: DensityMatrix, sigma: DensityMatrix, alpha: float, pairing: Pairing) -> float:
    """F^C(lambda_desc(rho), lambda_desc(sigma)) or F^C(lambda_desc(rho), lambda_asc(sigma))."""
    q = sigma.spectrum_desc if pairing is Pairing.ALIGNED else sigma.spectrum_asc
    return classical_fidelity(rho.spectrum_desc, q, alpha)


def _extremum(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    p: ParamPoint,
    kind: ExtremumKind,
    pairing: Pairing,
    branch: str,
) -> OrbitExtremum:
    value = paired_value(rho, sigma, p.alpha, pairing)
    logger.debug(f"orbit {kind.value} {p}: branch {branch}, {pairing.value} pairing, value {value:.17g}")
    return OrbitExtremum(
        value=value,
        achieving_unitary=achieving_unitary(rho, sigma, pairing),
        kind=kind,
        pairing=pairing,
        branch=branch,
    )


def orbit_max(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> OrbitExtremum:
    """max over U of F(rho, U sigma U*): aligned spectra for alpha < 1, reversed for alpha > 1."""
    _require_alpha(p)
    _require_full_rank_sigma(sigma, p)
    if p.alpha < 1:
        return _extremum(rho, sigma, p, ExtremumKind.MAX, Pairing.ALIGNED, "alpha<1")
    return _extremum(rho, sigma, p, ExtremumKind.MAX, Pairing.REVERSED, "alpha>1")


def orbit_min_covered(p: ParamPoint) -> bool:
    return p.alpha != 1 and (0 < p.z < 1 or p.region is Region.CONVEX_DPI)


def orbit_min(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> OrbitExtremum:
    """min over U of F(rho, U sigma U*).

    Covered for z in (0, 1) (reversed pairing when alpha < 1, aligned when
    alpha > 1) and for the convex region (aligned pairing).

    Raises:
        UnsupportedRegionError: outside those parameter sets.
    """
    _require_alpha(p)
    if not orbit_min_covered(p):
        raise UnsupportedRegionError(
            f"no closed-form orbit minimum at {p}; proven for {ORBIT_MIN_REGION}",
            stated_region=ORBIT_MIN_REGION,
        )
    _require_full_rank_sigma(sigma, p)
    if p.alpha < 1:
        return _extremum(rho, sigma, p, ExtremumKind.MIN, Pairing.REVERSED, "z<1,alpha<1")
    if p.z < 1:
        return _extremum(rho, sigma, p, ExtremumKind.MIN, Pairing.ALIGNED, "z<1,alpha>1")
    return _extremum(rho, sigma, p, ExtremumKind.MIN, Pairing.ALIGNED, "convex-dpi")


def _require_path_region(p: ParamPoint) -> None:
    if not (p.region is Region.CONVEX_DPI or (0 < p.alpha < 1 and 0 < p.z < 1)):
        raise UnsupportedRegionError(
            f"orbit interval traversal is not covered at {p}; proven for {ORBIT_PATH_REGION}",
            stated_region=ORBIT_PATH_REGION,
        )


def geodesic_path(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> GeodesicPath:
    """Path from the minimizing unitary (t = 0) to the maximizing unitary (t = 1)."""
    low = orbit_min(rho, sigma, p)
    high = orbit_max(rho, sigma, p)
    return GeodesicPath.between(low.achieving_unitary, high.achieving_unitary)


def orbit_path_value(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    path: GeodesicPath,
    t: float,
    p: ParamPoint,
) -> float:
    """F(rho, U_t sigma U_t*)."""
    u = path.unitary_at(t)
    return alpha_z_fidelity(rho, sigma.evolve(u), p, strict=False).fidelity


def solve_orbit_target(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    target: float,
    p: ParamPoint,
) -> OrbitTarget:
    """Find t with F(rho, U_t sigma U_t*) = target on the min-to-max path.

    The path value need not be monotone: a 256-point scan locates the first
    bracket, which is then bisected.

    Raises:
        UnsupportedRegionError: (alpha, z) outside the covered region.
        RangeError: target outside [orbit_min, orbit_max] beyond 1e-9.
    """
    _require_path_region(p)
    low = orbit_min(rho, sigma, p)
    high = orbit_max(rho, sigma, p)
    if not low.value - TARGET_SLACK <= target <= high.value + TARGET_SLACK:
        raise RangeError(
            f"target {target:.12g} outside the orbit interval [{low.value:.12g}, {high.value:.12g}]"
        )
    goal = min(max(target, low.value), high.value)

    path = GeodesicPath.between(low.achieving_unitary, high.achieving_unitary)
    functional = OrbitFunctional(rho, sigma, p)

    def gap(t: float) -> float:
        return functional.value(exp_skew(path.generator(t))) - goal

    grid = np.linspace(0.0, 1.0, SCAN_POINTS)
    previous = gap(0.0)
    solution = 0.0 if abs(previous) <= TARGET_SLACK else None
    if solution is None:
        for left, right in zip(grid[:-1], grid[1:]):
            current = gap(right)
            if abs(current) <= TARGET_SLACK:
                solution = float(right)
                break
            if (previous < 0) != (current < 0):
                logger.debug(f"bracket [{left:.6f}, {right:.6f}] for target {goal:.12g}")
                solution = float(scipy.optimize.bisect(gap, left, right, xtol=1e-14, maxiter=200))
                break
            previous = current
    if solution is None:
        # Endpoint values drift from the closed forms only by round-off.
        solution = 0.0 if abs(gap(0.0)) <= abs(gap(1.0)) else 1.0

    u = path.unitary_at(solution)
    achieved = alpha_z_fidelity(rho, sigma.evolve(u), p, strict=False).fidelity
    logger.debug(f"target {goal:.12g} reached at t={solution:.12g} with F={achieved:.12g}")
    return OrbitTarget(t=solution, unitary=u, achieved=achieved)


def orbit_renyi_extrema(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> RenyiExtrema:
    """Orbit extrema of S_{alpha,z}(rho || U sigma U*) for full-rank sigma.

    S is increasing in F for alpha > 1 and decreasing for alpha < 1, so the
    maximum of S comes from the reversed pairing and the minimum from the
    aligned pairing; an extremum is None when the matching fidelity extremum
    has no closed form at (alpha, z).

    Raises:
        PreconditionError: sigma is rank-deficient.
    """
    _require_alpha(p)
    if not sigma.is_full_rank:
        raise PreconditionError(f"orbit Renyi extrema need a full-rank sigma (rank {sigma.rank} < {sigma.dim})")
    needs_min_f_for_max = p.alpha < 1
    max_covered = orbit_min_covered(p) if needs_min_f_for_max else True
    min_covered = True if needs_min_f_for_max else orbit_min_covered(p)
    s_max = classical_renyi(rho.spectrum_desc, sigma.spectrum_asc, p.alpha) if max_covered else None
    s_min = classical_renyi(rho.spectrum_desc, sigma.spectrum_desc, p.alpha) if min_covered else None
    logger.debug(f"orbit Renyi extrema {p}: min={s_min}, max={s_max}")
    return RenyiExtrema(max=s_max, min=s_min)
