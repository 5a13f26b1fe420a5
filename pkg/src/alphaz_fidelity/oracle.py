"""Independent oracles: Monte-Carlo extremum search and matrix-inequality checkers.

Everything here is empirical. Values come from sampling or direct evaluation
and are compared against the closed forms elsewhere in the package.
"""

import math
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .channels import ChannelClass, KrausChannel, random_cptp, random_mixed_unitary
from .errors import ParameterError, ValidationError
from .fidelity import OrbitFunctional, ParamPoint, alpha_z_fidelity
from .linalg import (
    as_matrix,
    commutator_norm,
    exp_skew,
    expm_hermitian,
    frac_power,
    hermitize,
    is_hermitian,
    trace_power,
)
from .logging_config import get_logger
from .states import DensityMatrix, SeedLike, as_rng, haar_unitaries, mix_states, pure_state

logger = get_logger(__name__)

REFINE_STEP = 0.05
GT_EQUALITY_TOL = 1e-10


class McExtrema(BaseModel):
    """Empirical orbit extrema with the unitaries that produced them."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    emp_max: float
    emp_min: float
    best_max_unitary: np.ndarray
    best_min_unitary: np.ndarray
    samples: int


def _random_skew(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    l = (g - g.conj().T) / 2
    return l / np.linalg.norm(l)


def refine(
    functional: OrbitFunctional,
    start: np.ndarray,
    steps: int,
    rng: np.random.Generator,
    maximize: bool,
    step: float = REFINE_STEP,
) -> Tuple[float, np.ndarray]:
    """Local search U <- exp(+-eps L) U over random unit skew directions.

    Improvements are accepted; eps halves whenever neither direction improves.
    """
    sign = 1.0 if maximize else -1.0
    u = np.asarray(start, dtype=complex)
    best = functional.value(u)
    eps = step
    d = u.shape[0]
    for _ in range(steps):
        l = _random_skew(rng, d)
        candidates = np.stack([exp_skew(eps * l) @ u, exp_skew(-eps * l) @ u])
        values = functional.values(candidates)
        k = int(np.argmax(sign * values))
        if sign * values[k] > sign * best:
            best, u = float(values[k]), candidates[k]
        else:
            eps /= 2
    return best, u


def mc_orbit_extrema(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    p: ParamPoint,
    trials: int,
    refine_steps: int = 200,
    seed: SeedLike = None,
    batch: int = 512,
) -> McExtrema:
    """Empirical max and min of F(rho, U sigma U*) over Haar samples plus local refinement."""
    if trials < 1:
        raise ParameterError(f"trials must be at least 1, got {trials}")
    rng = as_rng(seed)
    functional = OrbitFunctional(rho, sigma, p)
    d = rho.dim
    best_max, best_min = -math.inf, math.inf
    u_max = u_min = np.eye(d, dtype=complex)
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        us = haar_unitaries(d, size, rng)
        values = functional.values(us)
        i, j = int(np.argmax(values)), int(np.argmin(values))
        if values[i] > best_max:
            best_max, u_max = float(values[i]), us[i]
        if values[j] < best_min:
            best_min, u_min = float(values[j]), us[j]
        done += size
    if refine_steps > 0:
        best_max, u_max = refine(functional, u_max, refine_steps, rng, maximize=True)
        best_min, u_min = refine(functional, u_min, refine_steps, rng, maximize=False)
    logger.debug(f"orbit MC {p}: [{best_min:.12g}, {best_max:.12g}] from {trials} samples")
    return McExtrema(emp_max=best_max, emp_min=best_min, best_max_unitary=u_max, best_min_unitary=u_min, samples=trials)


class McEnvelope(BaseModel):
    model_config = ConfigDict(frozen=True)

    emp_min: float
    emp_max: float
    samples: int


def mc_pure_state_extrema(rho: DensityMatrix, p: ParamPoint, samples: int, seed: SeedLike = None) -> McEnvelope:
    """Range of F(rho, |psi><psi|) over Haar-random pure states, support convention for alpha > 1."""
    if samples < 1:
        raise ParameterError(f"samples must be at least 1, got {samples}")
    d = rho.dim
    reference = pure_state(np.eye(d)[:, 0])
    functional = OrbitFunctional(rho, reference, p)
    values = functional.values(haar_unitaries(d, samples, seed))
    return McEnvelope(emp_min=float(values.min()), emp_max=float(values.max()), samples=samples)


def mc_channel_extrema(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    p: ParamPoint,
    channel_class: ChannelClass,
    samples: int,
    seed: SeedLike = None,
    max_ops: int = 4,
    orbit_trials: int = 0,
    refine_steps: int = 0,
) -> McEnvelope:
    """Range of F(rho, Phi(sigma)) over random channels of a class.

    All channels: Haar isometries with 1..max_ops Kraus operators. Mixed unitary:
    Dirichlet mixtures of 1..max_ops Haar unitaries; ``orbit_trials`` adds the
    unitary channels explored by the orbit search, which are extreme points.
    """
    if samples < 1:
        raise ParameterError(f"samples must be at least 1, got {samples}")
    rng = as_rng(seed)
    d = rho.dim
    values = []
    for i in range(samples):
        k = 1 + i % max_ops
        if channel_class is ChannelClass.ALL:
            channel = random_cptp(d, k, rng)
        else:
            channel = random_mixed_unitary(d, k, rng)
        values.append(alpha_z_fidelity(rho, channel.apply(sigma), p, strict=False).fidelity)
    emp_min, emp_max = min(values), max(values)
    total = samples
    if orbit_trials > 0:
        orbit = mc_orbit_extrema(rho, sigma, p, orbit_trials, refine_steps, rng)
        emp_min, emp_max = min(emp_min, orbit.emp_min), max(emp_max, orbit.emp_max)
        total += orbit_trials
    return McEnvelope(emp_min=emp_min, emp_max=emp_max, samples=total)


def dpi_margin(rho: DensityMatrix, sigma: DensityMatrix, channel: KrausChannel, p: ParamPoint) -> float:
    """F(rho, sigma) - F(Phi(rho), Phi(sigma)); non-negative when processing cannot raise F."""
    before = alpha_z_fidelity(rho, sigma, p, strict=False).fidelity
    after = alpha_z_fidelity(channel.apply(rho), channel.apply(sigma), p, strict=False).fidelity
    return before - after


class MixtureMargin(BaseModel):
    """Mixture gaps, oriented so that concavity (alpha < 1) or convexity (alpha > 1) means >= 0."""

    model_config = ConfigDict(frozen=True)

    trace_margin: float
    fidelity_margin: float


def mixture_margin(
    rho: DensityMatrix,
    sigmas: Sequence[DensityMatrix],
    weights: Sequence[float],
    p: ParamPoint,
) -> MixtureMargin:
    """Gap between the value at the mixture of sigmas and the mixture of values, for T and for F."""
    if len(sigmas) != len(weights) or not sigmas:
        raise ValidationError("one weight per state is required")
    mixed = alpha_z_fidelity(rho, mix_states(sigmas, weights), p, strict=False)
    parts = [alpha_z_fidelity(rho, s, p, strict=False) for s in sigmas]
    avg_t = sum(w * v.trace_quantity for w, v in zip(weights, parts))
    avg_f = sum(w * v.fidelity for w, v in zip(weights, parts))
    sign = 1.0 if p.alpha < 1 else -1.0
    return MixtureMargin(
        trace_margin=sign * (mixed.trace_quantity - avg_t),
        fidelity_margin=sign * (mixed.fidelity - avg_f),
    )


class GoldenThompsonResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    margin: float
    commuting: bool


def check_golden_thompson(a: object, b: object) -> GoldenThompsonResult:
    """margin = Tr[e^A e^B] - Tr[e^(A+B)], with the commuting flag set when ||[A, B]|| < 1e-10."""
    am, bm = as_matrix(a, "A"), as_matrix(b, "B")
    if not (is_hermitian(am) and is_hermitian(bm)):
        raise ValidationError("Golden-Thompson needs Hermitian A and B")
    am, bm = hermitize(am), hermitize(bm)
    lhs = float(np.trace(expm_hermitian(am + bm)).real)
    rhs = float(np.trace(expm_hermitian(am) @ expm_hermitian(bm)).real)
    return GoldenThompsonResult(margin=rhs - lhs, commuting=commutator_norm(am, bm) < GT_EQUALITY_TOL)


def check_alt(a: object, b: object, q: float, r: float) -> float:
    """Signed Araki-Lieb-Thirring margin.

    Compares Tr[(B^(r/2) A^r B^(r/2))^(q/r)] with Tr[(B^(1/2) A B^(1/2))^q]; the
    first is the smaller for r <= 1 and the larger for r >= 1.
    """
    if not (q > 0 and r > 0):
        raise ParameterError(f"q and r must be positive, got q={q}, r={r}")
    am, bm = as_matrix(a, "A"), as_matrix(b, "B")
    br = frac_power(bm, r / 2)
    lhs = trace_power(hermitize(br @ frac_power(am, r) @ br), q / r)
    bh = frac_power(bm, 0.5)
    rhs = trace_power(hermitize(bh @ am @ bh), q)
    return rhs - lhs if r <= 1 else lhs - rhs


class RearrangementBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower: float
    value: float
    upper: float

    @property
    def margin(self) -> float:
        return min(self.value - self.lower, self.upper - self.value)

    def holds(self, tolerance: float = 1e-10) -> bool:
        return self.margin >= -tolerance


def rearrangement_bounds(rho: DensityMatrix, sigma: DensityMatrix) -> RearrangementBounds:
    """<lambda_desc(rho), lambda_asc(sigma)> <= Tr[rho sigma] <= <lambda_desc(rho), lambda_desc(sigma)>."""
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    result = RearrangementBounds(
        lower=float(np.dot(rho.spectrum_desc, sigma.spectrum_asc)),
        value=float(np.trace(rho.matrix @ sigma.matrix).real),
        upper=float(np.dot(rho.spectrum_desc, sigma.spectrum_desc)),
    )
    if not result.holds():
        logger.warning(f"rearrangement sandwich violated by {-result.margin:.3e}")
    return result


def random_hermitian(d: int, seed: SeedLike = None, scale: float = 1.0) -> np.ndarray:
    rng = as_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (g + g.conj().T) / 2


def commuting_hermitian_pair(d: int, seed: SeedLike = None) -> Tuple[np.ndarray, np.ndarray]:
    """Two Hermitian matrices diagonal in a shared Haar basis."""
    rng = as_rng(seed)
    u = haar_unitaries(d, 1, rng)[0]
    a = (u * rng.standard_normal(d)) @ u.conj().T
    b = (u * rng.standard_normal(d)) @ u.conj().T
    return hermitize(a), hermitize(b)

