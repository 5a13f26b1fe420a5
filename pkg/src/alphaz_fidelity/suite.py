"""Property suite: registered checks, each tied to the result it exercises, and the runner.

Every check draws from its own random substream keyed by the check id, so a
filtered run reproduces the numbers of the full run. Informational checks
record empirical margins without a pass/fail verdict.
"""

import itertools
import json
import logging
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from .channels import (
    ChannelClass,
    channel_class_extrema,
    identity_channel,
    pinching,
    pure_state_extrema,
    random_cptp,
    random_mixed_unitary,
    replacement,
    unital_majorization_check,
)
from .config import CHECK_TOL, SEED_MAX
from .errors import ConfigError
from .fidelity import (
    ParamPoint,
    alpha_fidelity,
    alpha_z_fidelity,
    classical_fidelity,
    renyi_entropy,
    renyi_from_fidelity,
    symmetric_form_trace,
    uhlmann_fidelity,
)
from .geometry import (
    SubspacePair,
    commuting_subspace_formula,
    compression_bounds,
    coordinate_subspace,
    eigen_subspace,
    interlacing_margin,
    intersection_dim,
    printed_compression_bounds,
    printed_subspace_bounds,
    random_subspace,
    subspace_bounds,
    subspace_fidelity_trace,
)
from .logging_config import get_logger
from .oracle import (
    check_alt,
    check_golden_thompson,
    commuting_hermitian_pair,
    dpi_margin,
    mc_channel_extrema,
    mc_orbit_extrema,
    mc_pure_state_extrema,
    mixture_margin,
    random_hermitian,
    rearrangement_bounds,
)
from .orbits import (
    ExtremumKind,
    Pairing,
    geodesic_path,
    orbit_max,
    orbit_min,
    orbit_path_value,
    orbit_renyi_extrema,
    paired_value,
    solve_orbit_target,
)
from .states import (
    DensityMatrix,
    SubspaceProjector,
    UnitaryMatrix,
    density_from_spectrum,
    haar_unitary,
    make_rng,
    pure_state,
    random_density,
    subspace_state,
)

logger = get_logger(__name__)

ANCHOR_MANIFEST: Tuple[str, ...] = (
    "definition",
    "commuting-reduction",
    "unitary-invariance",
    "concavity-convexity",
    "data-processing",
    "golden-thompson",
    "araki-lieb-thirring",
    "trace-rearrangement",
    "orbit-extrema",
    "orbit-interval",
    "orbit-renyi-extrema",
    "unital-majorization",
    "pure-state-extrema",
    "all-channel-extrema",
    "replacement-channel",
    "mixed-unitary-extrema",
    "subspace-bounds",
    "compression-bounds",
)

# Monte-Carlo closure is asserted only with enough samples to expect it.
CLOSURE_MIN_TRIALS = 1000
CONDITIONING_FLOOR = 0.2

SELF_ALPHAS = (0.3, 0.5, 0.9, 1.5, 2.0, 3.0)
SELF_ZS = (0.3, 0.5, 1.0, 1.5, 2.5)
MODERATE_POINTS = ((0.3, 0.5), (0.5, 0.5), (0.5, 1.0), (0.9, 1.5), (1.5, 1.0), (2.0, 1.5), (2.0, 0.7))
CONCAVE_POINTS = ((0.5, 0.5), (0.3, 0.8), (0.7, 1.0))
CONVEX_POINTS = ((2.0, 1.5), (1.5, 1.0), (3.0, 2.5))
ORBIT_MAX_POINTS = ((0.5, 0.5), (0.3, 2.0), (2.0, 1.5), (3.0, 0.7))
ORBIT_MIN_POINTS = ((0.5, 0.5), (0.7, 0.4), (2.0, 0.7), (2.0, 1.5), (3.0, 2.5))
SUBSPACE_ALPHAS = (0.3, 0.5, 2.0, 3.0)


class VerificationReport(BaseModel):
    """One check's outcome; ``passed`` serializes as "pass" and is None for informational checks."""

    model_config = ConfigDict(populate_by_name=True)

    check_id: str
    anchor: str
    samples: int
    worst_margin: Optional[float]
    passed: Optional[bool] = Field(default=None, alias="pass")
    seed: int
    runtime_ms: int
    tolerance: float
    informational: bool = False
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")


# Sample counts of the acceptance criteria; the default profile keeps a plain run short.
ACCEPTANCE_PROFILE: Dict[str, int] = {
    "states": 10,
    "pairs": 10,
    "diagonal_pairs": 100,
    "invariance_unitaries": 100,
    "orbit_pairs": 20,
    "interval_pairs": 10,
    "dpi_channels": 200,
    "channel_samples": 500,
    "pure_samples": 10000,
    "trials": 2000,
}

PROFILES: Dict[str, Dict[str, int]] = {"default": {}, "acceptance": ACCEPTANCE_PROFILE}


class SuiteConfig(BaseModel):
    """Suite parameters; ``checks`` of None runs every registered check.

    ``states`` counts self-fidelity states per dimension, ``pairs`` the state
    pairs of the definition, invariance, data-processing and channel checks.
    """

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=42, ge=0, lt=SEED_MAX)
    checks: Optional[List[str]] = None
    states: int = Field(default=5, ge=1)
    pairs: int = Field(default=5, ge=1)
    diagonal_pairs: int = Field(default=15, ge=1)
    invariance_unitaries: int = Field(default=10, ge=1)
    orbit_pairs: int = Field(default=5, ge=1)
    interval_pairs: int = Field(default=5, ge=1)
    trials: int = Field(default=2000, ge=1)
    refine_steps: int = Field(default=200, ge=0)
    pure_samples: int = Field(default=10000, ge=1)
    dpi_channels: int = Field(default=200, ge=1)
    channel_samples: int = Field(default=200, ge=1)
    tolerance: float = Field(default=CHECK_TOL, gt=0)
    mc_closure: float = Field(default=1e-3, gt=0)
    workers: int = Field(default=1, ge=1)

    @classmethod
    def from_file(cls, path: str, profile: Optional[str] = None, **overrides: Any) -> "SuiteConfig":
        """Load a JSON suite configuration; explicit overrides win over the file.

        The file may name a profile under "profile"; an explicit ``profile`` wins.

        Raises:
            ConfigError: unreadable file, malformed JSON or invalid fields.
        """
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read suite config {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"suite config {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"suite config {path} must be a JSON object")
        file_profile = data.pop("profile", None)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.build(profile=profile or file_profile, **data)

    @classmethod
    def build(cls, profile: Optional[str] = None, **values: Any) -> "SuiteConfig":
        """Validate ``values`` on top of a named profile's sample counts."""
        name = profile or "default"
        if name not in PROFILES:
            raise ConfigError(f"unknown suite profile '{name}'; choose from {', '.join(PROFILES)}")
        try:
            return cls(**{**PROFILES[name], **values})
        except PydanticValidationError as e:
            err = e.errors()[0]
            field = ".".join(str(part) for part in err["loc"])
            raise ConfigError(f"invalid suite config field '{field}': {err['msg']}")


class CheckOutcome(BaseModel):
    samples: int
    worst_margin: float
    detail: str = ""


class CheckContext:
    """Per-check view of the configuration and its random substream."""

    def __init__(self, config: SuiteConfig, check_id: str):
        self.config = config
        self.check_id = check_id
        self.rng = make_rng(config.seed, zlib.crc32(check_id.encode("utf-8")))

    def state(self, d: int, floor: float = CONDITIONING_FLOOR) -> DensityMatrix:
        """Random state mixed with I/d so every eigenvalue is at least floor/d."""
        raw = random_density(d, d, self.rng)
        return DensityMatrix.from_matrix((1 - floor) * raw.matrix + floor * np.eye(d) / d)


class CheckSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    check_id: str
    anchor: str
    informational: bool = False
    tolerance: Optional[float] = None
    func: Callable[[CheckContext], CheckOutcome]


REGISTRY: Dict[str, CheckSpec] = {}


def register(
    check_id: str,
    anchor: str,
    informational: bool = False,
    tolerance: Optional[float] = None,
) -> Callable[[Callable[[CheckContext], CheckOutcome]], Callable[[CheckContext], CheckOutcome]]:
    """Add a check to the registry; registration order is report order."""

    def decorator(func: Callable[[CheckContext], CheckOutcome]) -> Callable[[CheckContext], CheckOutcome]:
        if check_id in REGISTRY:
            raise ConfigError(f"duplicate check id: {check_id}")
        REGISTRY[check_id] = CheckSpec(
            check_id=check_id, anchor=anchor, informational=informational, tolerance=tolerance, func=func
        )
        return func

    return decorator


class Margins:
    """Running minimum of one-sided margins."""

    def __init__(self) -> None:
        self.worst = math.inf
        self.samples = 0
        self.where = ""

    def add(self, margin: float, where: str = "") -> None:
        self.samples += 1
        if math.isnan(margin):
            margin = -math.inf
        if margin < self.worst:
            self.worst, self.where = margin, where

    def outcome(self, note: str = "") -> CheckOutcome:
        parts = [note] if note else []
        if self.where:
            parts.append(f"worst at {self.where}")
        return CheckOutcome(
            samples=self.samples,
            worst_margin=self.worst if self.samples else 0.0,
            detail="; ".join(parts),
        )


def _points(pairs: Sequence[Tuple[float, float]]) -> List[ParamPoint]:
    return [ParamPoint.of(a, z) for a, z in pairs]


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


# -- definition and basic properties -------------------------------------------------


@register("self-fidelity", "definition", tolerance=1e-10)
def check_self_fidelity(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    grid = [ParamPoint.of(a, z) for a in SELF_ALPHAS for z in SELF_ZS]
    for d in (2, 3, 4, 6, 8):
        for i in range(ctx.config.states):
            rho = random_density(d, d, ctx.rng)
            for p in grid:
                margins.add(-abs(alpha_z_fidelity(rho, rho, p).fidelity - 1.0), f"d={d} state {i} {p}")
    return margins.outcome()


@register("symmetric-form", "definition")
def check_symmetric_form(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(MODERATE_POINTS):
                t = alpha_z_fidelity(rho, sigma, p, check_forms=False).trace_quantity
                margins.add(-_relative(symmetric_form_trace(rho, sigma, p), t), f"d={d} pair {i} {p}")
    return margins.outcome()


@register("uhlmann-cross-path", "definition")
def check_uhlmann(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    p = ParamPoint.of(0.5, 0.5)
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            margins.add(-abs(alpha_z_fidelity(rho, sigma, p).fidelity - uhlmann_fidelity(rho, sigma)), f"d={d} pair {i}")
    return margins.outcome()


@register("alpha-diagonal", "definition")
def check_alpha_diagonal(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for alpha in (0.5, 0.8, 1.5, 2.0):
                f = alpha_z_fidelity(rho, sigma, ParamPoint.of(alpha, alpha)).fidelity
                margins.add(-_relative(f, alpha_fidelity(rho, sigma, alpha)), f"d={d} pair {i} alpha={alpha}")
    return margins.outcome()


@register("commuting-reduction", "commuting-reduction", tolerance=1e-10)
def check_commuting_reduction(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(ctx.config.diagonal_pairs):
        d = 2 + i % 3
        basis = haar_unitary(d, ctx.rng)
        p_vec, q_vec = ctx.rng.dirichlet(np.ones(d)), ctx.rng.dirichlet(np.ones(d))
        rho, sigma = density_from_spectrum(p_vec, basis), density_from_spectrum(q_vec, basis)
        for alpha in SELF_ALPHAS:
            expected = classical_fidelity(p_vec, q_vec, alpha)
            for z in SELF_ZS:
                f = alpha_z_fidelity(rho, sigma, ParamPoint.of(alpha, z)).fidelity
                margins.add(-abs(f - expected), f"d={d} pair {i} alpha={alpha} z={z}")
    return margins.outcome()


@register("unitary-invariance", "unitary-invariance")
def check_unitary_invariance(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    points = _points(((0.5, 0.5), (0.3, 1.0), (2.0, 1.5), (1.5, 0.8)))
    for d in (2, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            base = {p: alpha_z_fidelity(rho, sigma, p).fidelity for p in points}
            for _ in range(ctx.config.invariance_unitaries):
                u = haar_unitary(d, ctx.rng)
                rho_u, sigma_u = rho.evolve(u), sigma.evolve(u)
                for p in points:
                    f = alpha_z_fidelity(rho_u, sigma_u, p).fidelity
                    margins.add(-_relative(f, base[p]), f"d={d} pair {i} {p}")
    return margins.outcome()


def _mixture_samples(ctx: CheckContext, points: Sequence[Tuple[float, float]], use_trace: bool, margins: Margins) -> None:
    for d in (2, 3):
        for i in range(ctx.config.pairs):
            rho = ctx.state(d)
            sigmas = [ctx.state(d) for _ in range(3)]
            weights = ctx.rng.dirichlet(np.ones(3))
            for p in _points(points):
                m = mixture_margin(rho, sigmas, weights, p)
                margins.add(m.trace_margin if use_trace else m.fidelity_margin, f"d={d} sample {i} {p}")


@register("mixture-trace", "concavity-convexity")
def check_mixture_trace(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    _mixture_samples(ctx, CONCAVE_POINTS + CONVEX_POINTS, True, margins)
    return margins.outcome("trace quantity T at concave and convex points")


@register("mixture-fidelity", "concavity-convexity", informational=True)
def check_mixture_fidelity(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    _mixture_samples(ctx, CONCAVE_POINTS + CONVEX_POINTS, False, margins)
    return margins.outcome("F = T^(1/alpha); mixture behaviour recorded, not asserted")


def _dpi_samples(ctx: CheckContext, points: Sequence[Tuple[float, float]]) -> Margins:
    margins = Margins()
    d = 3
    for i in range(ctx.config.pairs):
        rho, sigma = ctx.state(d), ctx.state(d)
        for j in range(ctx.config.dpi_channels):
            channel = random_cptp(d, 1 + j % 4, ctx.rng)
            for p in _points(points):
                margins.add(dpi_margin(rho, sigma, channel, p), f"pair {i} channel {j} {p}")
    return margins


@register("data-processing", "data-processing")
def check_data_processing(ctx: CheckContext) -> CheckOutcome:
    return _dpi_samples(ctx, CONVEX_POINTS).outcome()


@register("data-processing-concave", "data-processing", informational=True)
def check_data_processing_concave(ctx: CheckContext) -> CheckOutcome:
    return _dpi_samples(ctx, CONCAVE_POINTS[:2]).outcome("concave region; outcome recorded only")


@register("golden-thompson", "golden-thompson")
def check_golden_thompson_margin(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(500):
        d = 2 + i % 4
        a, b = random_hermitian(d, ctx.rng), random_hermitian(d, ctx.rng)
        result = check_golden_thompson(a, b)
        margins.add(result.margin / max(1.0, float(np.trace(a @ a).real)), f"sample {i} d={d}")
    return margins.outcome()


@register("golden-thompson-equality", "golden-thompson")
def check_golden_thompson_equality(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(50):
        d = 2 + i % 4
        a, b = commuting_hermitian_pair(d, ctx.rng)
        result = check_golden_thompson(a, b)
        scale = max(1.0, float(np.trace(a @ a).real + np.trace(b @ b).real))
        margins.add(-abs(result.margin) / scale if result.commuting else -math.inf, f"sample {i} d={d}")
    return margins.outcome()


@register("araki-lieb-thirring", "araki-lieb-thirring")
def check_araki_lieb_thirring(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    rs = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
    qs = (0.5, 1.0, 2.0)
    for i in range(500):
        d = 2 + i % 4
        a, b = random_density(d, d, ctx.rng), random_density(d, d, ctx.rng)
        r, q = rs[i % len(rs)], qs[(i // len(rs)) % len(qs)]
        margins.add(check_alt(a.matrix, b.matrix, q, r), f"sample {i} d={d} q={q} r={r}")
    return margins.outcome()


@register("trace-rearrangement", "trace-rearrangement", tolerance=1e-10)
def check_trace_rearrangement(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(200):
        d = 2 + i % 4
        result = rearrangement_bounds(random_density(d, d, ctx.rng), random_density(d, d, ctx.rng))
        margins.add(result.margin, f"sample {i} d={d}")
    return margins.outcome()


# -- unitary orbits --------------------------------------------------------------------


def _orbit_sandwich(d: int, kind: ExtremumKind) -> Callable[[CheckContext], CheckOutcome]:
    points = ORBIT_MAX_POINTS if kind is ExtremumKind.MAX else ORBIT_MIN_POINTS

    def check(ctx: CheckContext) -> CheckOutcome:
        margins = Margins()
        closure = ctx.config.trials >= CLOSURE_MIN_TRIALS
        for i in range(ctx.config.orbit_pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(points):
                mc = mc_orbit_extrema(rho, sigma, p, ctx.config.trials, ctx.config.refine_steps, ctx.rng)
                if kind is ExtremumKind.MAX:
                    closed, empirical = orbit_max(rho, sigma, p).value, mc.emp_max
                    margins.add(closed - empirical, f"pair {i} {p} bound")
                    if closure:
                        margins.add(empirical - (closed - ctx.config.mc_closure), f"pair {i} {p} closure")
                else:
                    closed, empirical = orbit_min(rho, sigma, p).value, mc.emp_min
                    margins.add(empirical - closed, f"pair {i} {p} bound")
                    if closure:
                        margins.add(closed + ctx.config.mc_closure - empirical, f"pair {i} {p} closure")
        note = "" if closure else f"closure not asserted below {CLOSURE_MIN_TRIALS} trials"
        return margins.outcome(note)

    return check


for _d in (2, 3, 4):
    register(f"orbit-max-d{_d}", "orbit-extrema")(_orbit_sandwich(_d, ExtremumKind.MAX))
    register(f"orbit-min-d{_d}", "orbit-extrema")(_orbit_sandwich(_d, ExtremumKind.MIN))


@register("orbit-achievers", "orbit-extrema", tolerance=1e-8)
def check_orbit_achievers(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.orbit_pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(ORBIT_MAX_POINTS):
                ext = orbit_max(rho, sigma, p)
                f = alpha_z_fidelity(rho, sigma.evolve(ext.achieving_unitary), p).fidelity
                margins.add(-abs(f - ext.value), f"d={d} pair {i} max {p}")
            for p in _points(ORBIT_MIN_POINTS):
                ext = orbit_min(rho, sigma, p)
                f = alpha_z_fidelity(rho, sigma.evolve(ext.achieving_unitary), p).fidelity
                margins.add(-abs(f - ext.value), f"d={d} pair {i} min {p}")
    return margins.outcome()


@register("orbit-two-sided", "orbit-extrema")
def check_orbit_two_sided(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(((0.5, 0.5), (2.0, 1.5))):
                low, high = orbit_min(rho, sigma, p).value, orbit_max(rho, sigma, p).value
                for _ in range(20):
                    v, w = haar_unitary(d, ctx.rng), haar_unitary(d, ctx.rng)
                    f = alpha_z_fidelity(rho.evolve(v), sigma.evolve(w), p).fidelity
                    margins.add(min(f - low, high - f), f"d={d} pair {i} {p}")
    return margins.outcome()


@register("orbit-max-z-invariance", "orbit-extrema", tolerance=1e-8)
def check_orbit_max_z_invariance(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for alpha in (0.3, 0.5, 0.8):
                reference = orbit_max(rho, sigma, ParamPoint.of(alpha, 1.0))
                shifted = sigma.evolve(reference.achieving_unitary)
                for z in (0.3, 1.0, 2.5):
                    p = ParamPoint.of(alpha, z)
                    margins.add(-abs(orbit_max(rho, sigma, p).value - reference.value), f"d={d} pair {i} {p} closed")
                    margins.add(-abs(alpha_z_fidelity(rho, shifted, p).fidelity - reference.value), f"d={d} pair {i} {p}")
    return margins.outcome()


def _block_unitary(sigma: DensityMatrix, groups: Sequence[Sequence[int]], rng: np.random.Generator) -> UnitaryMatrix:
    """Unitary acting inside the given groups of sigma's eigenvectors and trivially elsewhere."""
    d = sigma.dim
    inner = np.eye(d, dtype=complex)
    for group in groups:
        block = haar_unitary(len(group), rng).matrix
        inner[np.ix_(group, group)] = block
    v = sigma.eigenbasis
    return UnitaryMatrix.from_array(v @ inner @ v.conj().T)


@register("orbit-degenerate-invariance", "orbit-extrema", tolerance=1e-8)
def check_orbit_degenerate(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(ctx.config.pairs):
        rho = density_from_spectrum((0.4, 0.4, 0.2), haar_unitary(3, ctx.rng))
        sigma = density_from_spectrum((0.5, 0.25, 0.25), haar_unitary(3, ctx.rng))
        for p in _points(((0.5, 0.5), (2.0, 1.5))):
            for ext in (orbit_max(rho, sigma, p), orbit_min(rho, sigma, p)):
                for _ in range(5):
                    w = _block_unitary(sigma, [[1, 2]], ctx.rng)
                    f = alpha_z_fidelity(rho, sigma.evolve(ext.achieving_unitary @ w), p).fidelity
                    margins.add(-abs(f - ext.value), f"pair {i} {ext.kind.value} {p}")
    return margins.outcome()


@register("orbit-interval-traversal", "orbit-interval", tolerance=1e-6)
def check_orbit_interval(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(ctx.config.interval_pairs):
        rho, sigma = ctx.state(3), ctx.state(3)
        for p in _points(((2.0, 1.5), (0.5, 0.5))):
            low, high = orbit_min(rho, sigma, p).value, orbit_max(rho, sigma, p).value
            for k in range(1, 10):
                target = low + k * (high - low) / 10
                solution = solve_orbit_target(rho, sigma, target, p)
                margins.add(-abs(solution.achieved - target), f"pair {i} {p} target {k}/10")
    return margins.outcome()


@register("orbit-path-continuity", "orbit-interval", tolerance=1e-8)
def check_orbit_path(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    p = ParamPoint.of(2.0, 1.5)
    jump_limit = 1e-2
    for i in range(min(ctx.config.pairs, 3)):
        rho, sigma = ctx.state(3), ctx.state(3)
        path = geodesic_path(rho, sigma, p)
        low, high = orbit_min(rho, sigma, p).value, orbit_max(rho, sigma, p).value
        values = [orbit_path_value(rho, sigma, path, t, p) for t in np.linspace(0.0, 1.0, 1001)]
        margins.add(-abs(values[0] - low), f"pair {i} start")
        margins.add(-abs(values[-1] - high), f"pair {i} end")
        largest_step = max(abs(b - a) for a, b in zip(values[:-1], values[1:]))
        margins.add(jump_limit - largest_step, f"pair {i} continuity")
    return margins.outcome()


@register("orbit-renyi-consistency", "orbit-renyi-extrema")
def check_orbit_renyi(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.orbit_pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(ORBIT_MIN_POINTS + ((0.5, 3.0),)):
                extrema = orbit_renyi_extrema(rho, sigma, p)
                high_f = renyi_from_fidelity(orbit_max(rho, sigma, p).value, p.alpha)
                if p.alpha > 1:
                    margins.add(-abs(extrema.max - high_f), f"d={d} pair {i} {p} max")
                    margins.add(-abs(extrema.min - renyi_from_fidelity(orbit_min(rho, sigma, p).value, p.alpha)), f"d={d} pair {i} {p} min")
                else:
                    margins.add(-abs(extrema.min - high_f), f"d={d} pair {i} {p} min")
                    if extrema.max is not None:
                        low_f = renyi_from_fidelity(orbit_min(rho, sigma, p).value, p.alpha)
                        margins.add(-abs(extrema.max - low_f), f"d={d} pair {i} {p} max")
        rho = ctx.state(d)
        pure = pure_state(haar_unitary(d, ctx.rng).matrix[:, 0])
        s = renyi_entropy(rho, pure, ParamPoint.of(2.0, 2.0))
        margins.add(0.0 if s == math.inf else -math.inf, f"d={d} support violation")
    return margins.outcome()


@register("uncovered-region", "orbit-extrema", informational=True)
def check_uncovered_region(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    notes = []
    for p in _points(((0.5, 2.0), (3.0, 1.0))):
        rho, sigma = ctx.state(3), ctx.state(3)
        mc = mc_orbit_extrema(rho, sigma, p, ctx.config.trials, ctx.config.refine_steps, ctx.rng)
        aligned = paired_value(rho, sigma, p.alpha, Pairing.ALIGNED)
        reversed_ = paired_value(rho, sigma, p.alpha, Pairing.REVERSED)
        candidate = min(aligned, reversed_)
        margins.add(mc.emp_min - candidate, f"{p} min vs smaller pairing")
        notes.append(f"{p}: empirical min {mc.emp_min:.9g}, pairings {aligned:.9g}/{reversed_:.9g}")
    return margins.outcome("; ".join(notes))


# -- channels ----------------------------------------------------------------------------


@register("unital-majorization", "unital-majorization")
def check_unital_majorization(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            channels = [
                identity_channel(d),
                pinching(haar_unitary(d, ctx.rng)),
                random_mixed_unitary(d, 3, ctx.rng),
            ]
            for channel in channels:
                for alpha in (0.5, 2.0):
                    report = unital_majorization_check(sigma, channel, rho, alpha)
                    margins.add(report.worst_margin, f"d={d} pair {i} alpha={alpha}")
    return margins.outcome()


@register("pure-state-extrema", "pure-state-extrema")
def check_pure_state_extrema(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        rho = ctx.state(d)
        for p in _points(((0.5, 0.5), (0.3, 0.8), (2.0, 1.5), (3.0, 2.5))):
            ext = pure_state_extrema(rho, p)
            env = mc_pure_state_extrema(rho, p, ctx.config.pure_samples, ctx.rng)
            if ext.kind == "min":
                margins.add(env.emp_min - ext.value, f"d={d} {p} envelope")
            else:
                margins.add(ext.value - env.emp_max, f"d={d} {p} envelope")
            achieved = alpha_z_fidelity(rho, ext.state, p, strict=False).fidelity
            margins.add(-abs(achieved - ext.value), f"d={d} {p} achiever")
    return margins.outcome()


@register("all-channel-min", "all-channel-extrema")
def check_all_channel_min(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(CONCAVE_POINTS):
                ext = channel_class_extrema(rho, sigma, ChannelClass.ALL, p)
                env = mc_channel_extrema(rho, sigma, p, ChannelClass.ALL, ctx.config.channel_samples, ctx.rng)
                margins.add(env.emp_min - ext.value, f"d={d} pair {i} {p} envelope")
                achieved = alpha_z_fidelity(rho, ext.channel.apply(sigma), p).fidelity
                margins.add(-abs(achieved - ext.value), f"d={d} pair {i} {p} achiever")
    return margins.outcome()


@register("all-channel-max", "all-channel-extrema", informational=True)
def check_all_channel_max(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3):
        rho, sigma = ctx.state(d), ctx.state(d)
        for p in _points(CONVEX_POINTS):
            ext = channel_class_extrema(rho, sigma, ChannelClass.ALL, p)
            env = mc_channel_extrema(rho, sigma, p, ChannelClass.ALL, ctx.config.channel_samples, ctx.rng)
            margins.add(ext.value - env.emp_max, f"d={d} {p}")
    return margins.outcome("lambda_max(rho) is the top-eigenvector replacement value; sampled channels may exceed it")


@register("replacement-channel", "replacement-channel", tolerance=1e-10)
def check_replacement(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for d in (2, 3, 4):
        for i in range(ctx.config.pairs):
            rho, sigma, tau = random_density(d, d, ctx.rng), random_density(d, d, ctx.rng), random_density(d, d, ctx.rng)
            image = replacement(tau).apply(rho)
            margins.add(-float(np.max(np.abs(image.matrix - tau.matrix))), f"d={d} sample {i} fixed point")
            for p in _points(((0.5, 0.5), (2.0, 1.5))):
                f = alpha_z_fidelity(rho, replacement(rho).apply(sigma), p).fidelity
                margins.add(-abs(f - 1.0), f"d={d} sample {i} {p}")
    return margins.outcome()


@register("mixed-unitary-extrema", "mixed-unitary-extrema")
def check_mixed_unitary(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    closure = ctx.config.trials >= CLOSURE_MIN_TRIALS
    attained = set()
    for d in (2, 3):
        for i in range(ctx.config.pairs):
            rho, sigma = ctx.state(d), ctx.state(d)
            for p in _points(((0.5, 0.5), (0.3, 0.8), (2.0, 1.5))):
                ext = channel_class_extrema(rho, sigma, ChannelClass.MIXED_UNITARY, p)
                env = mc_channel_extrema(
                    rho,
                    sigma,
                    p,
                    ChannelClass.MIXED_UNITARY,
                    ctx.config.channel_samples,
                    ctx.rng,
                    orbit_trials=ctx.config.trials,
                    refine_steps=ctx.config.refine_steps,
                )
                empirical = env.emp_min if ext.kind == "min" else env.emp_max
                sign = 1.0 if ext.kind == "min" else -1.0
                margins.add(sign * (empirical - ext.value), f"d={d} pair {i} {p} bound")
                if closure:
                    margins.add(ctx.config.mc_closure - abs(empirical - ext.value), f"d={d} pair {i} {p} closure")
                aligned = paired_value(rho, sigma, p.alpha, Pairing.ALIGNED)
                nearest = min(
                    (abs(empirical - ext.value), "reversed"), (abs(empirical - aligned), "aligned")
                )[1]
                attained.add(nearest)
    return margins.outcome(f"empirical extremum nearest to the {'/'.join(sorted(attained))} pairing")


# -- subspaces -----------------------------------------------------------------------------


def _nonempty_subsets(d: int) -> List[Tuple[int, ...]]:
    return [c for k in range(1, d + 1) for c in itertools.combinations(range(d), k)]


@register("subspace-commuting-formula", "subspace-bounds", tolerance=1e-10)
def check_subspace_commuting(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    d = 4
    projectors = [coordinate_subspace(d, axes) for axes in _nonempty_subsets(d)]
    points = [ParamPoint.of(a, z) for a in SUBSPACE_ALPHAS for z in (0.3, 1.0, 2.5)]
    for first, second in itertools.product(projectors, projectors):
        pair = SubspacePair.of(first, second)
        k = intersection_dim(pair)
        for p in points:
            t = subspace_fidelity_trace(pair, p).trace_quantity
            margins.add(-abs(t - commuting_subspace_formula(pair.m, pair.n, k, p.alpha)), f"m={pair.m} n={pair.n} {p}")
    return margins.outcome()


@register("subspace-bounds-sandwich", "subspace-bounds")
def check_subspace_sandwich(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    points = [ParamPoint.of(a, z) for a in SUBSPACE_ALPHAS for z in (0.5, 1.0, 2.0)]
    for i in range(500):
        d = 2 + i % 5
        m, n = int(ctx.rng.integers(1, d + 1)), int(ctx.rng.integers(1, d + 1))
        pair = SubspacePair.of(random_subspace(d, m, ctx.rng), random_subspace(d, n, ctx.rng))
        for p in points:
            t = subspace_fidelity_trace(pair, p).trace_quantity
            bounds = subspace_bounds(m, n, d, p.alpha)
            margins.add(min(t - bounds.lower, bounds.upper - t), f"sample {i} d={d} m={m} n={n} {p}")
    return margins.outcome()


@register("subspace-printed-bounds", "subspace-bounds", informational=True)
def check_subspace_printed(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(100):
        d = 2 + i % 4
        m, n = int(ctx.rng.integers(1, d + 1)), int(ctx.rng.integers(1, d + 1))
        pair = SubspacePair.of(random_subspace(d, m, ctx.rng), random_subspace(d, n, ctx.rng))
        p = ParamPoint.of(SUBSPACE_ALPHAS[i % 4], 1.5)
        t = subspace_fidelity_trace(pair, p).trace_quantity
        printed = printed_subspace_bounds(m, n, d, p.alpha, p.z)
        margins.add(min(t - printed.lower, printed.upper - t), f"sample {i} d={d} m={m} n={n} {p}")
    return margins.outcome("bounds with m^z in place of m^alpha, evaluated against the definitional T")


@register("compression-bounds", "compression-bounds")
def check_compression(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    points = _points(((0.5, 0.5), (0.3, 2.0), (2.0, 1.5)))
    for i in range(100):
        d = 2 + i % 4
        rho = ctx.state(d)
        n = int(ctx.rng.integers(1, d + 1))
        sigma_random = random_subspace(d, n, ctx.rng)
        for p in points:
            bounds = compression_bounds(rho, n, p)
            t = subspace_trace_against(rho, sigma_random, p)
            margins.add(min(t - bounds.lower, bounds.upper - t), f"sample {i} d={d} n={n} {p} sandwich")
            top = subspace_trace_against(rho, eigen_subspace(rho, n, top=True), p)
            bottom = subspace_trace_against(rho, eigen_subspace(rho, n, top=False), p)
            margins.add(-abs(top - bounds.upper), f"sample {i} d={d} n={n} {p} upper attained")
            margins.add(-abs(bottom - bounds.lower), f"sample {i} d={d} n={n} {p} lower attained")
    return margins.outcome()


def subspace_trace_against(rho: DensityMatrix, projector: SubspaceProjector, p: ParamPoint) -> float:
    """T(rho, P/n) with the support convention."""
    return alpha_z_fidelity(rho, subspace_state(projector), p, strict=False).trace_quantity


@register("compression-interlacing", "compression-bounds")
def check_interlacing(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(200):
        d = 2 + i % 5
        rho = random_density(d, d, ctx.rng)
        n = int(ctx.rng.integers(1, d + 1))
        p = _points(MODERATE_POINTS)[i % len(MODERATE_POINTS)]
        margins.add(interlacing_margin(rho, random_subspace(d, n, ctx.rng), p), f"sample {i} d={d} n={n} {p}")
    return margins.outcome()


@register("compression-printed-bounds", "compression-bounds", informational=True)
def check_compression_printed(ctx: CheckContext) -> CheckOutcome:
    margins = Margins()
    for i in range(100):
        d = 2 + i % 4
        rho = ctx.state(d)
        n = int(ctx.rng.integers(1, d + 1))
        p = _points(((0.5, 0.7), (2.0, 1.5)))[i % 2]
        t = subspace_trace_against(rho, random_subspace(d, n, ctx.rng), p)
        printed = printed_compression_bounds(rho, n, p)
        margins.add(min(t - printed.lower, printed.upper - t), f"sample {i} d={d} n={n} {p}")
    return margins.outcome("bounds with lambda^z in place of lambda^alpha; not asserted")


# -- runner --------------------------------------------------------------------------------


class SuiteRunner:
    """Runs the selected checks and collects one report per check in registry order."""

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.logger = get_logger(__name__)
        self.logger.debug(f"SuiteRunner initialized: seed={config.seed}, checks={config.checks}, workers={config.workers}")

    def selected(self) -> List[CheckSpec]:
        """Checks to run.

        Raises:
            ConfigError: unknown check id, or an anchor in the manifest has no check.
        """
        covered = {spec.anchor for spec in REGISTRY.values()}
        missing = [anchor for anchor in ANCHOR_MANIFEST if anchor not in covered]
        if missing:
            raise ConfigError(f"no registered check for: {', '.join(missing)}")
        if self.config.checks is None:
            return list(REGISTRY.values())
        unknown = [c for c in self.config.checks if c not in REGISTRY]
        if unknown:
            raise ConfigError(f"unknown check id: {', '.join(unknown)}")
        wanted = set(self.config.checks)
        return [spec for spec in REGISTRY.values() if spec.check_id in wanted]

    def run_check(self, spec: CheckSpec) -> VerificationReport:
        tolerance = spec.tolerance if spec.tolerance is not None else self.config.tolerance
        start = time.perf_counter()
        try:
            outcome = spec.func(CheckContext(self.config, spec.check_id))
            worst: Optional[float] = outcome.worst_margin
            samples, detail = outcome.samples, outcome.detail
        except Exception as e:
            self.logger.error(
                f"Check {spec.check_id} raised {type(e).__name__}: {e}",
                exc_info=self.logger.isEnabledFor(logging.DEBUG),
            )
            worst, samples, detail = None, 0, f"{type(e).__name__}: {e}"
        runtime_ms = int((time.perf_counter() - start) * 1000)

        if worst is not None and not math.isfinite(worst):
            detail = f"{detail}; non-finite margin {worst}" if detail else f"non-finite margin {worst}"
            failed_hard = worst < 0
            worst = None
        else:
            failed_hard = worst is None

        if spec.informational:
            passed = None
        else:
            passed = not failed_hard and worst is not None and worst >= -tolerance
        return VerificationReport(
            check_id=spec.check_id,
            anchor=spec.anchor,
            samples=samples,
            worst_margin=worst,
            passed=passed,
            seed=self.config.seed,
            runtime_ms=runtime_ms,
            tolerance=tolerance,
            informational=spec.informational,
            detail=detail,
        )

    def run(self) -> List[VerificationReport]:
        specs = self.selected()
        total = len(specs)
        self.logger.info(f"Running {total} checks with seed {self.config.seed}")

        def execute(item: Tuple[int, CheckSpec]) -> VerificationReport:
            idx, spec = item
            self.logger.info(f"[{idx}/{total}] Running check {spec.check_id} ({spec.anchor})")
            report = self.run_check(spec)
            status = "info" if report.passed is None else ("pass" if report.passed else "FAIL")
            self.logger.info(
                f"[{idx}/{total}] {spec.check_id}: {status}, worst margin {report.worst_margin}, {report.runtime_ms} ms"
            )
            return report

        items = list(enumerate(specs, start=1))
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                reports = list(pool.map(execute, items))
        else:
            reports = [execute(item) for item in items]

        summary = self.summary(reports)
        self.logger.info(
            f"Suite finished: {summary['passed']} passed, {summary['failed']} failed, "
            f"{summary['informational']} informational"
        )
        return reports

    @staticmethod
    def summary(reports: Sequence[VerificationReport]) -> Dict[str, int]:
        return {
            "total": len(reports),
            "passed": sum(1 for r in reports if r.passed is True),
            "failed": sum(1 for r in reports if r.passed is False),
            "informational": sum(1 for r in reports if r.passed is None),
        }


def run_property_suite(config: SuiteConfig) -> List[VerificationReport]:
    """Run the registered checks selected by ``config``; deterministic given the seed."""
    return SuiteRunner(config).run()


def suite_passed(reports: Sequence[VerificationReport]) -> bool:
    return all(r.passed is not False for r in reports)
