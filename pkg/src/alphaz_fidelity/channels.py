"""CPTP channels in Kraus form and the channel-evolution extrema of the alpha-z-fidelity."""

import math
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from pydantic import ValidationError as PydanticValidationError

from .config import CHANNEL_TOL, PROJECTOR_TOL, TRACE_TOL
from .errors import ParameterError, PreconditionError, UnsupportedRegionError, ValidationError
from .fidelity import ParamPoint, Region, classical_fidelity, renyi_from_fidelity
from .linalg import as_matrix, hermitize
from .logging_config import get_logger
from .orbits import Pairing, achieving_unitary, paired_value
from .states import (
    DensityMatrix,
    SeedLike,
    UnitaryMatrix,
    as_rng,
    haar_unitaries,
    matrix_from_json,
    matrix_to_json,
    pure_state,
)

logger = get_logger(__name__)

CONCAVE_REGION = "0 < alpha < 1 with z >= max(alpha, 1 - alpha)"
CONVEX_REGION = "1 < alpha <= 2 with alpha/2 <= z <= alpha, or alpha >= 2 with alpha - 1 <= z <= alpha"


class ChannelTag(str, Enum):
    CPTP = "cptp"
    UNITAL = "unital"
    MIXED_UNITARY = "mixed-unitary"
    PINCHING = "pinching"
    REPLACEMENT = "replacement"


class ChannelClass(str, Enum):
    ALL = "all"
    MIXED_UNITARY = "mixed-unitary"


def _is_identity(a: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(a - np.eye(a.shape[0]))) <= tol)


def _derive_tags(ops: Sequence[np.ndarray]) -> FrozenSet[ChannelTag]:
    d = ops[0].shape[0]
    tags = {ChannelTag.CPTP}
    if _is_identity(sum(k @ k.conj().T for k in ops), CHANNEL_TOL):
        tags.add(ChannelTag.UNITAL)

    def scaled_isometry(k: np.ndarray) -> bool:
        g = k.conj().T @ k
        c = float(np.trace(g).real) / d
        return bool(np.max(np.abs(g - c * np.eye(d))) <= CHANNEL_TOL)

    if all(scaled_isometry(k) for k in ops):
        tags.add(ChannelTag.MIXED_UNITARY)

    def rank_one_projector(k: np.ndarray) -> bool:
        return (
            bool(np.max(np.abs(k - k.conj().T)) <= PROJECTOR_TOL)
            and bool(np.max(np.abs(k @ k - k)) <= PROJECTOR_TOL)
            and abs(float(np.trace(k).real) - 1.0) <= PROJECTOR_TOL
        )

    if len(ops) == d and all(rank_one_projector(k) for k in ops):
        tags.add(ChannelTag.PINCHING)

    # Constant output: Phi(|i><j|) = delta_ij * tau for every basis pair.
    images = [[sum(np.outer(k[:, i], k[:, j].conj()) for k in ops) for j in range(d)] for i in range(d)]
    tau = images[0][0]
    constant = all(
        np.max(np.abs(images[i][j] - (tau if i == j else 0))) <= CHANNEL_TOL for i in range(d) for j in range(d)
    )
    if constant:
        tags.add(ChannelTag.REPLACEMENT)
    return frozenset(tags)


class KrausChannel(BaseModel):
    """Phi(X) = sum_i K_i X K_i*, trace preserving, with tags re-derived from the operators."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kraus_ops: Tuple[np.ndarray, ...]
    class_tags: FrozenSet[ChannelTag]

    @classmethod
    def from_kraus(cls, ops: Sequence[Any], tags: Optional[Sequence[Union[str, ChannelTag]]] = None) -> "KrausChannel":
        """Validate a Kraus family and derive its class tags.

        Raises:
            ValidationError: empty family, shape mismatch, not trace preserving,
                or a requested tag the operators do not satisfy.
        """
        if len(ops) == 0:
            raise ValidationError("a channel needs at least one Kraus operator")
        mats = [as_matrix(k, f"kraus[{i}]") for i, k in enumerate(ops)]
        d = mats[0].shape[0]
        if any(k.shape != (d, d) for k in mats):
            raise ValidationError("all Kraus operators must share the same square shape")
        if not _is_identity(sum(k.conj().T @ k for k in mats), CHANNEL_TOL):
            raise ValidationError("Kraus operators are not trace preserving within 1e-9")
        for k in mats:
            k.setflags(write=False)
        derived = _derive_tags(mats)
        if tags is not None:
            try:
                requested = {ChannelTag(t) for t in tags}
            except ValueError as e:
                raise ValidationError(f"unknown channel tag: {e}")
            missing = requested - derived
            if missing:
                names = ", ".join(sorted(t.value for t in missing))
                raise ValidationError(f"channel does not satisfy requested tags: {names}")
        return cls(kraus_ops=tuple(mats), class_tags=derived)

    @property
    def dim(self) -> int:
        return int(self.kraus_ops[0].shape[0])

    def has(self, tag: ChannelTag) -> bool:
        return tag in self.class_tags

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        return sum(k @ x @ k.conj().T for k in self.kraus_ops)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dim != self.dim:
            raise ValidationError(f"channel acts on dimension {self.dim}, state has {rho.dim}")
        return DensityMatrix.from_matrix(hermitize(self.apply_matrix(rho.matrix)))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel.from_kraus([np.eye(d, dtype=complex)])


def mixed_unitary(probs: Sequence[float], unitaries: Sequence[Union[UnitaryMatrix, np.ndarray]]) -> KrausChannel:
    """sum_i p_i U_i (.) U_i* with Kraus operators sqrt(p_i) U_i."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0 or p.size != len(unitaries):
        raise ValidationError("one probability per unitary is required")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > TRACE_TOL:
        raise ValidationError("mixture weights must be non-negative and sum to 1")
    mats = [u if isinstance(u, UnitaryMatrix) else UnitaryMatrix.from_array(u) for u in unitaries]
    ops = [math.sqrt(pi) * u.matrix for pi, u in zip(p, mats) if pi > 0]
    return KrausChannel.from_kraus(ops)


def heisenberg_weyl(d: int) -> List[UnitaryMatrix]:
    """The d^2 displacement operators X^a Z^b."""
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    out = []
    for a in range(d):
        xa = np.linalg.matrix_power(shift, a)
        for b in range(d):
            out.append(UnitaryMatrix.from_array(xa @ np.linalg.matrix_power(clock, b)))
    return out


def pinching(basis: UnitaryMatrix) -> KrausChannel:
    """Phi(K) = sum_i <b_i|K|b_i> |b_i><b_i|."""
    b = basis.matrix
    return KrausChannel.from_kraus([np.outer(b[:, i], b[:, i].conj()) for i in range(basis.dim)])


def replacement(tau: DensityMatrix) -> KrausChannel:
    """Phi(X) = Tr(X) tau, with Kraus operators sqrt(lambda_j) |v_j><i|."""
    d = tau.dim
    ops = []
    for lam, v in zip(tau.spectrum_desc, tau.eigenbasis.T):
        if lam <= 0:
            continue
        for i in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[:, i] = math.sqrt(lam) * v
            ops.append(k)
    return KrausChannel.from_kraus(ops)


def random_cptp(d: int, kraus_count: int, seed: SeedLike = None) -> KrausChannel:
    """Kraus blocks of a Haar isometry from C^d into C^(d*k)."""
    if kraus_count < 1:
        raise ParameterError(f"kraus_count must be at least 1, got {kraus_count}")
    w = haar_unitaries(d * kraus_count, 1, seed)[0][:, :d]
    return KrausChannel.from_kraus([w[i * d : (i + 1) * d, :] for i in range(kraus_count)])


def random_mixed_unitary(d: int, count: int, seed: SeedLike = None) -> KrausChannel:
    """Dirichlet(1, ..., 1) mixture of ``count`` Haar unitaries."""
    if count < 1:
        raise ParameterError(f"count must be at least 1, got {count}")
    rng = as_rng(seed)
    weights = rng.dirichlet(np.ones(count)) if count > 1 else np.ones(1)
    return mixed_unitary(weights, list(haar_unitaries(d, count, rng)))


class PureStateExtremum(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    kind: str
    state: DensityMatrix


class ChannelExtremum(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    kind: str
    channel_class: ChannelClass
    channel: KrausChannel
    description: str
    proven: bool = True


def _eigenprojector_state(rho: DensityMatrix, index: int) -> DensityMatrix:
    return pure_state(rho.eigenbasis[:, index])


def pure_state_extrema(rho: DensityMatrix, p: ParamPoint) -> PureStateExtremum:
    """min over pure sigma in the concave region (lambda_min) or max in the convex region (lambda_max).

    The pure-state value is <psi| rho^(alpha/z) |psi>^(z/alpha) with the support
    convention, so the extremum sits at the bottom or top eigenvector of rho.

    Raises:
        UnsupportedRegionError: (alpha, z) in neither region.
    """
    region = p.region
    if region is Region.CONCAVE:
        return PureStateExtremum(
            value=float(rho.spectrum_desc[-1]), kind="min", state=_eigenprojector_state(rho, rho.dim - 1)
        )
    if region is Region.CONVEX_DPI:
        return PureStateExtremum(value=float(rho.spectrum_desc[0]), kind="max", state=_eigenprojector_state(rho, 0))
    raise UnsupportedRegionError(
        f"pure-state extrema are not covered at {p}; proven for {CONCAVE_REGION} (min) or {CONVEX_REGION} (max)",
        stated_region=f"{CONCAVE_REGION}; {CONVEX_REGION}",
    )


def channel_class_extrema(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    channel_class: Union[ChannelClass, str],
    p: ParamPoint,
) -> ChannelExtremum:
    """Extremum of F(rho, Phi(sigma)) over a channel class.

    All channels: lambda_min(rho) in the concave region, the minimum, reached by
    replacing sigma with the bottom eigenvector of rho. In the convex region the
    top-eigenvector replacement gives lambda_max(rho), but full-rank images with
    small eigenvalues exceed it, so that value is returned with proven=False.
    Mixed-unitary channels: F^C(lambda_desc(rho), lambda_asc(sigma)) in
    both regions, reached by the reversed-pairing unitary channel.

    Raises:
        UnsupportedRegionError: (alpha, z) in neither region.
        PreconditionError: mixed-unitary maximum with rank-deficient sigma.
    """
    cls = ChannelClass(channel_class)
    region = p.region
    if region is Region.NEITHER:
        raise UnsupportedRegionError(
            f"channel extrema are not covered at {p}; proven for {CONCAVE_REGION} (min) or {CONVEX_REGION} (max)",
            stated_region=f"{CONCAVE_REGION}; {CONVEX_REGION}",
        )
    kind = "min" if region is Region.CONCAVE else "max"
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")

    if cls is ChannelClass.ALL:
        target = pure_state_extrema(rho, p)
        channel = replacement(target.state)
        if kind == "min":
            return ChannelExtremum(
                value=target.value,
                kind=kind,
                channel_class=cls,
                channel=channel,
                description="replacement by the bottom eigenvector of rho",
            )
        logger.warning(
            f"lambda_max(rho) at {p} is the replacement-channel value, not a maximum over all channels"
        )
        return ChannelExtremum(
            value=target.value,
            kind=kind,
            channel_class=cls,
            channel=channel,
            description="replacement by the top eigenvector of rho; not the maximum over all channels",
            proven=False,
        )

    if kind == "max" and not sigma.is_full_rank:
        raise PreconditionError("the mixed-unitary maximum needs a full-rank sigma")
    value = paired_value(rho, sigma, p.alpha, Pairing.REVERSED)
    u = achieving_unitary(rho, sigma, Pairing.REVERSED)
    logger.debug(f"mixed-unitary {kind} {p}: {value:.17g}")
    return ChannelExtremum(
        value=value,
        kind=kind,
        channel_class=cls,
        channel=mixed_unitary([1.0], [u]),
        description="unitary channel pairing descending rho with ascending sigma",
    )


def channel_class_renyi_extrema(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    channel_class: Union[ChannelClass, str],
    p: ParamPoint,
) -> float:
    """Maximum of S_{alpha,z}(rho || Phi(sigma)) over the class, from the fidelity extremum."""
    if p.alpha == 1:
        raise ParameterError("S_{alpha,z} is not defined at alpha = 1")
    return renyi_from_fidelity(channel_class_extrema(rho, sigma, channel_class, p).value, p.alpha)


def majorization_margins(x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """sum_{i<=k} y_desc - sum_{i<=k} x_desc for k = 1..d-1; all >= 0 iff x is majorized by y."""
    xs = np.sort(np.asarray(x, dtype=float))[::-1]
    ys = np.sort(np.asarray(y, dtype=float))[::-1]
    if xs.shape != ys.shape:
        raise ValidationError("majorization needs vectors of equal length")
    return (np.cumsum(ys) - np.cumsum(xs))[:-1]


def _difference(larger: float, smaller: float) -> float:
    if math.isinf(larger) and math.isinf(smaller):
        return 0.0
    return larger - smaller


class MajorizationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    partial_sum_margins: List[float]
    fidelity_margin: Optional[float] = None
    worst_margin: float

    def holds(self, tolerance: float) -> bool:
        return self.worst_margin >= -tolerance


def unital_majorization_check(
    sigma: DensityMatrix,
    channel: KrausChannel,
    rho: Optional[DensityMatrix] = None,
    alpha: Optional[float] = None,
) -> MajorizationReport:
    """Margins for Phi(sigma) majorized by sigma and, given rho and alpha, the induced fidelity comparison.

    With p = lambda_asc(rho): F^C(p, lambda_desc(Phi(sigma))) >= F^C(p, lambda_desc(sigma))
    for alpha < 1 and <= for alpha > 1.

    Raises:
        PreconditionError: the channel is not unital.
    """
    if not channel.has(ChannelTag.UNITAL):
        raise PreconditionError("the majorization check needs a unital channel")
    image = channel.apply(sigma)
    margins = majorization_margins(image.spectrum_desc, sigma.spectrum_desc)
    worst = float(margins.min()) if margins.size else 0.0

    fidelity_margin = None
    if rho is not None and alpha is not None:
        if alpha == 1:
            raise ParameterError("the fidelity comparison needs alpha != 1")
        after = classical_fidelity(rho.spectrum_asc, image.spectrum_desc, alpha)
        before = classical_fidelity(rho.spectrum_asc, sigma.spectrum_desc, alpha)
        fidelity_margin = _difference(after, before) if alpha < 1 else _difference(before, after)
        worst = min(worst, fidelity_margin)
    return MajorizationReport(
        partial_sum_margins=[float(m) for m in margins],
        fidelity_margin=fidelity_margin,
        worst_margin=worst,
    )


class ChannelPayload(BaseModel):
    """JSON channel format: {"dim": d, "kraus": [matrix, ...], "tags": [...]}."""

    dim: int
    kraus: List[Dict[str, Any]]
    tags: List[str] = []


def channel_to_json(channel: KrausChannel) -> Dict[str, Any]:
    return {
        "dim": channel.dim,
        "kraus": [matrix_to_json(k) for k in channel.kraus_ops],
        "tags": sorted(t.value for t in channel.class_tags),
    }


def channel_from_json(obj: Any) -> KrausChannel:
    """Decode and re-validate a channel; listed tags must hold for the operators."""
    try:
        payload = ChannelPayload.model_validate(obj)
    except PydanticValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(part) for part in err["loc"])
        raise ValidationError(f"malformed channel field '{field}': {err['msg']}")
    ops = [matrix_from_json(k) for k in payload.kraus]
    if any(k.shape[0] != payload.dim for k in ops):
        raise ValidationError("malformed channel field 'kraus': operator dimension differs from 'dim'")
    return KrausChannel.from_kraus(ops, tags=payload.tags)
