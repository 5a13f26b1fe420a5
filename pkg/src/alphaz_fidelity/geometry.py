"""Fidelity between subspace states P/m and the compression bounds for rho against P/n.

For rho = P_m/m and sigma = P_n/n the trace quantity reduces to
n^(alpha-1) m^(-alpha) Tr[(P_n P_m P_n)^z], which depends on the principal
angles only; for commuting projectors it is dim(S_m & S_n) m^(-alpha) n^(alpha-1).
"""

from typing import Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from .errors import ParameterError, ValidationError
from .fidelity import ParamPoint, alpha_z_fidelity
from .linalg import commutator_norm, hermitize, spectral_map, support_power
from .logging_config import get_logger
from .states import DensityMatrix, SeedLike, SubspaceProjector, haar_unitary, subspace_state

logger = get_logger(__name__)

INTERSECTION_TOL = 1e-8
COMMUTING_PROJECTOR_TOL = 1e-10


class Bounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float

    def contains(self, value: float, tolerance: float = 0.0) -> bool:
        return self.lower - tolerance <= value <= self.upper + tolerance


class SubspacePair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    first: SubspaceProjector
    second: SubspaceProjector

    @classmethod
    def of(cls, first: SubspaceProjector, second: SubspaceProjector) -> "SubspacePair":
        if first.dim != second.dim:
            raise ValidationError(f"subspaces live in different dimensions: {first.dim} vs {second.dim}")
        return cls(first=first, second=second)

    @property
    def m(self) -> int:
        return self.first.rank

    @property
    def n(self) -> int:
        return self.second.rank

    @property
    def dim(self) -> int:
        return self.first.dim

    def commutes(self) -> bool:
        return commutator_norm(self.first.matrix, self.second.matrix) <= COMMUTING_PROJECTOR_TOL


class SubspaceFidelity(BaseModel):
    model_config = ConfigDict(frozen=True)

    trace_quantity: float
    support_warning: bool


def subspace_fidelity_trace(pair: SubspacePair, p: ParamPoint) -> SubspaceFidelity:
    """T(P_m/m, P_n/n); for alpha > 1 without S_m inside S_n the support-restricted value is flagged."""
    value = alpha_z_fidelity(subspace_state(pair.first), subspace_state(pair.second), p, strict=False)
    return SubspaceFidelity(trace_quantity=value.trace_quantity, support_warning=value.support_violation)


def _check_dims(m: int, n: int, d: int) -> None:
    if not (1 <= m <= d and 1 <= n <= d):
        raise ValidationError(f"subspace dimensions must satisfy 1 <= m, n <= d, got m={m}, n={n}, d={d}")


def commuting_subspace_formula(m: int, n: int, dim_intersection: int, alpha: float) -> float:
    """dim(S_m & S_n) m^(-alpha) n^(alpha-1), independent of z."""
    if m < 1 or n < 1:
        raise ValidationError(f"subspace dimensions must be positive, got m={m}, n={n}")
    if not 0 <= dim_intersection <= min(m, n):
        raise ValidationError(f"intersection dimension {dim_intersection} outside [0, {min(m, n)}]")
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    return dim_intersection * m ** (-alpha) * n ** (alpha - 1)


def subspace_bounds(m: int, n: int, d: int, alpha: float) -> Bounds:
    """max(m+n-d, 0) and min(m, n), each times m^(-alpha) n^(alpha-1)."""
    _check_dims(m, n, d)
    scale = m ** (-alpha) * n ** (alpha - 1)
    return Bounds(lower=max(m + n - d, 0) * scale, upper=min(m, n) * scale)


def printed_subspace_bounds(m: int, n: int, d: int, alpha: float, z: float) -> Bounds:
    """The same counts divided by m^z n^(1-alpha)."""
    _check_dims(m, n, d)
    scale = m ** (-z) * n ** (alpha - 1)
    return Bounds(lower=max(m + n - d, 0) * scale, upper=min(m, n) * scale)


def _check_compression(rho: DensityMatrix, n: int) -> None:
    if not 1 <= n <= rho.dim:
        raise ValidationError(f"compression rank must lie in [1, {rho.dim}], got {n}")


def compression_bounds(rho: DensityMatrix, n: int, p: ParamPoint) -> Bounds:
    """Bounds on T(rho, P/n) over rank-n projectors P.

    n^(alpha-1) times the sum of the bottom-n (lower) or top-n (upper)
    eigenvalues of rho raised to alpha.
    """
    _check_compression(rho, n)
    powered = support_power(rho.spectrum_desc, p.alpha)
    scale = n ** (p.alpha - 1)
    return Bounds(lower=scale * float(powered[-n:].sum()), upper=scale * float(powered[:n].sum()))


def printed_compression_bounds(rho: DensityMatrix, n: int, p: ParamPoint) -> Bounds:
    _check_compression(rho, n)
    powered = support_power(rho.spectrum_desc, p.z)
    scale = n ** (p.alpha - 1)
    return Bounds(lower=scale * float(powered[-n:].sum()), upper=scale * float(powered[:n].sum()))


def eigen_subspace(rho: DensityMatrix, n: int, top: bool = True) -> SubspaceProjector:
    """Span of the top-n or bottom-n eigenvectors of rho."""
    _check_compression(rho, n)
    basis = rho.eigenbasis[:, :n] if top else rho.eigenbasis[:, rho.dim - n :]
    return SubspaceProjector.from_basis(basis)


def intersection_dim(pair: SubspacePair) -> int:
    """Number of eigenvalues of P_m P_n P_m within 1e-8 of 1."""
    a = pair.first.matrix
    w = scipy.linalg.eigvalsh(hermitize(a @ pair.second.matrix @ a))
    return int(np.count_nonzero(np.abs(w - 1.0) <= INTERSECTION_TOL))


def interlacing_margin(rho: DensityMatrix, projector: SubspaceProjector, p: ParamPoint) -> float:
    """Worst Cauchy interlacing margin of the compression of rho^(alpha/z) onto the subspace.

    With lambda the spectrum of rho^(alpha/z) and mu that of its compression,
    both descending: lambda_{i+d-n} <= mu_i <= lambda_i.
    """
    if projector.dim != rho.dim:
        raise ValidationError(f"projector dimension {projector.dim} differs from state dimension {rho.dim}")
    a = spectral_map(rho.spectrum_desc, rho.eigenbasis, lambda w: support_power(w, p.rho_exponent))
    lam = support_power(rho.spectrum_desc, p.rho_exponent)
    q = projector.basis
    mu = scipy.linalg.eigvalsh(hermitize(q.conj().T @ a @ q))[::-1]
    n, d = projector.rank, rho.dim
    upper = lam[:n] - mu
    lower = mu - lam[d - n :]
    return float(min(upper.min(), lower.min()))


def coordinate_subspace(d: int, axes: Sequence[int]) -> SubspaceProjector:
    """span{e_i : i in axes}."""
    axes = list(axes)
    if not axes or len(set(axes)) != len(axes) or any(not 0 <= i < d for i in axes):
        raise ValidationError(f"axes must be distinct indices in [0, {d}), got {axes}")
    return SubspaceProjector.from_basis(np.eye(d, dtype=complex)[:, axes])


def random_subspace(d: int, m: int, seed: SeedLike = None) -> SubspaceProjector:
    """First m columns of a Haar unitary."""
    if not 1 <= m <= d:
        raise ParameterError(f"subspace rank must lie in [1, {d}], got {m}")
    return SubspaceProjector.from_basis(haar_unitary(d, seed).matrix[:, :m])
