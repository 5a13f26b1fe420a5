"""Density matrices, unitaries, subspace projectors and their random samplers."""

from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict
from pydantic import ValidationError as PydanticValidationError

from .config import HERMITIAN_TOL, PROJECTOR_TOL, PSD_CLAMP, TRACE_TOL, UNITARY_TOL
from .errors import NotPSDError, ParameterError, ValidationError
from .linalg import as_matrix, eig_hermitian, hermitize, is_hermitian, is_unitary

SeedLike = Union[int, np.random.Generator, None]


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for the substream (seed, *stream).

    The same seed and stream key always reproduce the same draws, independent
    of how many other substreams were consumed before.
    """
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(sequence))


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(0 if seed is None else int(seed))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class UnitaryMatrix(BaseModel):
    """Element of U(d)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @classmethod
    def from_array(cls, u: Any) -> "UnitaryMatrix":
        a = as_matrix(u, "unitary")
        if not is_unitary(a, tol=UNITARY_TOL):
            raise ValidationError("matrix is not unitary within 1e-10")
        return cls(matrix=_frozen(a))

    @classmethod
    def identity(cls, d: int) -> "UnitaryMatrix":
        return cls(matrix=_frozen(np.eye(d)))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(matrix=_frozen(self.matrix.conj().T))

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(matrix=_frozen(self.matrix @ other.matrix))


class DensityMatrix(BaseModel):
    """Positive semi-definite unit-trace state with its spectrum cached.

    ``eigenbasis`` columns are ordered like ``spectrum_desc``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    spectrum_desc: np.ndarray
    spectrum_asc: np.ndarray
    eigenbasis: np.ndarray

    @classmethod
    def from_matrix(cls, a: Any) -> "DensityMatrix":
        """Validate and build a state.

        Raises:
            ValidationError: non-square, non-Hermitian or trace not 1.
            NotPSDError: eigenvalue below -1e-10.
        """
        m = as_matrix(a, "density matrix")
        if not is_hermitian(m, tol=HERMITIAN_TOL):
            raise ValidationError("density matrix is not Hermitian within 1e-12")
        m = hermitize(m)
        trace = float(np.trace(m).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {trace:.12g}, expected 1")
        eig = eig_hermitian(m)
        if eig.eigenvalues[-1] < -PSD_CLAMP:
            raise NotPSDError(
                f"density matrix has eigenvalue {eig.eigenvalues[-1]:.3e} below -{PSD_CLAMP:g}"
            )
        desc = np.clip(eig.eigenvalues, 0.0, None)
        desc.setflags(write=False)
        asc = desc[::-1].copy()
        asc.setflags(write=False)
        return cls(
            matrix=_frozen(m),
            spectrum_desc=desc,
            spectrum_asc=asc,
            eigenbasis=_frozen(eig.eigenvectors),
        )

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.spectrum_desc > PSD_CLAMP))

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.dim

    def support_basis(self) -> np.ndarray:
        return self.eigenbasis[:, : self.rank]

    def support_projector(self) -> np.ndarray:
        b = self.support_basis()
        return b @ b.conj().T

    def evolve(self, u: Union[UnitaryMatrix, np.ndarray]) -> "DensityMatrix":
        """U rho U*."""
        m = u.matrix if isinstance(u, UnitaryMatrix) else as_matrix(u, "unitary")
        return DensityMatrix.from_matrix(hermitize(m @ self.matrix @ m.conj().T))


class SubspaceProjector(BaseModel):
    """Orthogonal projector P onto an m-dimensional subspace."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    rank: int
    basis: np.ndarray

    @classmethod
    def from_basis(cls, columns: Any) -> "SubspaceProjector":
        """Projector onto the span of the given d x m columns."""
        b = np.asarray(columns, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[1] == 0 or b.shape[1] > b.shape[0]:
            raise ValidationError(f"subspace basis must be d x m with 1 <= m <= d, got {b.shape}")
        q = scipy.linalg.orth(b)
        if q.shape[1] != b.shape[1]:
            raise ValidationError("subspace basis columns are linearly dependent")
        return cls(matrix=_frozen(hermitize(q @ q.conj().T)), rank=q.shape[1], basis=_frozen(q))

    @classmethod
    def from_matrix(cls, a: Any) -> "SubspaceProjector":
        p = as_matrix(a, "projector")
        if not is_hermitian(p, tol=PROJECTOR_TOL):
            raise ValidationError("projector is not Hermitian")
        if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
            raise ValidationError("projector is not idempotent within 1e-10")
        trace = float(np.trace(p).real)
        rank = int(round(trace))
        if rank < 1 or abs(trace - rank) > 1e-8:
            raise ValidationError(f"projector trace {trace:.12g} is not a positive integer")
        eig = eig_hermitian(p)
        return cls(matrix=_frozen(hermitize(p)), rank=rank, basis=_frozen(eig.eigenvectors[:, :rank]))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def _validate_probs(probs: Sequence[float], name: str = "probabilities") -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError(f"{name} must be a non-empty vector")
    if np.any(p < 0):
        raise ValidationError(f"{name} has a negative entry")
    if abs(float(p.sum()) - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} sum to {p.sum():.12g}, expected 1")
    return p


def density_from_spectrum(probs: Sequence[float], basis: Optional[UnitaryMatrix] = None) -> DensityMatrix:
    """basis . diag(probs) . basis*; the identity basis when none is given."""
    p = _validate_probs(probs)
    if basis is None:
        return DensityMatrix.from_matrix(np.diag(p).astype(complex))
    if basis.dim != p.size:
        raise ValidationError(f"basis dimension {basis.dim} does not match {p.size} probabilities")
    u = basis.matrix
    return DensityMatrix.from_matrix(hermitize((u * p) @ u.conj().T))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(d: int, rank: Optional[int] = None, seed: SeedLike = None) -> DensityMatrix:
    """G G* / Tr(G G*) for a d x rank complex Gaussian G."""
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ParameterError(f"rank must lie in [1, {d}], got {rank}")
    g = _ginibre(as_rng(seed), d, rank)
    m = g @ g.conj().T
    return DensityMatrix.from_matrix(hermitize(m / np.trace(m).real))


def haar_unitaries(d: int, count: int, seed: SeedLike = None) -> np.ndarray:
    """Stack of ``count`` Haar-distributed d x d unitaries."""
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    rng = as_rng(seed)
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary(d: int, seed: SeedLike = None) -> UnitaryMatrix:
    """QR of a complex Ginibre matrix with the R-diagonal phases folded into Q."""
    return UnitaryMatrix(matrix=_frozen(haar_unitaries(d, 1, seed)[0]))


def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    psi = np.asarray(vector, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ValidationError("pure state vector is zero")
    psi = psi / norm
    return DensityMatrix.from_matrix(np.outer(psi, psi.conj()))


def haar_pure_state(d: int, seed: SeedLike = None) -> DensityMatrix:
    return pure_state(haar_unitary(d, seed).matrix[:, 0])


def maximally_mixed(d: int) -> DensityMatrix:
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    return DensityMatrix.from_matrix(np.eye(d, dtype=complex) / d)


def subspace_state(projector: SubspaceProjector) -> DensityMatrix:
    """P / m."""
    if projector.rank < 1:
        raise ValidationError("subspace state needs a projector of positive rank")
    return DensityMatrix.from_matrix(projector.matrix / projector.rank)


def mix_states(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    w = _validate_probs(weights, "weights")
    if len(states) != w.size:
        raise ValidationError("one weight per state is required")
    return DensityMatrix.from_matrix(sum(wi * s.matrix for wi, s in zip(w, states)))


class MatrixPayload(BaseModel):
    """JSON matrix format: {"dim": d, "entries": [[[re, im], ...], ...]}, row-major."""

    dim: int
    entries: List[List[Union[Tuple[float, float], float]]]


def matrix_to_json(a: Any) -> Dict[str, Any]:
    m = as_matrix(a)
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(x.real), float(x.imag)] for x in row] for row in m],
    }


def matrix_from_json(obj: Any) -> np.ndarray:
    """Decode the JSON matrix format.

    Raises:
        ValidationError: naming the offending field.
    """
    try:
        payload = MatrixPayload.model_validate(obj)
    except PydanticValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(part) for part in err["loc"])
        raise ValidationError(f"malformed matrix field '{field}': {err['msg']}")
    d = payload.dim
    if d < 1:
        raise ValidationError("malformed matrix field 'dim': must be positive")
    if len(payload.entries) != d or any(len(row) != d for row in payload.entries):
        raise ValidationError(f"malformed matrix field 'entries': expected {d} x {d}")
    out = np.empty((d, d), dtype=complex)
    for i, row in enumerate(payload.entries):
        for j, x in enumerate(row):
            out[i, j] = complex(x[0], x[1]) if isinstance(x, tuple) else complex(x, 0.0)
    return out


def state_from_json(obj: Any) -> DensityMatrix:
    return DensityMatrix.from_matrix(matrix_from_json(obj))
