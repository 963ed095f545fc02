"""Dense complex linear algebra for small Hilbert spaces.

Operators are plain ``numpy`` arrays of ``complex128``. States and observable
bases are immutable wrappers that validate themselves on construction.

Tensor products use the composite index ``i * d2 + j`` for ``|i>|j>``, with
channel 1 as the major index. The ``eprb`` module relies on this.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import BasisError, DimensionMismatchError, NormalizationError

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
ZERO_NORM = 1e-14

ComplexMatrix = np.ndarray
VectorLike = Union["StateVector", np.ndarray, Sequence[complex]]


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def as_matrix(entries: Union[np.ndarray, Sequence[Sequence[complex]]]) -> ComplexMatrix:
    """Coerce entries into a non-empty 2-D complex matrix.

    Raises:
        DimensionMismatchError: If the entries do not form a rows x cols grid
    """
    try:
        matrix = np.array(entries, dtype=complex)
    except ValueError as e:
        raise DimensionMismatchError(f"Matrix entries are ragged: {e}")
    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise DimensionMismatchError(
            f"Matrix must be 2-dimensional and non-empty, got shape {matrix.shape}"
        )
    return matrix


def _as_vector(v: VectorLike) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.amplitudes
    return np.asarray(v, dtype=complex).reshape(-1)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over a d-dimensional Hilbert space."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1 or amplitudes.size < 1:
            raise DimensionMismatchError(
                f"State amplitudes must be a non-empty 1-D list, got shape {amplitudes.shape}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > TOLERANCE:
            raise NormalizationError(f"state not normalized (norm {norm:.12g})")
        object.__setattr__(self, "amplitudes", _readonly(amplitudes))

    @classmethod
    def from_amplitudes(cls, values: Iterable[complex]) -> "StateVector":
        return cls(np.array(list(values), dtype=complex))

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "StateVector":
        """Computational basis vector |index> in dimension ``dim``."""
        if not 0 <= index < dim:
            raise DimensionMismatchError(f"Index {index} out of range for dimension {dim}")
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def __len__(self) -> int:
        return self.dim

    def isclose(self, other: VectorLike, atol: float = TOLERANCE) -> bool:
        """Entrywise comparison, phase sensitive."""
        other_amps = _as_vector(other)
        return other_amps.shape == self.amplitudes.shape and bool(
            np.allclose(self.amplitudes, other_amps, rtol=0.0, atol=atol)
        )

    def equal_up_to_phase(self, other: VectorLike, atol: float = TOLERANCE) -> bool:
        other_amps = _as_vector(other)
        if other_amps.shape != self.amplitudes.shape:
            return False
        return abs(abs(np.vdot(self.amplitudes, other_amps)) - 1.0) < atol

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amplitudes, precision=6)})"


def norm(v: VectorLike) -> float:
    """Euclidean length of ``v``."""
    return float(np.linalg.norm(_as_vector(v)))


def normalize(v: VectorLike) -> StateVector:
    """Scale an unnormalized vector (e.g. a projection) to unit norm.

    Raises:
        NormalizationError: If the vector is numerically zero
    """
    amplitudes = _as_vector(v)
    length = float(np.linalg.norm(amplitudes))
    if length < ZERO_NORM:
        raise NormalizationError("cannot normalize a zero vector")
    return StateVector(amplitudes / length)


def canonical_phase(v: VectorLike) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real-positive.

    Ties within 1e-12 resolve to the lowest index.
    """
    amplitudes = np.array(_as_vector(v), dtype=complex)
    magnitudes = np.abs(amplitudes)
    peak = float(magnitudes.max())
    if peak < ZERO_NORM:
        return amplitudes
    pivot = int(np.flatnonzero(magnitudes >= peak - 1e-12)[0])
    phase = amplitudes[pivot] / magnitudes[pivot]
    rotated = amplitudes / phase
    rotated[pivot] = magnitudes[pivot]
    return rotated


def inner(u: VectorLike, v: VectorLike) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    a, b = _as_vector(u), _as_vector(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"inner: dimensions {a.size} and {b.size} differ")
    return complex(np.vdot(a, b))


def outer(u: VectorLike, v: VectorLike) -> ComplexMatrix:
    """|u><v| with entries u_i * conj(v_j)."""
    return np.outer(_as_vector(u), np.conj(_as_vector(v)))


def apply(m: ComplexMatrix, v: VectorLike) -> np.ndarray:
    """Matrix-vector product. The result is not normalized."""
    matrix = as_matrix(m)
    vector = _as_vector(v)
    if matrix.shape[1] != vector.size:
        raise DimensionMismatchError(
            f"apply: matrix has {matrix.shape[1]} columns, vector has dimension {vector.size}"
        )
    return matrix @ vector


def adjoint(m: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""
    return np.conj(as_matrix(m)).T


def max_abs_entry(m: ComplexMatrix) -> float:
    """Largest entry magnitude; 0 for an empty matrix."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def _require_square_pair(a: ComplexMatrix, b: ComplexMatrix) -> Tuple[np.ndarray, np.ndarray]:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionMismatchError(
            f"Operators must be square with equal dimensions, got {a.shape} and {b.shape}"
        )
    return a, b


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """[a, b] = ab - ba."""
    a, b = _require_square_pair(a, b)
    return a @ b - b @ a


def commutes(a: ComplexMatrix, b: ComplexMatrix, atol: float = TOLERANCE) -> bool:
    """True if every entry of [a, b] is below ``atol``.

    Args:
        a: Square matrix
        b: Square matrix of the same size
        atol: Entry tolerance

    Raises:
        DimensionMismatchError: If the matrices are not square of one size
    """
    return max_abs_entry(commutator(a, b)) < atol


def is_hermitian(m: ComplexMatrix, atol: float = TOLERANCE) -> bool:
    """Square and equal to its adjoint within ``atol``."""
    matrix = as_matrix(m)
    return matrix.shape[0] == matrix.shape[1] and max_abs_entry(matrix - adjoint(matrix)) < atol


def is_idempotent(m: ComplexMatrix, atol: float = TOLERANCE) -> bool:
    """Square with m @ m = m within ``atol``."""
    matrix = as_matrix(m)
    return matrix.shape[0] == matrix.shape[1] and max_abs_entry(matrix @ matrix - matrix) < atol


def tensor_state(u: StateVector, v: StateVector) -> StateVector:
    """|u>|v>; amplitude of (i, j) sits at ``i * v.dim + j``."""
    return StateVector(np.kron(u.amplitudes, v.amplitudes))


def tensor_operator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """a (x) b acting on the composite space, same index convention as tensor_state."""
    return np.kron(as_matrix(a), as_matrix(b))


@dataclass(frozen=True, eq=False)
class ObservableBasis:
    """Orthonormal eigenvectors (matrix columns) with real eigenvalues.

    Eigenvalues may repeat; repeated values form a degenerate eigenspace.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray
    name: str = "K"

    def __post_init__(self) -> None:
        vectors = np.array(self.eigenvectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1] or vectors.shape[0] < 1:
            raise DimensionMismatchError(
                f"Eigenvector matrix must be square, got shape {vectors.shape}"
            )
        values = np.array(self.eigenvalues)
        if values.shape != (vectors.shape[0],):
            raise DimensionMismatchError(
                f"Expected {vectors.shape[0]} eigenvalues, got {values.size}"
            )
        if np.iscomplexobj(values):
            if np.max(np.abs(values.imag)) > TOLERANCE:
                raise BasisError("Eigenvalues must be real")
            values = values.real
        values = np.array(values, dtype=float)
        gram = np.conj(vectors).T @ vectors
        if max_abs_entry(gram - np.eye(vectors.shape[0])) > TOLERANCE:
            raise BasisError(f"Eigenvectors of '{self.name}' are not orthonormal")
        object.__setattr__(self, "eigenvectors", _readonly(vectors))
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        if not is_hermitian(self.observable()):
            raise BasisError(f"Observable '{self.name}' is not Hermitian")

    @classmethod
    def from_vectors(
        cls,
        vectors: Sequence[VectorLike],
        eigenvalues: Sequence[float],
        name: str = "K",
    ) -> "ObservableBasis":
        """Build from a list of eigenvectors (one per entry)."""
        columns = np.array([_as_vector(v) for v in vectors], dtype=complex).T
        return cls(columns, np.array(eigenvalues, dtype=float), name)

    @classmethod
    def computational(
        cls, dim: int, eigenvalues: Optional[Sequence[float]] = None, name: str = "K"
    ) -> "ObservableBasis":
        """Computational basis; eigenvalues default to 0..dim-1."""
        values = np.arange(dim, dtype=float) if eigenvalues is None else eigenvalues
        return cls(np.eye(dim, dtype=complex), np.array(values, dtype=float), name)

    @property
    def dim(self) -> int:
        return int(self.eigenvectors.shape[0])

    def vector(self, index: int) -> StateVector:
        if not 0 <= index < self.dim:
            raise DimensionMismatchError(
                f"Eigen-index {index} out of range for '{self.name}' (dimension {self.dim})"
            )
        return StateVector(self.eigenvectors[:, index])

    def observable(self) -> ComplexMatrix:
        """K = sum_l k_l |k_l><k_l|."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ np.conj(v).T

    def projector(self, indices: Iterable[int]) -> ComplexMatrix:
        selected = sorted(indices)
        if not selected:
            return np.zeros((self.dim, self.dim), dtype=complex)
        v = self.eigenvectors[:, selected]
        return v @ np.conj(v).T

    def coefficients(self, psi: VectorLike) -> np.ndarray:
        """Expansion coefficients <k_l|psi>."""
        amplitudes = _as_vector(psi)
        if amplitudes.size != self.dim:
            raise DimensionMismatchError(
                f"State dimension {amplitudes.size} does not match basis '{self.name}' ({self.dim})"
            )
        return np.conj(self.eigenvectors).T @ amplitudes

    def indices_of(self, eigenvalue: float, atol: float = TOLERANCE) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(np.abs(self.eigenvalues - eigenvalue) < atol))

    def eigenspaces(self) -> List[Tuple[float, Tuple[int, ...]]]:
        """Distinct eigenvalues with their eigen-indices, in first-occurrence order."""
        spaces: List[Tuple[float, Tuple[int, ...]]] = []
        seen = set()
        for index, value in enumerate(self.eigenvalues):
            if index in seen:
                continue
            members = self.indices_of(float(value))
            seen.update(members)
            spaces.append((float(value), members))
        return spaces

    def same_as(self, other: "ObservableBasis", atol: float = TOLERANCE) -> bool:
        if self is other:
            return True
        return (
            self.dim == other.dim
            and np.allclose(self.eigenvectors, other.eigenvectors, rtol=0.0, atol=atol)
            and np.allclose(self.eigenvalues, other.eigenvalues, rtol=0.0, atol=atol)
        )

    def renamed(self, name: str) -> "ObservableBasis":
        return ObservableBasis(self.eigenvectors, self.eigenvalues, name)

    def __repr__(self) -> str:
        return f"ObservableBasis(name={self.name!r}, dim={self.dim}, eigenvalues={list(self.eigenvalues)})"


def qubit_basis(angle: float, name: str = "K") -> ObservableBasis:
    """Dim-2 analyzer setting: (cos, sin) -> +1 and (-sin, cos) -> -1."""
    c, s = np.cos(angle), np.sin(angle)
    return ObservableBasis.from_vectors([[c, s], [-s, c]], [1.0, -1.0], name)


def fourier_basis(dim: int, name: str = "F") -> ObservableBasis:
    """Discrete Fourier basis, eigenvalues 0..dim-1."""
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    columns = np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)
    return ObservableBasis(columns, np.arange(dim, dtype=float), name)


def complete_basis(
    first: StateVector,
    eigenvalues: Optional[Sequence[float]] = None,
    name: str = "K'",
) -> ObservableBasis:
    """Orthonormal basis whose eigenvector 0 is ``first``.

    Modified Gram-Schmidt against the computational vectors e_0, e_1, ...
    in order, skipping any that fall (numerically) into the span so far.
    Eigenvalues default to 1 for ``first`` and 0 for the complement.
    """
    dim = first.dim
    vectors = [np.array(first.amplitudes)]
    for seed in np.eye(dim, dtype=complex):
        if len(vectors) == dim:
            break
        candidate = seed.copy()
        for v in vectors:
            candidate = candidate - np.vdot(v, candidate) * v
        length = np.linalg.norm(candidate)
        if length > 1e-8:
            vectors.append(candidate / length)
    values = [1.0] + [0.0] * (dim - 1) if eigenvalues is None else list(eigenvalues)
    logger.debug("Completed basis %s from a %d-dimensional vector", name, dim)
    return ObservableBasis.from_vectors(vectors, values, name)


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    raw = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return normalize(raw)


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-random unitary via QR with phase correction."""
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(raw)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_basis(
    dim: int,
    rng: np.random.Generator,
    eigenvalues: Optional[Sequence[float]] = None,
    name: str = "K",
) -> ObservableBasis:
    """Basis given by the columns of a Haar-random unitary.

    Args:
        dim: Dimension of the space
        rng: Generator the unitary is drawn from
        eigenvalues: Eigenvalue per column; defaults to 0..dim-1
        name: Observable name

    Returns:
        Observable basis with the given eigenvalues
    """
    values = np.arange(dim, dtype=float) if eigenvalues is None else eigenvalues
    return ObservableBasis(random_unitary(dim, rng), np.array(values, dtype=float), name)
