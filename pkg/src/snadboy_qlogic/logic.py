"""Statements about observable values, represented by truth operators.

A statement "K is one of the eigenvalues indexed by S" over an observable
basis is the projector onto the span of those eigenvectors. Composition
(disjunction, negation, conjunction) always produces new statements.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List, Sequence

import numpy as np

from .exceptions import DimensionMismatchError, NoncommutingError, StatementError
from .hilbert import (
    TOLERANCE,
    ComplexMatrix,
    ObservableBasis,
    StateVector,
    apply,
    commutes,
    complete_basis,
    is_hermitian,
    is_idempotent,
    max_abs_entry,
)

logger = logging.getLogger(__name__)

# Classification band around 0 and 1 for three-valued truth.
TRUTH_BAND = 1e-9
# Amplitude magnitude below which an eigenvector counts as absent from a superposition.
SUPPORT_EPS = 1e-9


class Truth(str, Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class TruthValue:
    value: Truth
    expectation: float

    @classmethod
    def classify(cls, expectation: float) -> "TruthValue":
        if expectation > 1.0 - TRUTH_BAND:
            return cls(Truth.TRUE, expectation)
        if expectation < TRUTH_BAND:
            return cls(Truth.FALSE, expectation)
        return cls(Truth.INDETERMINATE, expectation)

    def __bool__(self) -> bool:
        return self.value is Truth.TRUE


@dataclass(frozen=True, eq=False)
class Statement:
    """Proposition "K in S" over one basis, with its truth operator.

    Use :func:`elementary`, :func:`by_eigenvalue` or :meth:`over` rather than
    building the projector by hand.
    """

    basis: ObservableBasis
    indices: FrozenSet[int]
    projector: ComplexMatrix

    def __post_init__(self) -> None:
        indices = frozenset(int(i) for i in self.indices)
        if any(not 0 <= i < self.basis.dim for i in indices):
            raise StatementError(
                f"Eigen-indices {sorted(indices)} out of range for basis '{self.basis.name}'"
            )
        projector = np.array(self.projector, dtype=complex)
        if projector.shape != (self.basis.dim, self.basis.dim):
            raise DimensionMismatchError(
                f"Projector shape {projector.shape} does not match basis dimension {self.basis.dim}"
            )
        if not is_hermitian(projector) or not is_idempotent(projector):
            raise StatementError("Truth operator must be Hermitian and idempotent")
        if max_abs_entry(projector - self.basis.projector(indices)) > TOLERANCE:
            raise StatementError("Truth operator does not match its eigen-index set")
        projector.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "projector", projector)

    @classmethod
    def over(cls, basis: ObservableBasis, indices: Iterable[int]) -> "Statement":
        selected = frozenset(indices)
        return cls(basis, selected, basis.projector(selected))

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_contradiction(self) -> bool:
        return not self.indices

    @property
    def is_tautology(self) -> bool:
        return len(self.indices) == self.basis.dim

    def same_as(self, other: "Statement") -> bool:
        return self.basis.same_as(other.basis) and self.indices == other.indices

    def __or__(self, other: "Statement") -> "Statement":
        return disjunction([self, other])

    def __and__(self, other: "Statement") -> "Statement":
        return conjunction(self, other)

    def __invert__(self) -> "Statement":
        return negation(self)

    def __repr__(self) -> str:
        return f"Statement({self.basis.name} in {sorted(self.indices)})"


def elementary(basis: ObservableBasis, index: int) -> Statement:
    """Truth operator |k_l><k_l| of "K = k_l"."""
    if not 0 <= index < basis.dim:
        raise StatementError(f"Eigen-index {index} out of range for basis '{basis.name}'")
    return Statement.over(basis, [index])


def by_eigenvalue(basis: ObservableBasis, value: float) -> Statement:
    """Statement "K = k", summing the projectors of a degenerate eigenspace."""
    indices = basis.indices_of(value)
    if not indices:
        raise StatementError(f"No eigenvalue {value} in basis '{basis.name}'")
    return Statement.over(basis, indices)


def tautology(basis: ObservableBasis) -> Statement:
    """Disjunction of every elementary statement of ``basis``; true on every state."""
    return disjunction([elementary(basis, index) for index in range(basis.dim)])


def disjunction(parts: Sequence[Statement]) -> Statement:
    """Disjunction of mutually exclusive statements over one basis.

    Raises:
        StatementError: On mixed bases or overlapping index sets
    """
    if not parts:
        raise StatementError("Disjunction needs at least one statement")
    basis = parts[0].basis
    union: set = set()
    projector = np.zeros((basis.dim, basis.dim), dtype=complex)
    for part in parts:
        if not part.basis.same_as(basis):
            raise StatementError("Disjunction of statements over different bases")
        overlap = union & part.indices
        if overlap:
            raise StatementError(
                f"Statements are not mutually exclusive (shared indices {sorted(overlap)})"
            )
        union |= part.indices
        projector = projector + part.projector
    if not is_idempotent(projector):
        raise StatementError("Disjunction projector is not idempotent")
    return Statement(basis, frozenset(union), projector)


def negation(statement: Statement) -> Statement:
    """Complement: every eigen-index not in the statement."""
    basis = statement.basis
    complement = frozenset(range(basis.dim)) - statement.indices
    return Statement(basis, complement, np.eye(basis.dim) - statement.projector)


def conjunction(a: Statement, b: Statement) -> Statement:
    """Conjunction of two statements over the same basis (index intersection).

    Raises:
        NoncommutingError: If the two observables do not commute
        StatementError: If the bases differ but commute
    """
    if a.basis.same_as(b.basis):
        return Statement.over(a.basis, a.indices & b.indices)
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Cannot combine dimensions {a.dim} and {b.dim}")
    if not commutes(a.basis.observable(), b.basis.observable()):
        raise NoncommutingError(
            f"Conjunction of statements about noncommuting observables "
            f"'{a.basis.name}' and '{b.basis.name}' has no meaning"
        )
    raise StatementError(
        f"Conjunction across distinct bases '{a.basis.name}' and '{b.basis.name}' is not supported"
    )


def state_statement(psi: StateVector, name: str = "L") -> Statement:
    """Statement "the system is in state psi", i.e. the projector |psi><psi|.

    The basis is completed from ``psi``; psi carries eigenvalue 1.
    """
    return Statement.over(complete_basis(psi, name=name), [0])


def _check_dims(statement: Statement, psi: StateVector) -> None:
    if statement.dim != psi.dim:
        raise DimensionMismatchError(
            f"Statement dimension {statement.dim} does not match state dimension {psi.dim}"
        )


def expectation(statement: Statement, psi: StateVector) -> float:
    """<psi|P|psi>, clipped into [0, 1].

    Args:
        statement: Statement whose projector is evaluated
        psi: State of the same dimension

    Returns:
        Probability that the statement is found true

    Raises:
        DimensionMismatchError: If the dimensions differ
        StatementError: If the expectation is not real
    """
    _check_dims(statement, psi)
    value = np.vdot(psi.amplitudes, statement.projector @ psi.amplitudes)
    if abs(value.imag) > 1e-12:
        raise StatementError(f"Expectation has imaginary part {value.imag:.3g}")
    return float(min(1.0, max(0.0, value.real)))


def truth_value(statement: Statement, psi: StateVector) -> TruthValue:
    return TruthValue.classify(expectation(statement, psi))


def support_statement(
    psi: StateVector, basis: ObservableBasis, eps: float = SUPPORT_EPS
) -> Statement:
    """Disjunction of the elementary statements represented in ``psi``.

    The result leaves ``psi`` invariant: P psi = psi within 1e-9.
    """
    if eps <= 0:
        raise StatementError("Support threshold must be positive")
    coefficients = basis.coefficients(psi)
    indices = [int(i) for i in np.flatnonzero(np.abs(coefficients) > eps)]
    if not indices:
        raise StatementError("State has no component above the support threshold")
    statement = Statement.over(basis, indices)
    residual = float(np.max(np.abs(apply(statement.projector, psi) - psi.amplitudes)))
    if residual > 1e-9:
        raise StatementError(
            f"Support threshold {eps:g} drops represented amplitudes (residual {residual:.3g})"
        )
    return statement


def support_is_minimal(statement: Statement, psi: StateVector, eps: float = SUPPORT_EPS) -> bool:
    """True if removing any index breaks P psi = psi by more than ``eps``."""
    for index in statement.indices:
        reduced = Statement.over(statement.basis, statement.indices - {index})
        residual = float(np.max(np.abs(apply(reduced.projector, psi) - psi.amplitudes)))
        if residual <= eps:
            return False
    return True


def elementary_truths(psi: StateVector, basis: ObservableBasis) -> List[TruthValue]:
    """Truth value of "K = k_l" on ``psi`` for each eigen-index l, in index order."""
    return [truth_value(elementary(basis, index), psi) for index in range(basis.dim)]


def indeterminacy_witness(
    psi: StateVector, basis: ObservableBasis, eps: float = SUPPORT_EPS
) -> bool:
    """True iff psi spreads over more than one K-eigenvector and every
    elementary K-statement is indeterminate on it.

    A superposition over only part of the basis is not a witness: the
    statements about eigenvectors outside its support evaluate false.

    Args:
        psi: State to test
        basis: Observable basis K
        eps: Support threshold on |<k_l|psi>|

    Returns:
        Whether psi witnesses indeterminacy in K
    """
    support = support_statement(psi, basis, eps)
    if len(support.indices) < 2:
        return False
    truths = elementary_truths(psi, basis)
    logger.debug(
        "Elementary expectations on %s: %s",
        basis.name,
        [round(t.expectation, 12) for t in truths],
    )
    return all(truth.value is Truth.INDETERMINATE for truth in truths)
