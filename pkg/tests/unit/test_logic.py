"""Unit tests for statements, truth operators and truth values."""

import numpy as np
import pytest

from snadboy_qlogic.exceptions import NoncommutingError, StatementError
from snadboy_qlogic.hilbert import (
    ObservableBasis,
    StateVector,
    apply,
    is_hermitian,
    is_idempotent,
    normalize,
    qubit_basis,
)
from snadboy_qlogic.logic import (
    Truth,
    TruthValue,
    by_eigenvalue,
    conjunction,
    disjunction,
    elementary,
    elementary_truths,
    expectation,
    indeterminacy_witness,
    negation,
    state_statement,
    support_is_minimal,
    support_statement,
    tautology,
    truth_value,
)


class TestStatements:
    """Test cases for building and composing statements."""

    def test_elementary_projector(self, qutrit_basis):
        """Test |k_1><k_1| is a Hermitian idempotent."""
        statement = elementary(qutrit_basis, 1)
        assert np.allclose(statement.projector, np.diag([0, 1, 0]))
        assert is_hermitian(statement.projector)
        assert is_idempotent(statement.projector)

    def test_elementary_out_of_range(self, qutrit_basis):
        """Test an eigen-index outside the basis."""
        with pytest.raises(StatementError):
            elementary(qutrit_basis, 3)

    def test_by_eigenvalue_pools_degenerate_space(self):
        """Test "K = 1" on a degenerate eigenvalue."""
        basis = ObservableBasis.computational(3, [1.0, 0.0, 1.0])
        assert by_eigenvalue(basis, 1.0).indices == frozenset({0, 2})

    def test_disjunction_sums_projectors(self, qutrit_basis):
        """Test disjunction of two elementary statements."""
        statement = elementary(qutrit_basis, 0) | elementary(qutrit_basis, 2)
        assert statement.indices == frozenset({0, 2})
        assert np.allclose(statement.projector, np.diag([1, 0, 1]))

    def test_disjunction_overlap_raises_error(self, qutrit_basis):
        """Test non-exclusive statements cannot be disjoined."""
        both = elementary(qutrit_basis, 0) | elementary(qutrit_basis, 1)
        with pytest.raises(StatementError, match="not mutually exclusive"):
            disjunction([both, elementary(qutrit_basis, 1)])

    def test_disjunction_mixed_bases_raises_error(self):
        """Test statements over different bases cannot be disjoined."""
        with pytest.raises(StatementError, match="different bases"):
            disjunction([elementary(qubit_basis(0.0), 0), elementary(qubit_basis(0.5), 1)])

    def test_negation_is_disjunction_of_others(self, qutrit_basis):
        """Test not(K = k_l) equals the disjunction of the other elementaries."""
        for index in range(3):
            others = [elementary(qutrit_basis, i) for i in range(3) if i != index]
            assert np.allclose(
                (~elementary(qutrit_basis, index)).projector,
                disjunction(others).projector,
                atol=1e-10,
            )

    def test_negation_of_tautology_is_contradiction(self, qutrit_basis):
        """Test the complement of the tautology."""
        assert negation(tautology(qutrit_basis)).is_contradiction

    def test_conjunction_same_basis(self, qutrit_basis):
        """Test conjunction intersects index sets."""
        a = elementary(qutrit_basis, 0) | elementary(qutrit_basis, 1)
        b = elementary(qutrit_basis, 1) | elementary(qutrit_basis, 2)
        assert (a & b).indices == frozenset({1})

    def test_conjunction_noncommuting_raises_error(self):
        """Test conjunction of statements about noncommuting observables."""
        with pytest.raises(NoncommutingError):
            conjunction(elementary(qubit_basis(0.0, "K"), 0), elementary(qubit_basis(0.7, "M"), 0))

    def test_conjunction_commuting_distinct_bases_raises_error(self):
        """Test distinct but commuting bases are rejected."""
        a = ObservableBasis.computational(2, [1.0, -1.0], "K")
        b = ObservableBasis.computational(2, [5.0, 7.0], "M")
        with pytest.raises(StatementError, match="not supported"):
            conjunction(elementary(a, 0), elementary(b, 0))

    def test_state_statement_is_rank_one(self, split_qutrit):
        """Test "the system is in psi" projects onto psi."""
        statement = state_statement(split_qutrit)
        assert np.allclose(statement.projector, np.outer(split_qutrit.amplitudes, np.conj(split_qutrit.amplitudes)))
        assert truth_value(statement, split_qutrit).value is Truth.TRUE


class TestTruthValues:
    """Test cases for expectations and three-valued truth."""

    def test_classification_bands(self):
        """Test the 1e-9 bands around 0 and 1."""
        assert TruthValue.classify(1.0 - 1e-10).value is Truth.TRUE
        assert TruthValue.classify(1e-10).value is Truth.FALSE
        assert TruthValue.classify(0.5).value is Truth.INDETERMINATE
        assert TruthValue.classify(1e-8).value is Truth.INDETERMINATE

    def test_eigenstate_truths(self, qutrit_basis):
        """Test elementary statements on an eigenvector are true or false."""
        psi = StateVector.basis_state(3, 2)
        assert bool(truth_value(elementary(qutrit_basis, 2), psi))
        assert truth_value(elementary(qutrit_basis, 0), psi).value is Truth.FALSE

    def test_expectation_of_superposition(self, qutrit_basis, split_qutrit):
        """Test <psi|P|psi> on (|0> + |2>) / sqrt(2)."""
        assert expectation(elementary(qutrit_basis, 0), split_qutrit) == pytest.approx(0.5)
        assert expectation(elementary(qutrit_basis, 1), split_qutrit) == pytest.approx(0.0)


class TestSupport:
    """Test cases for where a state is located within a basis."""

    def test_support_of_split_qutrit(self, qutrit_basis, split_qutrit):
        """Test support {0, 2} leaves psi invariant."""
        support = support_statement(split_qutrit, qutrit_basis)
        assert support.indices == frozenset({0, 2})
        assert np.allclose(apply(support.projector, split_qutrit), split_qutrit.amplitudes, atol=1e-9)
        assert support_is_minimal(support, split_qutrit)

    def test_support_of_eigenstate(self, qutrit_basis):
        """Test an eigenvector has a single-index support."""
        support = support_statement(StateVector.basis_state(3, 1), qutrit_basis)
        assert support.indices == frozenset({1})

    def test_support_threshold_must_be_positive(self, qutrit_basis, split_qutrit):
        """Test a non-positive support threshold."""
        with pytest.raises(StatementError):
            support_statement(split_qutrit, qutrit_basis, eps=0.0)

    def test_support_threshold_that_drops_amplitudes(self, qutrit_basis):
        """Test a threshold large enough to break P psi = psi."""
        psi = normalize([1.0, 1e-3, 0.0])
        with pytest.raises(StatementError, match="drops represented amplitudes"):
            support_statement(psi, qutrit_basis, eps=1e-2)

    def test_tautology_true_on_any_state(self, qutrit_basis):
        """Test the all-index disjunction is true everywhere."""
        psi = normalize([0.3, 0.5j, -0.8])
        assert truth_value(tautology(qutrit_basis), psi).value is Truth.TRUE


class TestIndeterminacyWitness:
    """Test cases for superpositions on which no elementary statement is decided."""

    def test_full_superposition_is_witness(self, qutrit_basis):
        """Test the uniform qutrit makes every K = k_l indeterminate."""
        psi = StateVector.from_amplitudes([1 / np.sqrt(3)] * 3)
        assert indeterminacy_witness(psi, qutrit_basis)

    def test_partial_superposition_is_not_witness(self, qutrit_basis, split_qutrit):
        """Test (|0> + |2>) / sqrt(2): K = 1 evaluates false."""
        truths = elementary_truths(split_qutrit, qutrit_basis)
        assert truths[1].value is Truth.FALSE
        assert not indeterminacy_witness(split_qutrit, qutrit_basis)

    def test_two_of_three_components(self, qutrit_basis):
        """Test (|0> + |1>) / sqrt(2) in dimension 3 is not a witness."""
        psi = StateVector.from_amplitudes([1 / np.sqrt(2), 1 / np.sqrt(2), 0])
        assert not indeterminacy_witness(psi, qutrit_basis)

    def test_eigenstate_is_not_witness(self, qutrit_basis):
        """Test an eigenvector is not a witness."""
        assert not indeterminacy_witness(StateVector.basis_state(3, 0), qutrit_basis)

    def test_rotated_analyzer(self):
        """Test |0> against the 45-degree analyzer."""
        psi = StateVector.basis_state(2, 0)
        assert indeterminacy_witness(psi, qubit_basis(np.pi / 4))
