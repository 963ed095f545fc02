"""Unit tests for two-channel pairs and EPRB runs."""

import numpy as np
import pytest

from snadboy_qlogic.eprb import (
    CHANNEL_1,
    CHANNEL_2,
    BipartiteState,
    bipartite,
    chain_labels,
    commuting_followup_check,
    conditional_state,
    contrast_basis,
    dual_ensemble_check,
    exact_joint_distribution,
    joint_empirical,
    joint_probability,
    joint_table,
    logical_chain_check,
    no_signaling_check,
    simulate_eprb,
)
from snadboy_qlogic.exceptions import (
    DimensionMismatchError,
    ImpossibleOutcomeError,
    NormalizationError,
)
from snadboy_qlogic.hilbert import ObservableBasis, StateVector, normalize, qubit_basis
from snadboy_qlogic.streams import TrialStreams


class TestBipartiteState:
    """Test cases for BipartiteState construction."""

    def test_shape_mismatch(self, qubit_z):
        """Test amplitude matrix that does not fit the bases."""
        with pytest.raises(DimensionMismatchError):
            bipartite([[1, 0, 0]], qubit_z, qubit_z)

    def test_unnormalized(self, qubit_z):
        """Test a pair with norm 1.2."""
        with pytest.raises(NormalizationError, match="state not normalized"):
            bipartite([[1.2, 0], [0, 0]], qubit_z, qubit_z)

    def test_product_state(self, qubit_z):
        """Test |u>|v> as an amplitude matrix."""
        u = normalize([1, 1])
        v = StateVector.basis_state(2, 1)
        s = BipartiteState.product(u, v, qubit_z, qubit_z)
        assert np.allclose(s.amplitudes, [[0, np.sqrt(0.5)], [0, np.sqrt(0.5)]])

    def test_in_bases_preserves_flat_state(self, bell_state):
        """Test re-expressing the pair keeps the same physical vector."""
        rotated = bell_state.in_bases(qubit_basis(0.3, "K'"), qubit_basis(1.1, "L'"))
        assert rotated.flat().isclose(bell_state.flat())

    def test_marginals(self, uneven_pair):
        """Test channel marginals sum rows and columns."""
        assert np.allclose(uneven_pair.marginal(1), [0.5, 0.5])
        assert np.allclose(uneven_pair.marginal(2), [0.25, 0.5, 0.25])


class TestConditionalState:
    """Test cases for the partner state after a one-channel outcome."""

    def test_superposed_partner(self, qubit_z):
        """Test a = [[1/2, 1/2], [1/2, -1/2]] conditioned on channel 1 outcome 0."""
        s = bipartite([[0.5, 0.5], [0.5, -0.5]], qubit_z, qubit_z)
        result = conditional_state(s, 1, 0)
        assert result.probability == pytest.approx(0.5)
        assert result.partner_state.isclose(normalize([1, 1]))

    def test_channel_two_conditioning(self, uneven_pair):
        """Test conditioning on channel 2."""
        result = conditional_state(uneven_pair, 2, 1)
        assert result.probability == pytest.approx(0.5)
        assert result.partner_state.isclose(normalize([1, 1]))

    def test_impossible_outcome(self, qubit_z):
        """Test conditioning on a zero-probability outcome."""
        s = bipartite([[1, 0], [0, 0]], qubit_z, qubit_z)
        with pytest.raises(ImpossibleOutcomeError):
            conditional_state(s, 1, 1)

    def test_invalid_channel(self, bell_state):
        """Test a channel other than 1 or 2."""
        with pytest.raises(ValueError):
            conditional_state(bell_state, 3, 0)


class TestJointProbability:
    """Test cases for exact joint distributions."""

    def test_bell_cells(self, bell_state):
        """Test |a_nj|^2 on the Bell pair."""
        assert joint_probability(bell_state, 0, 0) == pytest.approx(0.5)
        assert joint_probability(bell_state, 0, 1) == 0.0

    def test_random_states_match_projector(self):
        """Test |a_nj|^2 against the projector expectation on random pairs."""
        rng = np.random.default_rng(11)
        for d1, d2 in [(2, 2), (2, 3), (3, 4), (4, 4)]:
            a = rng.normal(size=(d1, d2)) + 1j * rng.normal(size=(d1, d2))
            b1 = ObservableBasis.computational(d1)
            b2 = ObservableBasis.computational(d2)
            s = BipartiteState(a / np.linalg.norm(a), b1, b2)
            total = sum(joint_probability(s, n, j) for n in range(d1) for j in range(d2))
            assert total == pytest.approx(1.0)

    def test_degenerate_pooling(self):
        """Test cells of a degenerate eigenvalue are pooled."""
        b1 = ObservableBasis.computational(3, [1.0, 1.0, 0.0], "K")
        b2 = ObservableBasis.computational(2, [1.0, -1.0], "L")
        a = np.full((3, 2), 1 / np.sqrt(6))
        exact = exact_joint_distribution(BipartiteState(a, b1, b2))
        assert exact[(1.0, 1.0)] == pytest.approx(2 / 6)
        assert exact[(0.0, -1.0)] == pytest.approx(1 / 6)


class TestDualEnsemble:
    """Test cases for route A and route B factorizations."""

    def test_uneven_pair(self, uneven_pair):
        """Test both routes reproduce every possible cell."""
        report = dual_ensemble_check(uneven_pair)
        assert report.passed
        assert report.max_discrepancy < 1e-12
        assert len(report.cells) == 6

    def test_rotated_bases(self, bell_state):
        """Test both routes under non-matched analyzers."""
        rotated = bell_state.in_bases(qubit_basis(0.0, "K"), qubit_basis(0.6, "L"))
        assert dual_ensemble_check(rotated).passed


class TestSimulateEprb:
    """Test cases for Monte Carlo EPRB runs."""

    def test_matched_bell_state(self, bell_state, streams):
        """Test perfect correlation with matched analyzers."""
        n = 20000
        ensemble = simulate_eprb(bell_state, "1-then-2", n, streams)
        assert ensemble.values(CHANNEL_1) == ensemble.values(CHANNEL_2)
        freq = joint_empirical(ensemble)
        assert (1.0, -1.0) not in freq
        assert (-1.0, 1.0) not in freq
        assert abs(freq[(1.0, 1.0)] - 0.5) <= 4 * np.sqrt(0.25 / n)

    def test_order_does_not_change_correlation(self, bell_state, streams):
        """Test channel 2 first gives the same perfect correlation."""
        ensemble = simulate_eprb(bell_state, "2-then-1", 2000, streams)
        assert ensemble.stage_labels == (CHANNEL_2, CHANNEL_1)
        assert ensemble.values(CHANNEL_1) == ensemble.values(CHANNEL_2)

    def test_unknown_order(self, bell_state, streams):
        """Test an unknown measurement order."""
        with pytest.raises(ValueError, match="Order"):
            simulate_eprb(bell_state, "both", 10, streams)

    def test_joint_table_rows(self, bell_state, streams):
        """Test one table row per eigenvalue pair."""
        ensemble = simulate_eprb(bell_state, "1-then-2", 1000, streams)
        table = joint_table(bell_state, ensemble)
        assert [(c.n, c.j) for c in table] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert table[1].empirical == 0.0
        assert table[1].stderr == 0.0


class TestFollowup:
    """Test cases for the follow-up measurement on the partner."""

    def test_partner_measurement_is_certain(self, uneven_pair):
        """Test measuring the partner in a basis containing it."""
        report = commuting_followup_check(uneven_pair, 0)
        assert report.deterministic
        assert report.deterministic_probability == pytest.approx(1.0)
        assert report.contrast_unpredictable
        assert report.passed

    def test_contrast_dimension_mismatch(self, uneven_pair):
        """Test a contrast basis for the wrong channel."""
        with pytest.raises(DimensionMismatchError):
            commuting_followup_check(uneven_pair, 0, qubit_basis(0.0))

    def test_partner_in_fourier_basis_gets_rotated_contrast(self):
        """Test a partner equal to a Fourier vector still has an uncertain contrast."""
        half = np.array([[0.5, 0.5], [0.5, -0.5]], dtype=complex)
        s = BipartiteState(half, qubit_basis(0.0, "K"), qubit_basis(0.0, "L"))
        for n in (0, 1):
            report = commuting_followup_check(s, n)
            assert report.contrast_basis == "F(L')"
            assert report.contrast_probabilities == pytest.approx([0.5, 0.5])
            assert report.passed

    def test_configured_contrast_containing_partner_is_replaced(self):
        """Test a contrast basis with the partner as an eigenvector is not used."""
        z1, z2 = qubit_basis(0.0, "K"), qubit_basis(0.0, "L")
        s = BipartiteState(np.array([[1, 0], [0, 0]], dtype=complex), z1, z2)
        report = commuting_followup_check(s, 0, qubit_basis(0.0, "Z"))
        assert report.contrast_basis == "F"
        assert report.contrast_unpredictable

    def test_contrast_basis_prefers_configured(self):
        """Test a configured basis that leaves the partner uncertain is kept."""
        partner = StateVector.basis_state(2, 0)
        assert contrast_basis(partner, qubit_basis(np.pi / 4, "X")).name == "X"
        assert contrast_basis(partner).name == "F"

    def test_one_dimensional_partner_has_no_contrast(self):
        """Test channel 2 of dimension 1 passes on certainty alone."""
        a = np.array([[1 / np.sqrt(2)], [1 / np.sqrt(2)]], dtype=complex)
        k, l = ObservableBasis.computational(2, name="K"), ObservableBasis.computational(1, name="L")
        s = BipartiteState(a, k, l)
        report = commuting_followup_check(s, 0)
        assert not report.has_contrast
        assert report.passed


class TestLogicalChain:
    """Test cases for repeated channel-1 measurements."""

    def test_chain_labels(self):
        """Test stage labels from t0 - N dt to channel 2."""
        assert chain_labels(2) == ["ch1@t0-2dt", "ch1@t0-1dt", "ch1", "ch2"]

    def test_chain_is_constant(self, bell_state, streams):
        """Test channel 1 keeps its value across the chain."""
        report = logical_chain_check(bell_state, 5, 5000, streams)
        assert report.constancy == 1.0
        assert report.tv_distance <= report.tv_tolerance
        assert report.passed

    def test_zero_steps_matches_single_run(self, bell_state):
        """Test a chain without earlier steps reproduces the plain run."""
        report = logical_chain_check(bell_state, 0, 500, TrialStreams(5))
        plain = simulate_eprb(bell_state, "1-then-2", 500, TrialStreams(5))
        assert report.ensemble.same_records(plain)

    def test_negative_steps(self, bell_state, streams):
        """Test a negative number of steps."""
        with pytest.raises(ValueError):
            logical_chain_check(bell_state, -1, 10, streams)


class TestNoSignaling:
    """Test cases for far-channel marginals under different settings."""

    def test_channel_two_marginal_is_stable(self, bell_state, streams):
        """Test channel-2 marginals under two channel-1 analyzers."""
        settings = [qubit_basis(0.0, "K"), qubit_basis(np.pi / 4, "K'")]
        report = no_signaling_check(bell_state, settings, 20000, streams)
        assert report.passed
        assert {cell.setting for cell in report.cells} == {"K", "K'"}

    def test_requires_settings(self, bell_state, streams):
        """Test an empty list of settings."""
        with pytest.raises(ValueError):
            no_signaling_check(bell_state, [], 10, streams)
