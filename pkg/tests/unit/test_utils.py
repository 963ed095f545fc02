"""Unit tests for statistics helpers and substreams."""

import math

import numpy as np
import pytest

from snadboy_qlogic.exceptions import ConfigurationError
from snadboy_qlogic.streams import TrialStreams
from snadboy_qlogic.utils import (
    binomial_tolerance,
    complex_to_pairs,
    format_number,
    frequencies,
    pairs_to_complex,
    partition_trials,
    tv_distance,
    tv_tolerance,
)


class TestFormatNumber:
    """Test cases for stable number formatting."""

    def test_integers_and_fractions(self):
        """Test short forms."""
        assert format_number(1.0) == "1"
        assert format_number(0.25) == "0.25"
        assert format_number(None) == ""

    def test_negative_zero_folded(self):
        """Test -0.0 prints as 0."""
        assert format_number(-0.0) == "0"


class TestStatistics:
    """Test cases for frequencies and tolerance bands."""

    def test_frequencies(self):
        """Test relative frequencies."""
        assert frequencies([1, 1, -1, 1]) == {1: 0.75, -1: 0.25}
        assert frequencies([]) == {}

    def test_binomial_tolerance_at_half(self):
        """Test the 4 sigma band for p = 0.5 at 10^5 trials."""
        assert binomial_tolerance(0.5, 100000) == pytest.approx(4 * math.sqrt(0.25 / 100000))
        assert binomial_tolerance(0.5, 100000) == pytest.approx(0.0063, abs=1e-4)

    def test_certain_cells_need_exact_match(self):
        """Test p = 0 and p = 1 give zero tolerance."""
        assert binomial_tolerance(0.0, 1000) == 0.0
        assert binomial_tolerance(1.0, 1000) == 0.0

    def test_tv_distance(self):
        """Test half the L1 distance, with missing keys as zero."""
        assert tv_distance({1: 0.5, -1: 0.5}, {1: 0.7, -1: 0.3}) == pytest.approx(0.2)
        assert tv_distance({1: 1.0}, {-1: 1.0}) == pytest.approx(1.0)

    def test_tv_tolerance_below_acceptance(self):
        """Test the TV band at 10^5 trials stays under 0.02."""
        assert tv_tolerance({1.0: 0.8, -1.0: 0.2}, 100000, 100000) < 0.02

    def test_partition_trials(self):
        """Test contiguous ranges covering every trial once."""
        ranges = partition_trials(10, 3)
        assert ranges == [(0, 4), (4, 7), (7, 10)]
        assert partition_trials(2, 8) == [(0, 1), (1, 2)]
        assert partition_trials(5, 0) == [(0, 5)]

    def test_complex_pairs(self):
        """Test [re, im] pair conversion."""
        assert pairs_to_complex([[1, 2], [0.5, -1]]) == [1 + 2j, 0.5 - 1j]
        assert complex_to_pairs([1 + 2j]) == [[1.0, 2.0]]


class TestTrialStreams:
    """Test cases for per-trial substreams."""

    def test_same_trial_same_draws(self):
        """Test a trial id always yields the same uniforms."""
        assert np.array_equal(TrialStreams(42).uniforms(7, 3), TrialStreams(42).uniforms(7, 3))

    def test_trials_are_independent_of_order(self):
        """Test draws do not depend on which trials ran before."""
        streams = TrialStreams(42)
        later = streams.uniforms(5, 2)
        for trial_id in range(5):
            streams.uniforms(trial_id, 2)
        assert np.array_equal(streams.uniforms(5, 2), later)

    def test_derived_streams_differ(self):
        """Test derived families are distinct experiments."""
        streams = TrialStreams(42)
        assert not np.array_equal(streams.derive(1).uniforms(0, 4), streams.uniforms(0, 4))

    def test_seed_range(self):
        """Test seeds outside 64 bits."""
        with pytest.raises(ConfigurationError):
            TrialStreams(-1)
        with pytest.raises(ConfigurationError):
            TrialStreams(2**64)
