"""Test fixtures for the truth-operator library and scenario runner."""

from pathlib import Path

import numpy as np
import pytest

from snadboy_qlogic.eprb import BipartiteState
from snadboy_qlogic.hilbert import ObservableBasis, StateVector, qubit_basis
from snadboy_qlogic.streams import TrialStreams

FIXTURES = Path(__file__).parent / "fixtures"
SQRT_HALF = 1 / np.sqrt(2)


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory holding YAML scenario fixtures."""
    return FIXTURES


@pytest.fixture
def streams() -> TrialStreams:
    """Default seeded substreams."""
    return TrialStreams(42)


# Single-system fixtures
@pytest.fixture
def qutrit_basis() -> ObservableBasis:
    """Computational basis of a qutrit, eigenvalues 0, 1, 2."""
    return ObservableBasis.computational(3)


@pytest.fixture
def qubit_z() -> ObservableBasis:
    """Dim-2 analyzer at angle 0: |0> -> +1, |1> -> -1."""
    return qubit_basis(0.0, "K")


@pytest.fixture
def split_qutrit() -> StateVector:
    """(|0> + |2>) / sqrt(2)."""
    return StateVector.from_amplitudes([SQRT_HALF, 0, SQRT_HALF])


@pytest.fixture
def biased_qubit() -> StateVector:
    """sqrt(0.8)|0> + sqrt(0.2)|1>."""
    return StateVector.from_amplitudes([np.sqrt(0.8), np.sqrt(0.2)])


# Pair fixtures
@pytest.fixture
def bell_state() -> BipartiteState:
    """(|k0 l0> + |k1 l1>) / sqrt(2) with matched analyzers."""
    return BipartiteState(
        np.array([[SQRT_HALF, 0], [0, SQRT_HALF]], dtype=complex),
        qubit_basis(0.0, "K"),
        qubit_basis(0.0, "L"),
    )


@pytest.fixture
def uneven_pair() -> BipartiteState:
    """2x3 entangled pair over computational bases."""
    return BipartiteState(
        np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]], dtype=complex),
        ObservableBasis.computational(2, name="K"),
        ObservableBasis.computational(3, [1.0, 0.0, -1.0], name="L"),
    )
