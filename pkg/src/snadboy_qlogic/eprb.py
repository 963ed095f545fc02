"""Two-channel entangled pairs: conditional states, joint probabilities and
Monte Carlo runs of the EPR-Bohm arrangement.

A pair state is the amplitude matrix a[i, j] of |k_i>_1 |l_j>_2 in the two
channel bases. Flattened vectors follow the ``hilbert`` convention
``i * d2 + j`` in the physical coordinates of both factors.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .exceptions import (
    ConsistencyError,
    DimensionMismatchError,
    ImpossibleOutcomeError,
    NormalizationError,
)
from .hilbert import (
    ObservableBasis,
    StateVector,
    as_matrix,
    canonical_phase,
    complete_basis,
    fourier_basis,
    inner,
    normalize,
    outer,
    tensor_operator,
)
from .logic import TRUTH_BAND, Truth, elementary, truth_value
from .measurement import (
    MIN_PROBABILITY,
    BranchCache,
    Branches,
    Ensemble,
    Outcome,
    Stage,
    born_distribution,
    make_branches,
    simulate_trials,
)
from .streams import TrialStreams
from .utils import (
    binomial_stderr,
    binomial_tolerance,
    complex_to_pairs,
    frequencies,
    tv_distance,
    tv_tolerance,
    two_sample_tolerance,
)

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-8
ORACLE_TOLERANCE = 1e-12
CHANNEL_1 = "ch1"
CHANNEL_2 = "ch2"
ORDERS = ("1-then-2", "2-then-1")


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Amplitudes a[i, j] over basis1 (channel 1, K) and basis2 (channel 2, L)."""

    amplitudes: np.ndarray
    basis1: ObservableBasis
    basis2: ObservableBasis

    def __post_init__(self) -> None:
        a = as_matrix(self.amplitudes)
        if a.shape != (self.basis1.dim, self.basis2.dim):
            raise DimensionMismatchError(
                f"Amplitude matrix shape {a.shape} does not match channel dimensions "
                f"({self.basis1.dim}, {self.basis2.dim})"
            )
        length = float(np.linalg.norm(a))
        if abs(length - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(f"state not normalized (norm {length:.12g})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def product(
        cls,
        u: StateVector,
        v: StateVector,
        basis1: ObservableBasis,
        basis2: ObservableBasis,
    ) -> "BipartiteState":
        """Uncorrelated pair |u>_1 |v>_2."""
        return cls(np.outer(basis1.coefficients(u), basis2.coefficients(v)), basis1, basis2)

    @property
    def d1(self) -> int:
        return self.basis1.dim

    @property
    def d2(self) -> int:
        return self.basis2.dim

    def physical_matrix(self) -> np.ndarray:
        """Psi[x, y] = sum_ij a_ij (k_i)_x (l_j)_y."""
        return self.basis1.eigenvectors @ self.amplitudes @ self.basis2.eigenvectors.T

    def flat(self) -> StateVector:
        """The pair as one vector of dimension d1 * d2."""
        return normalize(self.physical_matrix().reshape(-1))

    def in_bases(self, basis1: ObservableBasis, basis2: ObservableBasis) -> "BipartiteState":
        """Re-express the same pair in other channel bases."""
        if basis1.dim != self.d1 or basis2.dim != self.d2:
            raise DimensionMismatchError("Replacement bases must keep the channel dimensions")
        psi = self.physical_matrix()
        a = np.conj(basis1.eigenvectors).T @ psi @ np.conj(basis2.eigenvectors)
        return BipartiteState(a, basis1, basis2)

    def marginal(self, channel: int) -> np.ndarray:
        """Outcome probability of each eigen-index of one channel."""
        weights = np.abs(self.amplitudes) ** 2
        return weights.sum(axis=1) if _channel(channel) == 1 else weights.sum(axis=0)


def _channel(channel: int) -> int:
    if channel not in (1, 2):
        raise ValueError(f"Channel must be 1 or 2, got {channel}")
    return channel


def bipartite(
    a: Sequence[Sequence[complex]], basis1: ObservableBasis, basis2: ObservableBasis
) -> BipartiteState:
    """Pair with amplitudes a[i][j] over ``basis1`` (channel 1) and ``basis2`` (channel 2).

    Args:
        a: Amplitude matrix of shape (basis1.dim, basis2.dim)
        basis1: Channel-1 observable basis K
        basis2: Channel-2 observable basis L

    Raises:
        DimensionMismatchError: If the shape does not match the bases
        NormalizationError: If the amplitudes are not unit norm within 1e-8
    """
    return BipartiteState(as_matrix(a), basis1, basis2)


@dataclass(frozen=True, eq=False)
class ConditionalResult:
    """Partner state given one channel's outcome; probability is 1/|A|^2."""

    channel: int
    outcome_index: int
    probability: float
    partner_state: StateVector


def conditional_state(s: BipartiteState, channel: int, outcome_index: int) -> ConditionalResult:
    """State of the unmeasured particle given ``outcome_index`` on ``channel``.

    Channel 1 outcome n gives A * sum_j a_nj |l_j>_2; channel 2 outcome j
    gives B * sum_i a_ij |k_i>_1.

    Raises:
        ImpossibleOutcomeError: If the outcome has zero probability
    """
    own, other = (s.basis1, s.basis2) if _channel(channel) == 1 else (s.basis2, s.basis1)
    if not 0 <= outcome_index < own.dim:
        raise DimensionMismatchError(
            f"Outcome index {outcome_index} out of range for channel {channel} (dimension {own.dim})"
        )
    coefficients = s.amplitudes[outcome_index, :] if channel == 1 else s.amplitudes[:, outcome_index]
    probability = float(np.sum(np.abs(coefficients) ** 2))
    if probability < MIN_PROBABILITY:
        raise ImpossibleOutcomeError(
            f"Outcome {outcome_index} on channel {channel} has zero probability"
        )
    partner = normalize(other.eigenvectors @ coefficients)
    return ConditionalResult(channel, outcome_index, probability, partner)


def joint_probability(s: BipartiteState, n: int, j: int) -> float:
    """w(k_n, l_j) = |a_nj|^2, cross-checked against <Psi|P_kn (x) P_lj|Psi>.

    Raises:
        ConsistencyError: If the two computations disagree beyond 1e-12
    """
    if not (0 <= n < s.d1 and 0 <= j < s.d2):
        raise DimensionMismatchError(f"Cell ({n}, {j}) out of range for {s.d1}x{s.d2} state")
    direct = float(abs(s.amplitudes[n, j]) ** 2)
    flat = s.physical_matrix().reshape(-1)
    projector = tensor_operator(
        outer(s.basis1.vector(n), s.basis1.vector(n)),
        outer(s.basis2.vector(j), s.basis2.vector(j)),
    )
    via_projector = float(np.vdot(flat, projector @ flat).real)
    if abs(direct - via_projector) > ORACLE_TOLERANCE:
        raise ConsistencyError(
            f"Joint probability ({n}, {j}): |a_nj|^2 = {direct!r} but projector gives {via_projector!r}"
        )
    return direct


def exact_joint_distribution(
    s: BipartiteState,
    basis1: Optional[ObservableBasis] = None,
    basis2: Optional[ObservableBasis] = None,
) -> Dict[Tuple[float, float], float]:
    """Joint outcome distribution keyed by eigenvalue pairs, degenerate cells pooled."""
    state = _in_measurement_bases(s, basis1, basis2)
    weights = np.abs(state.amplitudes) ** 2
    distribution = {}
    for k, rows in state.basis1.eigenspaces():
        for l, cols in state.basis2.eigenspaces():
            distribution[(k, l)] = float(weights[np.ix_(rows, cols)].sum())
    return distribution


def _in_measurement_bases(
    s: BipartiteState,
    basis1: Optional[ObservableBasis],
    basis2: Optional[ObservableBasis],
) -> BipartiteState:
    basis1 = basis1 or s.basis1
    basis2 = basis2 or s.basis2
    if basis1 is s.basis1 and basis2 is s.basis2:
        return s
    return s.in_bases(basis1, basis2)


class DualCell(BaseModel):
    n: int
    j: int
    joint: float
    route_a: float
    route_b: float
    discrepancy: float


class DualEnsembleReport(BaseModel):
    """Joint probabilities reached by conditioning on either channel first."""

    cells: List[DualCell]
    max_discrepancy: float
    tolerance: float = ORACLE_TOLERANCE
    passed: bool


def dual_ensemble_check(s: BipartiteState) -> DualEnsembleReport:
    """Compare route A (select on channel 1, then Born weight of the partner)
    with route B (select on channel 2) against |a_nj|^2 for every cell whose
    channel outcomes are both possible.
    """
    p1, p2 = s.marginal(1), s.marginal(2)
    cells = []
    for n in range(s.d1):
        if p1[n] < MIN_PROBABILITY:
            continue
        via_1 = conditional_state(s, 1, n)
        for j in range(s.d2):
            if p2[j] < MIN_PROBABILITY:
                continue
            via_2 = conditional_state(s, 2, j)
            joint = joint_probability(s, n, j)
            route_a = via_1.probability * abs(inner(s.basis2.vector(j), via_1.partner_state)) ** 2
            route_b = via_2.probability * abs(inner(s.basis1.vector(n), via_2.partner_state)) ** 2
            cells.append(
                DualCell(
                    n=n,
                    j=j,
                    joint=joint,
                    route_a=route_a,
                    route_b=route_b,
                    discrepancy=max(abs(route_a - joint), abs(route_b - joint)),
                )
            )
    worst = max((cell.discrepancy for cell in cells), default=0.0)
    return DualEnsembleReport(cells=cells, max_discrepancy=worst, passed=worst < ORACLE_TOLERANCE)


def _channel_outcomes(
    matrix: np.ndarray,
    channel: int,
    state: BipartiteState,
    label: str,
) -> Tuple[List[Stage], List[np.ndarray]]:
    """Outcomes of measuring one channel of an amplitude matrix, with the reduced matrices."""
    basis = state.basis1 if channel == 1 else state.basis2
    stages, reduced = [], []
    for value, members in basis.eigenspaces():
        block = np.zeros_like(matrix)
        rows = list(members)
        if channel == 1:
            block[rows, :] = matrix[rows, :]
        else:
            block[:, rows] = matrix[:, rows]
        probability = float(np.sum(np.abs(block) ** 2))
        if probability < MIN_PROBABILITY:
            continue
        block = block / np.sqrt(probability)
        physical = state.basis1.eigenvectors @ block @ state.basis2.eigenvectors.T
        posterior = normalize(canonical_phase(physical.reshape(-1)))
        stages.append(Stage(label, basis.name, Outcome(value, members, probability, posterior)))
        reduced.append(block)
    return stages, reduced


def _run_pair(
    state: BipartiteState,
    sequence: Sequence[Tuple[str, int]],
    n_trials: int,
    streams: TrialStreams,
    workers: int,
) -> Ensemble:
    """Measure channels in ``sequence`` order, each on the reduced pair left by the previous."""
    if n_trials < 1:
        raise ValueError("Number of trials must be at least 1")
    matrices: Dict[Tuple[int, ...], np.ndarray] = {(): np.array(state.amplitudes)}

    def build(path: Tuple[int, ...]) -> Branches:
        label, channel = sequence[len(path)]
        stages, reduced = _channel_outcomes(matrices[path], channel, state, label)
        for index, block in enumerate(reduced):
            matrices[path + (index,)] = block
        return make_branches(stages)

    cache = BranchCache(build)
    trials = simulate_trials(n_trials, streams, len(sequence), cache, workers)
    return Ensemble(trials, tuple(label for label, _ in sequence))


def simulate_eprb(
    s: BipartiteState,
    order: str,
    n_trials: int,
    streams: TrialStreams,
    measure1: Optional[ObservableBasis] = None,
    measure2: Optional[ObservableBasis] = None,
    workers: int = 1,
) -> Ensemble:
    """Measure both channels of each pair, first channel per ``order``.

    The first measurement samples that channel's marginal and reduces the pair
    to |outcome>|partner>; the second measures the partner. ``measure1`` and
    ``measure2`` select analyzer settings other than the state's own bases.
    Stages are labelled ``ch1`` and ``ch2``.
    """
    if order not in ORDERS:
        raise ValueError(f"Order must be one of {', '.join(ORDERS)}, got '{order}'")
    state = _in_measurement_bases(s, measure1, measure2)
    sequence = [(CHANNEL_1, 1), (CHANNEL_2, 2)]
    if order == "2-then-1":
        sequence.reverse()
    ensemble = _run_pair(state, sequence, n_trials, streams, workers)
    logger.info(
        "EPRB run: %d trials, order %s, settings %s/%s",
        n_trials,
        order,
        state.basis1.name,
        state.basis2.name,
    )
    return ensemble


def joint_empirical(ensemble: Ensemble) -> Dict[Tuple[float, float], float]:
    """Observed frequency of each (channel 1, channel 2) eigenvalue pair."""
    return ensemble.joint_frequencies((CHANNEL_1, CHANNEL_2))


class JointCell(BaseModel):
    n: int
    j: int
    k: float
    l: float
    exact: float
    empirical: float
    stderr: float


def joint_table(
    s: BipartiteState,
    ensemble: Ensemble,
    basis1: Optional[ObservableBasis] = None,
    basis2: Optional[ObservableBasis] = None,
) -> List[JointCell]:
    """Exact versus empirical joint distribution, one row per eigenvalue pair."""
    state = _in_measurement_bases(s, basis1, basis2)
    exact = exact_joint_distribution(state)
    empirical = joint_empirical(ensemble)
    first1 = {k: rows[0] for k, rows in state.basis1.eigenspaces()}
    first2 = {l: cols[0] for l, cols in state.basis2.eigenspaces()}
    return [
        JointCell(
            n=first1[k],
            j=first2[l],
            k=k,
            l=l,
            exact=p,
            empirical=empirical.get((k, l), 0.0),
            stderr=binomial_stderr(p, len(ensemble)),
        )
        for (k, l), p in exact.items()
    ]


class FollowupReport(BaseModel):
    """Second-channel measurement on the partner state selected by channel 1."""

    outcome_index: int
    partner: List[List[float]]
    deterministic_probability: float
    contrast_basis: Optional[str]
    contrast_probabilities: List[float]
    deterministic: bool
    contrast_unpredictable: bool
    passed: bool

    @property
    def has_contrast(self) -> bool:
        return self.contrast_basis is not None


def _certain_in(partner: StateVector, basis: ObservableBasis) -> bool:
    return max(p for _, p in born_distribution(partner, basis)) >= 1.0 - TRUTH_BAND


def contrast_basis(
    partner: StateVector, preferred: Optional[ObservableBasis] = None
) -> Optional[ObservableBasis]:
    """Basis of the partner's space in which the partner's outcome is uncertain.

    Tries ``preferred``, then the discrete Fourier basis. When both have the
    partner in an eigenspace, the Fourier basis is rotated onto the completed
    basis of the partner, giving every outcome probability 1/d.

    Args:
        partner: Conditional state of channel 2
        preferred: Configured contrast basis, if any

    Returns:
        Contrast basis, or None for a one-dimensional channel

    Raises:
        DimensionMismatchError: If ``preferred`` acts on another dimension
    """
    dim = partner.dim
    if preferred is not None and preferred.dim != dim:
        raise DimensionMismatchError("Contrast basis must act on channel 2")
    if dim < 2:
        return None
    fourier = fourier_basis(dim)
    for candidate in (preferred, fourier):
        if candidate is not None and not _certain_in(partner, candidate):
            return candidate
    rotated = complete_basis(partner).eigenvectors @ fourier.eigenvectors
    logger.debug("Partner is an eigenvector of every candidate contrast; using rotated basis")
    return ObservableBasis(rotated, np.arange(dim, dtype=float), "F(L')")


def commuting_followup_check(
    s: BipartiteState, n: int, contrast: Optional[ObservableBasis] = None
) -> FollowupReport:
    """Measure the partner |l'_m> in a basis that contains it, and in one that does not.

    The commuting basis is completed from |l'_m> (eigenvalue 1, complement 0),
    so the first measurement must be certain. The contrast basis (see
    :func:`contrast_basis`) must leave the outcome uncertain. A one-dimensional
    channel 2 has no contrast and passes on certainty alone.
    """
    conditional = conditional_state(s, 1, n)
    partner = conditional.partner_state
    l_prime = complete_basis(partner, name="L'")
    certain = truth_value(elementary(l_prime, 0), partner)
    deterministic = certain.value is Truth.TRUE
    chosen = contrast_basis(partner, contrast)
    spread = [] if chosen is None else [p for _, p in born_distribution(partner, chosen)]
    unpredictable = chosen is not None and max(spread) < 1.0 - TRUTH_BAND
    return FollowupReport(
        outcome_index=n,
        partner=complex_to_pairs(partner.amplitudes),
        deterministic_probability=certain.expectation,
        contrast_basis=None if chosen is None else chosen.name,
        contrast_probabilities=spread,
        deterministic=deterministic,
        contrast_unpredictable=unpredictable,
        passed=deterministic and (unpredictable or chosen is None),
    )


class ChainReport(BaseModel):
    """Repeated channel-1 measurements before the channel-2 measurement."""

    steps: int
    trials: int
    constancy: float
    cells: List[JointCell]
    reference: Dict[str, float]
    tv_distance: float
    tv_tolerance: float
    passed: bool
    ensemble: Any = Field(default=None, exclude=True, repr=False)


def chain_labels(steps: int) -> List[str]:
    """Channel-1 stage labels from t0 - N dt up to t0, then channel 2."""
    return [f"{CHANNEL_1}@t0-{k}dt" for k in range(steps, 0, -1)] + [CHANNEL_1, CHANNEL_2]


def logical_chain_check(
    s: BipartiteState,
    steps: int,
    n_trials: int,
    streams: TrialStreams,
    workers: int = 1,
) -> ChainReport:
    """Measure channel 1 at ``steps + 1`` successive times, then channel 2 once.

    Every trial must keep one channel-1 value throughout, and the final joint
    distribution must match an independent single-measurement run. With
    ``steps = 0`` the records equal :func:`simulate_eprb` on the same streams.
    """
    if steps < 0:
        raise ValueError("Number of steps must be non-negative")
    labels = chain_labels(steps)
    sequence = [(label, 1) for label in labels[:-1]] + [(CHANNEL_2, 2)]
    ensemble = _run_pair(s, sequence, n_trials, streams, workers)

    channel_1_labels = labels[:-1]
    constant = sum(
        1
        for record in ensemble
        if len({record.value(label) for label in channel_1_labels}) == 1
    )
    constancy = constant / n_trials

    reference = simulate_eprb(s, "1-then-2", n_trials, streams.derive(1), workers=workers)
    exact = exact_joint_distribution(s)
    chain_freq = joint_empirical(ensemble)
    reference_freq = joint_empirical(reference)
    distance = tv_distance(chain_freq, reference_freq)
    band = tv_tolerance(exact, n_trials, n_trials)
    logger.info("Chain of %d steps: constancy %.6f, TV %.6f (band %.6f)", steps, constancy, distance, band)
    return ChainReport(
        steps=steps,
        trials=n_trials,
        constancy=constancy,
        cells=joint_table(s, ensemble),
        reference={f"{k:g},{l:g}": p for (k, l), p in reference_freq.items()},
        tv_distance=distance,
        tv_tolerance=band,
        passed=constancy == 1.0 and distance <= band,
        ensemble=ensemble,
    )


class MarginalCell(BaseModel):
    setting: str
    value: float
    exact: float
    empirical: float
    tolerance: float


class NoSignalingReport(BaseModel):
    """Far-channel marginals under different near-channel analyzer settings."""

    channel: int
    cells: List[MarginalCell]
    passed: bool


def no_signaling_check(
    s: BipartiteState,
    settings: Sequence[ObservableBasis],
    n_trials: int,
    streams: TrialStreams,
    channel: int = 1,
    workers: int = 1,
) -> NoSignalingReport:
    """Vary the analyzer on ``channel`` and watch the other channel's marginal.

    Each setting's empirical marginal is compared with the exact marginal
    (4 sigma) and with the first setting's (two-sample 4 sigma).
    """
    if not settings:
        raise ValueError("At least one analyzer setting is required")
    far_label = CHANNEL_2 if _channel(channel) == 1 else CHANNEL_1
    far_basis = s.basis2 if channel == 1 else s.basis1
    exact_weights = s.marginal(2 if channel == 1 else 1)
    exact = {value: float(exact_weights[list(members)].sum()) for value, members in far_basis.eigenspaces()}

    baseline: Optional[Dict[float, float]] = None
    cells = []
    passed = True
    for index, setting in enumerate(settings):
        measure1, measure2 = (setting, None) if channel == 1 else (None, setting)
        ensemble = simulate_eprb(
            s, "1-then-2", n_trials, streams.derive(index), measure1, measure2, workers
        )
        observed = frequencies(ensemble.values(far_label))
        for value, p in exact.items():
            empirical = observed.get(value, 0.0)
            tolerance = binomial_tolerance(p, n_trials)
            ok = abs(empirical - p) <= tolerance
            if baseline is not None:
                ok = ok and abs(empirical - baseline.get(value, 0.0)) <= two_sample_tolerance(
                    p, n_trials, n_trials
                )
            passed = passed and ok
            cells.append(
                MarginalCell(
                    setting=setting.name, value=value, exact=p, empirical=empirical, tolerance=tolerance
                )
            )
        if baseline is None:
            baseline = observed
    return NoSignalingReport(channel=channel, cells=cells, passed=passed)
