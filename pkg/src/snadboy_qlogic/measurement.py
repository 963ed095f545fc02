"""Ideal projective measurement, repeated trials and ensemble selection.

Sampling is inverse-CDF over the cumulative Born weights of the outcomes
with nonzero probability: a uniform draw u picks outcome l when
cum[l-1] <= u < cum[l]. Posteriors have their largest-magnitude amplitude
made real-positive.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .exceptions import DimensionMismatchError, UnknownStageError
from .hilbert import ObservableBasis, StateVector, canonical_phase, normalize
from .streams import TrialStreams
from .utils import (
    binomial_tolerance,
    format_number,
    frequencies,
    partition_trials,
    tv_distance,
    tv_tolerance,
)

logger = logging.getLogger(__name__)

# Outcomes with smaller Born weight are never sampled.
MIN_PROBABILITY = 1e-14
EIGENVALUE_MATCH = 1e-10


@dataclass(frozen=True, eq=False)
class Outcome:
    """Result of one ideal measurement: eigenvalue, eigenspace hit, reduced state."""

    eigenvalue: float
    indices: Tuple[int, ...]
    probability: float
    posterior: StateVector


@dataclass(frozen=True, eq=False)
class Stage:
    label: str
    basis_id: str
    outcome: Outcome

    @property
    def eigenvalue(self) -> float:
        return self.outcome.eigenvalue


@dataclass(frozen=True, eq=False)
class TrialRecord:
    trial_id: int
    stages: Tuple[Stage, ...]

    def stage(self, label: str) -> Stage:
        for stage in self.stages:
            if stage.label == label:
                return stage
        raise UnknownStageError(f"Trial {self.trial_id} has no stage '{label}'")

    def value(self, label: str) -> float:
        return self.stage(label).eigenvalue

    def same_as(self, other: "TrialRecord") -> bool:
        """Bit-identical labels, eigenvalues and posteriors."""
        if self.trial_id != other.trial_id or len(self.stages) != len(other.stages):
            return False
        return all(
            a.label == b.label
            and a.basis_id == b.basis_id
            and a.eigenvalue == b.eigenvalue
            and np.array_equal(a.outcome.posterior.amplitudes, b.outcome.posterior.amplitudes)
            for a, b in zip(self.stages, other.stages)
        )


@dataclass(frozen=True)
class Selector:
    stage_label: str
    eigenvalue: float

    def matches(self, record: TrialRecord) -> bool:
        return abs(record.value(self.stage_label) - self.eigenvalue) < EIGENVALUE_MATCH

    def __str__(self) -> str:
        return f"{self.stage_label}={format_number(self.eigenvalue)}"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Trial records plus the selections that produced them (none means "all")."""

    trials: Tuple[TrialRecord, ...]
    stage_labels: Tuple[str, ...]
    selectors: Tuple[Selector, ...] = ()

    def __len__(self) -> int:
        return len(self.trials)

    def __iter__(self) -> Iterator[TrialRecord]:
        return iter(self.trials)

    @property
    def is_empty(self) -> bool:
        return not self.trials

    @property
    def selector(self) -> str:
        return " & ".join(str(s) for s in self.selectors) or "all"

    def values(self, label: str) -> List[float]:
        self._require_label(label)
        return [record.value(label) for record in self.trials]

    def frequencies(self, label: str) -> Dict[float, float]:
        return frequencies(self.values(label))

    def joint_frequencies(self, labels: Sequence[str]) -> Dict[Tuple[float, ...], float]:
        for label in labels:
            self._require_label(label)
        return frequencies(tuple(record.value(label) for label in labels) for record in self.trials)

    def same_records(self, other: "Ensemble") -> bool:
        return len(self) == len(other) and all(
            a.same_as(b) for a, b in zip(self.trials, other.trials)
        )

    def _require_label(self, label: str) -> None:
        if label not in self.stage_labels:
            raise UnknownStageError(
                f"Unknown stage '{label}' (stages: {', '.join(self.stage_labels)})"
            )


@dataclass(frozen=True, eq=False)
class Branches:
    """Possible stages at one point of a trial, with cumulative Born weights."""

    stages: Tuple[Stage, ...]
    cumulative: np.ndarray

    def pick(self, u: float) -> int:
        index = int(np.searchsorted(self.cumulative, u, side="right"))
        return min(index, len(self.stages) - 1)


BranchBuilder = Callable[[Tuple[int, ...]], Branches]


class BranchCache:
    """Memoizes branch tables by the path of outcome choices that leads to them.

    Every trial with the same earlier outcomes sees the same state, so each
    table is computed once per run.
    """

    def __init__(self, build: BranchBuilder):
        self._build = build
        self._tables: Dict[Tuple[int, ...], Branches] = {}
        self._lock = threading.RLock()

    def __call__(self, path: Tuple[int, ...]) -> Branches:
        with self._lock:
            table = self._tables.get(path)
            if table is None:
                table = self._build(path)
                self._tables[path] = table
                logger.debug("Built branch table for path %s (%d outcomes)", path, len(table.stages))
            return table


def make_branches(stages: Sequence[Stage]) -> Branches:
    weights = np.array([stage.outcome.probability for stage in stages], dtype=float)
    return Branches(tuple(stages), np.cumsum(weights))


def simulate_trials(
    n: int,
    streams: TrialStreams,
    depth: int,
    branches: BranchCache,
    workers: int = 1,
) -> Tuple[TrialRecord, ...]:
    """Run ``n`` trials of ``depth`` stages; trial t draws from substream t.

    Ranges of trial ids may run on parallel workers; records are merged in
    trial-id order, so the result does not depend on ``workers``.
    """

    def run_range(bounds: Tuple[int, int]) -> List[TrialRecord]:
        records = []
        for trial_id in range(*bounds):
            path: Tuple[int, ...] = ()
            stages = []
            for u in streams.uniforms(trial_id, depth):
                table = branches(path)
                choice = table.pick(float(u))
                stages.append(table.stages[choice])
                path += (choice,)
            records.append(TrialRecord(trial_id, tuple(stages)))
        return records

    ranges = partition_trials(n, workers)
    if len(ranges) == 1:
        return tuple(run_range(ranges[0]))
    logger.debug("Partitioning %d trials into ranges %s", n, ranges)
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        chunks = list(pool.map(run_range, ranges))
    return tuple(record for chunk in chunks for record in chunk)


def _check_dims(psi: StateVector, basis: ObservableBasis) -> None:
    if psi.dim != basis.dim:
        raise DimensionMismatchError(
            f"State dimension {psi.dim} does not match basis '{basis.name}' ({basis.dim})"
        )


def born_distribution(psi: StateVector, basis: ObservableBasis) -> List[Tuple[float, float]]:
    """(eigenvalue, probability) per distinct eigenvalue, degenerate weights pooled."""
    _check_dims(psi, basis)
    weights = np.abs(basis.coefficients(psi)) ** 2
    return [(value, float(np.sum(weights[list(members)]))) for value, members in basis.eigenspaces()]


def outcome_table(psi: StateVector, basis: ObservableBasis) -> List[Outcome]:
    """Every outcome with nonzero probability, with its reduced state."""
    _check_dims(psi, basis)
    coefficients = basis.coefficients(psi)
    outcomes = []
    for value, members in basis.eigenspaces():
        selected = list(members)
        probability = float(np.sum(np.abs(coefficients[selected]) ** 2))
        if probability < MIN_PROBABILITY:
            continue
        projected = basis.eigenvectors[:, selected] @ coefficients[selected]
        posterior = normalize(canonical_phase(normalize(projected)))
        outcomes.append(Outcome(value, members, probability, posterior))
    return outcomes


def measure(psi: StateVector, basis: ObservableBasis, rng: np.random.Generator) -> Outcome:
    """Sample one ideal measurement of ``basis`` on ``psi`` and reduce the state."""
    outcomes = outcome_table(psi, basis)
    table = make_branches([Stage("", basis.name, outcome) for outcome in outcomes])
    return outcomes[table.pick(float(rng.random()))]


def run_trials(
    psi: StateVector,
    plan: Sequence[Tuple[str, ObservableBasis]],
    n: int,
    streams: TrialStreams,
    workers: int = 1,
) -> Ensemble:
    """Measure each stage of ``plan`` on the posterior of the previous stage.

    Args:
        psi: Premeasured state, measured by stage 0
        plan: Ordered (label, basis) pairs
        n: Number of trials (at least 1)
        streams: Per-trial random substreams
        workers: Parallel trial ranges

    Returns:
        Unselected ensemble of ``n`` trial records
    """
    if n < 1:
        raise ValueError("Number of trials must be at least 1")
    if not plan:
        raise ValueError("Measurement plan must have at least one stage")
    labels = [label for label, _ in plan]
    if len(set(labels)) != len(labels):
        raise ValueError(f"Stage labels must be unique, got {labels}")
    for _, basis in plan:
        _check_dims(psi, basis)

    def build(path: Tuple[int, ...]) -> Branches:
        state = psi if not path else cache(path[:-1]).stages[path[-1]].outcome.posterior
        label, basis = plan[len(path)]
        return make_branches(
            [Stage(label, basis.name, outcome) for outcome in outcome_table(state, basis)]
        )

    cache = BranchCache(build)
    trials = simulate_trials(n, streams, len(plan), cache, workers)
    logger.info("Ran %d trials over stages %s", n, ", ".join(labels))
    return Ensemble(trials, tuple(labels))


def select(ensemble: Ensemble, stage_label: str, eigenvalue: float) -> Ensemble:
    """Sub-ensemble whose ``stage_label`` stage yielded ``eigenvalue``.

    Raises:
        UnknownStageError: If no stage carries that label
    """
    ensemble._require_label(stage_label)
    selector = Selector(stage_label, float(eigenvalue))
    kept = tuple(record for record in ensemble.trials if selector.matches(record))
    selectors = ensemble.selectors
    if selector not in selectors:
        selectors = selectors + (selector,)
    return Ensemble(kept, ensemble.stage_labels, selectors)


def format_ensemble(ensemble: Ensemble) -> str:
    """One line per trial: ``trial_id, label=eigenvalue, ...``."""
    lines = []
    for record in ensemble.trials:
        fields = [str(record.trial_id)]
        fields.extend(f"{stage.label}={format_number(stage.eigenvalue)}" for stage in record.stages)
        lines.append(", ".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ensemble_line(line: str) -> Tuple[int, List[Tuple[str, float]]]:
    """Inverse of one line of :func:`format_ensemble`."""
    head, *rest = [field.strip() for field in line.strip().split(",")]
    stages = []
    for field in rest:
        label, _, value = field.rpartition("=")
        if not label:
            raise ValueError(f"Malformed stage field '{field}'")
        stages.append((label, float(value)))
    return int(head), stages


class OutcomeCheck(BaseModel):
    eigenvalue: float
    exact: float
    single: float
    double: float
    tolerance: float


class SubEnsembleCheck(BaseModel):
    eigenvalue: float
    size: int
    premeasured_match: Optional[float] = None
    status: str


class RetrodictionReport(BaseModel):
    """Single versus double measurement of one observable on one state."""

    trials: int
    agreement: float
    outcomes: List[OutcomeCheck]
    tv_distance: float
    tv_tolerance: float
    subensembles: List[SubEnsembleCheck]
    passed: bool
    ensemble: Any = Field(default=None, exclude=True, repr=False)


PRE_STAGE = "t0-dt"
POST_STAGE = "t0"


def retrodiction_check(
    psi: StateVector,
    basis: ObservableBasis,
    n: int,
    streams: TrialStreams,
    workers: int = 1,
) -> RetrodictionReport:
    """Compare a single measurement at t0 with a measurement at t0-dt followed by t0.

    Reports (1) pre/post agreement over all double-measurement trials,
    (2) the distance between the two t0 outcome distributions, and (3) for each
    selected ensemble K = k, the fraction of its trials whose earlier value was k.
    Conclusions about the earlier value are drawn only from selected ensembles.
    """
    exact = dict(born_distribution(psi, basis))
    single = run_trials(psi, [(POST_STAGE, basis)], n, streams.derive(0), workers)
    double = run_trials(psi, [(PRE_STAGE, basis), (POST_STAGE, basis)], n, streams.derive(1), workers)

    pre, post = double.values(PRE_STAGE), double.values(POST_STAGE)
    agreement = sum(1 for a, b in zip(pre, post) if a == b) / n

    single_freq = single.frequencies(POST_STAGE)
    double_freq = double.frequencies(POST_STAGE)
    outcomes = [
        OutcomeCheck(
            eigenvalue=value,
            exact=p,
            single=single_freq.get(value, 0.0),
            double=double_freq.get(value, 0.0),
            tolerance=binomial_tolerance(p, n),
        )
        for value, p in exact.items()
    ]
    distance = tv_distance(single_freq, double_freq)
    band = tv_tolerance(exact, n, n)

    subensembles = []
    for value in exact:
        selected = select(double, POST_STAGE, value)
        if selected.is_empty:
            subensembles.append(SubEnsembleCheck(eigenvalue=value, size=0, status="skipped"))
            continue
        earlier = selected.values(PRE_STAGE)
        match = sum(1 for v in earlier if v == value) / len(earlier)
        subensembles.append(
            SubEnsembleCheck(
                eigenvalue=value,
                size=len(selected),
                premeasured_match=match,
                status="pass" if match == 1.0 else "fail",
            )
        )

    passed = (
        agreement == 1.0
        and distance <= band
        and all(s.status != "fail" for s in subensembles)
    )
    logger.info(
        "Retrodiction on %s: agreement %.6f, TV %.6f (band %.6f)", basis.name, agreement, distance, band
    )
    return RetrodictionReport(
        trials=n,
        agreement=agreement,
        outcomes=outcomes,
        tv_distance=distance,
        tv_tolerance=band,
        subensembles=subensembles,
        passed=passed,
        ensemble=double,
    )
