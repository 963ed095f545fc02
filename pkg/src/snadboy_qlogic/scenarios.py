"""Named verification scenarios.

Each runner turns a :class:`ScenarioConfig` into a :class:`Report` of checks.
Statistical tolerances come from the trial counts; analytic checks use the
library's numeric tolerances.
"""

import logging
from typing import Callable, Dict, List

import numpy as np

from .config import ScenarioConfig
from .eprb import (
    ORACLE_TOLERANCE,
    ORDERS,
    JointCell,
    commuting_followup_check,
    dual_ensemble_check,
    exact_joint_distribution,
    joint_empirical,
    joint_table,
    logical_chain_check,
    no_signaling_check,
    simulate_eprb,
)
from .exceptions import QLogicError, ScenarioError
from .hilbert import TOLERANCE, apply, commutes, commutator, max_abs_entry, random_state
from .logic import (
    TRUTH_BAND,
    Truth,
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
)
from .measurement import (
    MIN_PROBABILITY,
    POST_STAGE,
    born_distribution,
    retrodiction_check,
    run_trials,
)
from .models import CheckRecord, Report
from .streams import TrialStreams
from .utils import binomial_tolerance, format_number, tv_distance, tv_tolerance

logger = logging.getLogger(__name__)

# Random states drawn for the tautology check of the location scenario.
RANDOM_STATES = 200

Runner = Callable[[ScenarioConfig, Report, TrialStreams, int], None]


def _label(value: float) -> str:
    """Eigenvalue as it appears in check names."""
    return format_number(value)


def _run_location(
    config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int
) -> None:
    """Support of psi in K, the identity P psi = psi, and the tautology.

    Args:
        config: Validated single-system configuration
        report: Report the checks are appended to
        streams: Seeded substreams; stream 0 draws the random states
        workers: Unused; the scenario has no trial loop
    """
    psi = config.state_vector()
    basis = config.basis("K")
    support = support_statement(psi, basis, config.eps)
    indices = sorted(support.indices)
    report.notes.append(f"support of psi in {basis.name}: {{{', '.join(map(str, indices))}}}")

    residual = float(np.max(np.abs(apply(support.projector, psi) - psi.amplitudes)))
    report.checks.append(CheckRecord.compare("support_leaves_state_invariant", 0.0, residual, 1e-9))
    minimal = support_is_minimal(support, psi, config.eps)
    report.checks.append(CheckRecord.flag("support_is_minimal", minimal))

    every = tautology(basis)
    report.checks.append(
        CheckRecord.compare("tautology_on_state", 1.0, expectation(every, psi), TRUTH_BAND)
    )
    rng = streams.generator(0)
    worst = min(expectation(every, random_state(basis.dim, rng)) for _ in range(RANDOM_STATES))
    report.checks.append(CheckRecord.compare("tautology_on_random_states", 1.0, worst, TRUTH_BAND))

    total = sum(t.expectation for t in elementary_truths(psi, basis))
    report.checks.append(CheckRecord.compare("elementary_expectations_sum", 1.0, total, TOLERANCE))

    deviation = 0.0
    for index in range(basis.dim):
        others = [elementary(basis, i) for i in range(basis.dim) if i != index]
        if not others:
            continue
        difference = negation(elementary(basis, index)).projector - disjunction(others).projector
        deviation = max(deviation, max_abs_entry(difference))
    report.checks.append(
        CheckRecord.compare("negation_is_disjunction_of_others", 0.0, deviation, TOLERANCE)
    )


def _run_indeterminacy(
    config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int
) -> None:
    """Elementary statements on a superposition, the witness, and Born frequencies.

    Per-index rows cover the support only; the witness row covers every
    eigenvector of K.
    """
    psi = config.state_vector()
    basis = config.basis("K")
    support = support_statement(psi, basis, config.eps)
    report.notes.append(f"support size in {basis.name}: {len(support.indices)}")
    report.checks.append(
        CheckRecord.flag("superposition", len(support.indices) > 1, empirical=len(support.indices))
    )

    truths = elementary_truths(psi, basis)
    for index in sorted(support.indices):
        truth = truths[index]
        report.checks.append(
            CheckRecord.flag(
                f"indeterminate[{basis.name}={_label(basis.eigenvalues[index])}]",
                truth.value is Truth.INDETERMINATE,
                empirical=truth.expectation,
                tolerance=TRUTH_BAND,
            )
        )
    report.checks.append(
        CheckRecord.flag("indeterminacy_witness", indeterminacy_witness(psi, basis, config.eps))
    )

    state_is = state_statement(psi)
    offset = max_abs_entry(commutator(state_is.projector, basis.observable()))
    report.checks.append(
        CheckRecord.flag(
            "state_observable_does_not_commute",
            not commutes(state_is.projector, basis.observable()),
            empirical=offset,
            tolerance=TOLERANCE,
        )
    )

    ensemble = run_trials(psi, [(POST_STAGE, basis)], config.trials, streams, workers)
    observed = ensemble.frequencies(POST_STAGE)
    for value, p in born_distribution(psi, basis):
        report.checks.append(
            CheckRecord.compare(
                f"frequency[{basis.name}={_label(value)}]",
                p,
                observed.get(value, 0.0),
                binomial_tolerance(p, config.trials),
            )
        )
    report.ensembles["trials"] = ensemble


def _run_retrodiction(
    config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int
) -> None:
    """Single versus double measurement of K, and the retrodicted histories."""
    psi = config.state_vector()
    basis = config.basis("K")
    result = retrodiction_check(psi, basis, config.trials, streams, workers)
    report.checks.append(CheckRecord.compare("pre_post_agreement", 1.0, result.agreement, 0.0))
    for outcome in result.outcomes:
        name = f"{basis.name}={_label(outcome.eigenvalue)}"
        report.checks.append(
            CheckRecord.compare(f"single[{name}]", outcome.exact, outcome.single, outcome.tolerance)
        )
        report.checks.append(
            CheckRecord.compare(f"double[{name}]", outcome.exact, outcome.double, outcome.tolerance)
        )
    report.checks.append(
        CheckRecord.compare("t0_tv_distance", 0.0, result.tv_distance, result.tv_tolerance)
    )
    for sub in result.subensembles:
        name = f"retrodicted[{basis.name}={_label(sub.eigenvalue)}]"
        if sub.status == "skipped":
            report.notes.append(f"empty ensemble: {basis.name}={_label(sub.eigenvalue)}")
            report.checks.append(CheckRecord.skipped(name, exact=1.0))
            continue
        report.checks.append(CheckRecord.compare(name, 1.0, sub.premeasured_match or 0.0, 0.0))
    report.ensembles["double"] = result.ensemble


def _joint_checks(report: Report, prefix: str, cells: List[JointCell], trials: int) -> None:
    """One binomial-band row per joint outcome cell."""
    for cell in cells:
        report.checks.append(
            CheckRecord.compare(
                f"{prefix}[{_label(cell.k)},{_label(cell.l)}]",
                cell.exact,
                cell.empirical,
                binomial_tolerance(cell.exact, trials),
            )
        )


def _run_eprb(config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int) -> None:
    """Joint table, order independence and no-signaling over the analyzer settings.

    Streams: derive(0) main run, derive(1) flipped order, derive(2) and
    derive(3) the channel-1 and channel-2 analyzer runs.
    """
    s = config.bipartite_state()
    n = config.trials
    ensemble = simulate_eprb(s, config.order, n, streams.derive(0), workers=workers)
    report.table = joint_table(s, ensemble)
    _joint_checks(report, "joint", report.table, n)
    report.ensembles["pairs"] = ensemble

    flipped = ORDERS[1] if config.order == ORDERS[0] else ORDERS[0]
    other = simulate_eprb(s, flipped, n, streams.derive(1), workers=workers)
    exact = exact_joint_distribution(s)
    report.checks.append(
        CheckRecord.compare(
            "order_flip_tv_distance",
            0.0,
            tv_distance(joint_empirical(ensemble), joint_empirical(other)),
            tv_tolerance(exact, n, n),
        )
    )

    for channel, key in ((1, "K"), (2, "L")):
        alternatives = config.analyzer_bases(key)
        if not alternatives:
            continue
        settings = [config.basis(key)] + alternatives
        result = no_signaling_check(s, settings, n, streams.derive(1 + channel), channel, workers)
        far = "L" if channel == 1 else "K"
        for cell in result.cells:
            report.checks.append(
                CheckRecord.compare(
                    f"no_signaling[{cell.setting}:{far}={_label(cell.value)}]",
                    cell.exact,
                    cell.empirical,
                    cell.tolerance,
                )
            )
        report.notes.append(
            f"channel-{3 - channel} marginals under {', '.join(b.name for b in settings)}: "
            f"{'stable' if result.passed else 'shifted'}"
        )


def _run_dual_ensemble(
    config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int
) -> None:
    """Both routes to w(k_n, l_j), the channel-1 marginal, and the follow-up on each partner.

    The contrast row is skipped when channel 2 is one-dimensional.
    """
    s = config.bipartite_state()
    dual = dual_ensemble_check(s)
    for cell in dual.cells:
        name = f"{cell.n},{cell.j}"
        report.checks.append(
            CheckRecord.compare(f"route_a[{name}]", cell.joint, cell.route_a, ORACLE_TOLERANCE)
        )
        report.checks.append(
            CheckRecord.compare(f"route_b[{name}]", cell.joint, cell.route_b, ORACLE_TOLERANCE)
        )
    report.notes.append(f"max route discrepancy: {format_number(dual.max_discrepancy)}")

    p1 = s.marginal(1)
    for n in range(s.d1):
        pooled = sum(cell.joint for cell in dual.cells if cell.n == n)
        report.checks.append(
            CheckRecord.compare(f"marginal_1[{n}]", float(p1[n]), pooled, ORACLE_TOLERANCE)
        )

    contrasts = config.analyzer_bases("L")
    contrast = contrasts[0] if contrasts else None
    for n in range(s.d1):
        if p1[n] < MIN_PROBABILITY:
            report.checks.append(CheckRecord.skipped(f"followup_certain[{n}]", exact=1.0))
            continue
        followup = commuting_followup_check(s, n, contrast)
        report.checks.append(
            CheckRecord.compare(
                f"followup_certain[{n}]", 1.0, followup.deterministic_probability, TRUTH_BAND
            )
        )
        if not followup.has_contrast:
            report.checks.append(
                CheckRecord.skipped(f"followup_contrast_uncertain[{n}]", exact=1.0)
            )
            continue
        report.checks.append(
            CheckRecord.flag(
                f"followup_contrast_uncertain[{n}:{followup.contrast_basis}]",
                followup.contrast_unpredictable,
                empirical=max(followup.contrast_probabilities),
            )
        )


def _run_chain(config: ScenarioConfig, report: Report, streams: TrialStreams, workers: int) -> None:
    """Repeated channel-1 measurements before channel 2, against a single measurement."""
    s = config.bipartite_state()
    result = logical_chain_check(s, config.steps, config.trials, streams, workers)
    report.notes.append(f"channel 1 measured at {config.steps + 1} times before channel 2")
    report.checks.append(CheckRecord.compare("channel_1_constancy", 1.0, result.constancy, 0.0))
    report.checks.append(
        CheckRecord.compare(
            "chain_vs_single_tv_distance", 0.0, result.tv_distance, result.tv_tolerance
        )
    )
    report.table = result.cells
    _joint_checks(report, "joint", result.cells, config.trials)
    report.ensembles["chain"] = result.ensemble


SCENARIO_RUNNERS: Dict[str, Runner] = {
    "theorem1": _run_location,
    "theorem2": _run_indeterminacy,
    "retrodiction": _run_retrodiction,
    "eprb": _run_eprb,
    "dual-ensemble": _run_dual_ensemble,
    "chain": _run_chain,
}


def run_scenario(config: ScenarioConfig, workers: int = 1) -> Report:
    """Execute the configured scenario with the configured seed.

    Args:
        config: Validated scenario configuration
        workers: Parallel trial ranges for Monte Carlo stages

    Returns:
        Report with one record per check

    Raises:
        ScenarioError: If any library operation fails during the run, including
            normalization and dimension errors
    """
    runner = SCENARIO_RUNNERS[config.scenario]
    report = Report(
        scenario=config.scenario,
        config_digest=config.digest(),
        seed=config.seed,
        trials=config.trials,
    )
    logger.info(
        "Running scenario %s (seed %d, %d trials)", config.scenario, config.seed, config.trials
    )
    try:
        runner(config, report, TrialStreams(config.seed), workers)
    except (QLogicError, ValueError) as e:
        raise ScenarioError(config.scenario, e) from e
    failed: List[str] = [check.name for check in report.checks if check.failed]
    if failed:
        logger.info("Failed checks: %s", ", ".join(failed))
    return report
