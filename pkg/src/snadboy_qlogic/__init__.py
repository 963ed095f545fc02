"""snadboy-qlogic - Truth operators, ideal measurement and EPRB pair simulation."""

from .config import ScenarioConfig, load_config, parse_config
from .eprb import (
    BipartiteState,
    bipartite,
    commuting_followup_check,
    contrast_basis,
    conditional_state,
    dual_ensemble_check,
    exact_joint_distribution,
    joint_probability,
    logical_chain_check,
    no_signaling_check,
    simulate_eprb,
)
from .exceptions import (
    BasisError,
    ConfigSyntaxError,
    ConfigurationError,
    ConsistencyError,
    DimensionMismatchError,
    ImpossibleOutcomeError,
    NoncommutingError,
    NormalizationError,
    OutputError,
    QLogicError,
    ScenarioError,
    StatementError,
    UnknownScenarioError,
    UnknownStageError,
)
from .hilbert import ObservableBasis, StateVector, normalize, qubit_basis
from .logic import (
    Statement,
    Truth,
    TruthValue,
    conjunction,
    disjunction,
    elementary,
    expectation,
    indeterminacy_witness,
    negation,
    state_statement,
    support_statement,
    tautology,
    truth_value,
)
from .measurement import Ensemble, measure, retrodiction_check, run_trials, select
from .models import CheckRecord, Report
from .report import emit
from .scenarios import run_scenario
from .streams import TrialStreams

__version__ = "0.1.0"
__all__ = [
    "StateVector",
    "ObservableBasis",
    "normalize",
    "qubit_basis",
    "Statement",
    "Truth",
    "TruthValue",
    "elementary",
    "disjunction",
    "negation",
    "conjunction",
    "tautology",
    "state_statement",
    "expectation",
    "truth_value",
    "support_statement",
    "indeterminacy_witness",
    "TrialStreams",
    "Ensemble",
    "measure",
    "run_trials",
    "select",
    "retrodiction_check",
    "BipartiteState",
    "bipartite",
    "conditional_state",
    "joint_probability",
    "exact_joint_distribution",
    "dual_ensemble_check",
    "simulate_eprb",
    "commuting_followup_check",
    "contrast_basis",
    "logical_chain_check",
    "no_signaling_check",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "run_scenario",
    "CheckRecord",
    "Report",
    "emit",
    "QLogicError",
    "ConfigurationError",
    "ConfigSyntaxError",
    "UnknownScenarioError",
    "NormalizationError",
    "DimensionMismatchError",
    "BasisError",
    "StatementError",
    "NoncommutingError",
    "ImpossibleOutcomeError",
    "UnknownStageError",
    "ConsistencyError",
    "OutputError",
    "ScenarioError",
]
