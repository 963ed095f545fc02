"""Configuration management for scenario runs."""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Type, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .eprb import NORM_TOLERANCE, ORDERS, BipartiteState
from .exceptions import (
    BasisError,
    ConfigSyntaxError,
    ConfigurationError,
    DimensionMismatchError,
    NormalizationError,
    UnknownScenarioError,
)
from .hilbert import ObservableBasis, StateVector, normalize
from .models import BasisSpec, complex_pair
from .streams import MAX_SEED

SCENARIOS = ("theorem1", "theorem2", "retrodiction", "eprb", "dual-ensemble", "chain")
# Descriptive names accepted in configs and on the command line.
SCENARIO_ALIASES = {"location": "theorem1", "indeterminacy": "theorem2"}
KNOWN_SCENARIOS = SCENARIOS + tuple(SCENARIO_ALIASES)
BIPARTITE_SCENARIOS = frozenset({"eprb", "dual-ensemble", "chain"})

PathKey = Sequence[Union[str, int]]


class ScenarioConfig(BaseModel):
    """One scenario run: state, channel bases and Monte Carlo settings.

    Single-system states are amplitude vectors in computational coordinates.
    Pair states are amplitude matrices a[i, j] over the K and L bases.
    """

    model_config = ConfigDict(extra="forbid")

    scenario: str
    dims: List[int]
    state: List[Any]
    bases: Dict[str, BasisSpec]
    analyzers: Dict[str, List[BasisSpec]] = {}
    trials: int = 100000
    seed: int = 42
    order: str = "1-then-2"
    steps: int = 1
    eps: float = 1e-9
    output: Optional[str] = None

    @field_validator("scenario")
    def validate_scenario(cls, v: str) -> str:
        """Accept canonical names and aliases; store the canonical name."""
        if v not in KNOWN_SCENARIOS:
            raise ValueError(f"Unknown scenario '{v}' (known: {', '.join(KNOWN_SCENARIOS)})")
        return SCENARIO_ALIASES.get(v, v)

    @field_validator("dims")
    def validate_dims(cls, v: List[int]) -> List[int]:
        if not v or any(d < 1 for d in v):
            raise ValueError("Dimensions must be positive integers")
        return v

    @field_validator("state")
    def validate_state(cls, v: List[Any]) -> List[Any]:
        """Accept a vector of [re, im] pairs or a matrix of them."""
        if not v:
            raise ValueError("State must not be empty")
        is_matrix = isinstance(v[0], (list, tuple)) and v[0] and isinstance(v[0][0], (list, tuple))
        if not is_matrix:
            return [complex_pair(entry) for entry in v]
        rows = []
        for row in v:
            if not isinstance(row, (list, tuple)):
                raise ValueError("Every state matrix row must be a list of [re, im] pairs")
            rows.append([complex_pair(entry) for entry in row])
        return rows

    @field_validator("trials")
    def validate_trials(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Number of trials must be at least 1")
        return v

    @field_validator("seed")
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v <= MAX_SEED:
            raise ValueError("Seed must be a 64-bit unsigned integer")
        return v

    @field_validator("order")
    def validate_order(cls, v: str) -> str:
        if v not in ORDERS:
            raise ValueError(f"Order must be one of {', '.join(ORDERS)}")
        return v

    @field_validator("steps")
    def validate_steps(cls, v: int) -> int:
        if v < 0:
            raise ValueError("Number of steps must be non-negative")
        return v

    @field_validator("eps")
    def validate_eps(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("Support threshold must be positive")
        return v

    @property
    def is_bipartite(self) -> bool:
        return self.scenario in BIPARTITE_SCENARIOS

    @property
    def channel_keys(self) -> List[str]:
        return ["K", "L"] if self.is_bipartite else ["K"]

    def basis(self, key: str) -> ObservableBasis:
        """Observable basis configured under ``key`` (K or L)."""
        if key not in self.bases:
            raise ConfigurationError(f"Basis '{key}' not configured")
        return self.bases[key].to_basis(key)

    def analyzer_bases(self, key: str) -> List[ObservableBasis]:
        """Alternative settings for one channel, named K', K'', ... by default."""
        return [
            spec.to_basis(key + "'" * (index + 1))
            for index, spec in enumerate(self.analyzers.get(key, []))
        ]

    def state_array(self) -> np.ndarray:
        """Configured amplitudes as a complex vector or matrix."""
        if isinstance(self.state[0][0], list):
            widths = {len(row) for row in self.state}
            if len(widths) != 1:
                raise DimensionMismatchError("State matrix rows have different lengths")
            return np.array(
                [[complex(re, im) for re, im in row] for row in self.state], dtype=complex
            )
        return np.array([complex(re, im) for re, im in self.state], dtype=complex)

    def state_vector(self) -> StateVector:
        return normalize(self.state_array())

    def bipartite_state(self) -> BipartiteState:
        return BipartiteState(self.state_array(), self.basis("K"), self.basis("L"))

    def with_overrides(self, **updates: Any) -> "ScenarioConfig":
        """Copy with command-line overrides applied and re-validated.

        Raises:
            ConfigSyntaxError: If an override is invalid
        """
        data = self.model_dump()
        data.update({key: value for key, value in updates.items() if value is not None})
        try:
            return ScenarioConfig(**data)
        except ValidationError as e:
            raise ConfigSyntaxError(_first_error(e))

    def digest(self) -> str:
        """Short SHA-256 of the canonical JSON form."""
        canonical = json.dumps(
            self.model_dump(mode="json", exclude_none=True), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _line_of(root: Optional[yaml.Node], path: PathKey) -> Optional[int]:
    """1-based line of the deepest node reachable along ``path``."""
    node = root
    line = None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(key):
                    line = key_node.start_mark.line + 1
                    node = value_node
                    break
            else:
                return line
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            return line
    return line


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def _fail(
    error_class: Type[ConfigurationError],
    message: str,
    root: Optional[yaml.Node],
    path: PathKey,
) -> ConfigurationError:
    return error_class(message, line=_line_of(root, path))


def check_config(config: ScenarioConfig, root: Optional[yaml.Node] = None) -> None:
    """Cross-field checks: dimensions, bases and state normalization.

    Args:
        config: Schema-valid configuration
        root: Composed YAML node, used to anchor errors to lines

    Raises:
        ConfigSyntaxError: If required bases are missing or unexpected
        DimensionMismatchError: If dims, bases and state disagree
        NormalizationError: If the state is not unit norm
        ConfigurationError: If a basis is not orthonormal
    """
    rank = 2 if config.is_bipartite else 1
    if len(config.dims) != rank:
        raise _fail(
            DimensionMismatchError,
            f"Scenario '{config.scenario}' needs {rank} dimension(s), got {len(config.dims)}",
            root,
            ["dims"],
        )

    keys = config.channel_keys
    missing = [key for key in keys if key not in config.bases]
    if missing:
        raise _fail(ConfigSyntaxError, f"Missing basis: {', '.join(missing)}", root, ["bases"])
    for section in ("bases", "analyzers"):
        extra = sorted(set(getattr(config, section)) - set(keys))
        if extra:
            raise _fail(
                ConfigSyntaxError, f"Unexpected {section} key: {', '.join(extra)}", root, [section]
            )

    dims = dict(zip(keys, config.dims))
    entries = [(["bases", key], key, config.bases[key]) for key in keys]
    for key, specs in config.analyzers.items():
        entries.extend((["analyzers", key, i], key, spec) for i, spec in enumerate(specs))
    for path, key, spec in entries:
        if spec.dim != dims[key]:
            raise _fail(
                DimensionMismatchError,
                f"Basis for {key} has dimension {spec.dim}, expected {dims[key]}",
                root,
                path,
            )
        try:
            spec.to_basis(key)
        except DimensionMismatchError as e:
            raise _fail(DimensionMismatchError, str(e), root, path)
        except BasisError as e:
            raise _fail(ConfigurationError, str(e), root, path)

    try:
        amplitudes = config.state_array()
    except DimensionMismatchError as e:
        raise _fail(DimensionMismatchError, str(e), root, ["state"])
    if amplitudes.shape != tuple(config.dims):
        raise _fail(
            DimensionMismatchError,
            f"State shape {amplitudes.shape} does not match dims {tuple(config.dims)}",
            root,
            ["state"],
        )
    length = float(np.linalg.norm(amplitudes))
    if abs(length - 1.0) > NORM_TOLERANCE:
        raise _fail(
            NormalizationError, f"state not normalized (norm {length:.12g})", root, ["state"]
        )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML scenario configuration.

    Args:
        text: YAML document

    Returns:
        Validated configuration

    Raises:
        ConfigSyntaxError: If the YAML is malformed or violates the schema
        UnknownScenarioError: If the scenario name is not known
        DimensionMismatchError: If dimensions disagree
        NormalizationError: If the state is not unit norm
    """
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigSyntaxError(f"Failed to parse YAML: {problem}", line=line)

    if not isinstance(data, dict):
        raise ConfigSyntaxError("Configuration must be a dictionary", line=1)

    scenario = data.get("scenario")
    if scenario is not None and scenario not in KNOWN_SCENARIOS:
        raise _fail(
            UnknownScenarioError,
            f"Unknown scenario '{scenario}' (known: {', '.join(KNOWN_SCENARIOS)})",
            root,
            ["scenario"],
        )

    try:
        config = ScenarioConfig(**data)
    except ValidationError as e:
        loc = e.errors()[0]["loc"]
        raise _fail(ConfigSyntaxError, f"Invalid configuration: {_first_error(e)}", root, loc)

    check_config(config, root)
    return config


def load_config(config_file: Path) -> ScenarioConfig:
    """Load a scenario configuration from a YAML file.

    Raises:
        ConfigurationError: If the file is missing or invalid
    """
    config_file = Path(config_file)
    if not config_file.exists():
        raise ConfigurationError(f"Configuration file not found: {config_file}")
    return parse_config(config_file.read_text())


def dump_config(config: ScenarioConfig) -> str:
    """YAML text that parses back to an equal configuration."""
    return yaml.safe_dump(
        config.model_dump(exclude_none=True), default_flow_style=None, sort_keys=False
    )


def save_config(config: ScenarioConfig, config_file: Path) -> None:
    """Save a scenario configuration to a YAML file."""
    Path(config_file).write_text(dump_config(config))


EXAMPLE_CONFIGS: Dict[str, str] = {
    "theorem1": """# Support of a superposition in the K basis
scenario: theorem1
dims: [3]

# (|0> + |2>) / sqrt(2), computational coordinates
state:
  - [0.7071067811865476, 0.0]
  - [0.0, 0.0]
  - [0.7071067811865476, 0.0]

bases:
  K:
    eigenvectors:
      - [[1, 0], [0, 0], [0, 0]]
      - [[0, 0], [1, 0], [0, 0]]
      - [[0, 0], [0, 0], [1, 0]]
    eigenvalues: [0, 1, 2]

trials: 1000
seed: 42
""",
    "theorem2": """# Elementary statements on an equal superposition are neither true nor false
scenario: theorem2
dims: [3]

state:
  - [0.5773502691896258, 0.0]
  - [0.5773502691896258, 0.0]
  - [0.5773502691896258, 0.0]

bases:
  K:
    eigenvectors:
      - [[1, 0], [0, 0], [0, 0]]
      - [[0, 0], [1, 0], [0, 0]]
      - [[0, 0], [0, 0], [1, 0]]
    eigenvalues: [0, 1, 2]

trials: 100000
seed: 42
""",
    "retrodiction": """# Measure K once at t0, or at t0 - dt and again at t0
scenario: retrodiction
dims: [2]

# sqrt(0.8)|0> + sqrt(0.2)|1>
state:
  - [0.8944271909999159, 0.0]
  - [0.4472135954999579, 0.0]

bases:
  K: {angle: 0.0}

trials: 100000
seed: 42
""",
    "eprb": """# Bell pair measured with matched analyzers
scenario: eprb
dims: [2, 2]

# a[i][j] over K (rows) and L (columns)
state:
  - [[0.7071067811865476, 0.0], [0.0, 0.0]]
  - [[0.0, 0.0], [0.7071067811865476, 0.0]]

bases:
  K: {angle: 0.0}
  L: {angle: 0.0}

# Alternative channel-1 settings for the no-signaling check
analyzers:
  K:
    - {angle: 0.7853981633974483}

trials: 100000
seed: 42
order: 1-then-2
""",
    "dual-ensemble": """# Joint probabilities reached through either channel
scenario: dual-ensemble
dims: [2, 3]

state:
  - [[0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
  - [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0]]

bases:
  K: {angle: 0.0}
  L:
    eigenvectors:
      - [[1, 0], [0, 0], [0, 0]]
      - [[0, 0], [1, 0], [0, 0]]
      - [[0, 0], [0, 0], [1, 0]]
    eigenvalues: [1, 0, -1]

seed: 42
""",
    "chain": """# Channel 1 measured repeatedly before channel 2
scenario: chain
dims: [2, 2]

state:
  - [[0.7071067811865476, 0.0], [0.0, 0.0]]
  - [[0.0, 0.0], [0.7071067811865476, 0.0]]

bases:
  K: {angle: 0.0}
  L: {angle: 0.0}

steps: 5
trials: 10000
seed: 42
""",
}


def create_example_config(output_file: Path, scenario: str = "eprb") -> None:
    """Write an example configuration for ``scenario``.

    Raises:
        UnknownScenarioError: If no example exists for ``scenario``
    """
    name = SCENARIO_ALIASES.get(scenario, scenario)
    if name not in EXAMPLE_CONFIGS:
        raise UnknownScenarioError(
            f"Unknown scenario '{scenario}' (known: {', '.join(KNOWN_SCENARIOS)})"
        )
    Path(output_file).write_text(EXAMPLE_CONFIGS[name])
