"""Data models for scenario configuration and verification reports."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .eprb import JointCell
from .hilbert import ObservableBasis, qubit_basis
from .utils import pairs_to_complex


def complex_pair(pair: Any) -> List[float]:
    """Validate one [re, im] pair."""
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValueError(f"Complex numbers must be [re, im] pairs, got {pair!r}")
    for part in pair:
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise ValueError(f"Complex parts must be numbers, got {part!r}")
    return list(pair)


class BasisSpec(BaseModel):
    """One analyzer setting: a dim-2 angle, or explicit eigenvectors and eigenvalues."""

    model_config = ConfigDict(extra="forbid")

    angle: Optional[float] = None
    eigenvectors: Optional[List[List[Any]]] = None
    eigenvalues: Optional[List[float]] = None
    name: Optional[str] = None

    @field_validator("eigenvectors")
    def validate_eigenvectors(cls, v: Optional[List[List[Any]]]) -> Optional[List[List[Any]]]:
        """Validate that every eigenvector entry is an [re, im] pair."""
        if v is None:
            return v
        if not v:
            raise ValueError("Eigenvector list must not be empty")
        return [[complex_pair(entry) for entry in vector] for vector in v]

    @model_validator(mode="after")
    def validate_form(self) -> "BasisSpec":
        """Exactly one of ``angle`` or ``eigenvectors`` + ``eigenvalues``."""
        if (self.angle is None) == (self.eigenvectors is None):
            raise ValueError("Basis needs exactly one of 'angle' or 'eigenvectors'")
        if self.eigenvectors is not None and self.eigenvalues is None:
            raise ValueError("Explicit eigenvectors need a matching 'eigenvalues' list")
        if self.angle is not None and self.eigenvalues is not None:
            raise ValueError("An 'angle' basis has fixed eigenvalues +1 and -1")
        return self

    @property
    def dim(self) -> int:
        return 2 if self.eigenvectors is None else len(self.eigenvectors)

    def to_basis(self, default_name: str) -> ObservableBasis:
        """Build the observable basis.

        Raises:
            BasisError: If the eigenvectors are not orthonormal
            DimensionMismatchError: If vectors and eigenvalues disagree in size
        """
        name = self.name or default_name
        if self.angle is not None:
            return qubit_basis(self.angle, name)
        vectors = [pairs_to_complex(vector) for vector in self.eigenvectors or []]
        return ObservableBasis.from_vectors(vectors, self.eigenvalues or [], name)


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CheckRecord(BaseModel):
    """One verified identity: exact value, observed value, allowed deviation."""

    name: str
    exact: Optional[float] = None
    empirical: Optional[float] = None
    tolerance: Optional[float] = None
    status: CheckStatus

    @classmethod
    def compare(cls, name: str, exact: float, empirical: float, tolerance: float) -> "CheckRecord":
        """Pass when |empirical - exact| <= tolerance."""
        ok = abs(empirical - exact) <= tolerance
        return cls(
            name=name,
            exact=exact,
            empirical=empirical,
            tolerance=tolerance,
            status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        )

    @classmethod
    def flag(
        cls,
        name: str,
        ok: bool,
        exact: Optional[float] = None,
        empirical: Optional[float] = None,
        tolerance: Optional[float] = None,
    ) -> "CheckRecord":
        """Pass/fail record for a yes-or-no check; the numbers are informational."""
        return cls(
            name=name,
            exact=exact,
            empirical=empirical,
            tolerance=tolerance,
            status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        )

    @classmethod
    def skipped(cls, name: str, exact: Optional[float] = None) -> "CheckRecord":
        return cls(name=name, exact=exact, status=CheckStatus.SKIPPED)

    @property
    def failed(self) -> bool:
        return self.status is CheckStatus.FAIL


class Report(BaseModel):
    """Outcome of one scenario run."""

    scenario: str
    config_digest: str
    seed: int
    trials: int
    checks: List[CheckRecord] = []
    notes: List[str] = []
    table: List[JointCell] = []
    ensembles: Dict[str, Any] = Field(default_factory=dict, exclude=True, repr=False)

    @property
    def passed(self) -> bool:
        return not any(check.failed for check in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1
