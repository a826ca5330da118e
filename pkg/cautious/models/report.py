from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from cautious.models.dataset import Hyperparameters
from cautious.models.posterior import OddsInterval, Status

# Bump on any field change; `cautious schema` prints the matching JSON schema.
SCHEMA_VERSION = "1.0"


class CovariateEntry(BaseModel):
    column: int = Field(..., description="1-based column number in the input file (before screening)")
    name: str
    status: Status
    odds: OddsInterval
    source: Literal["closed-form", "exact", "gibbs"]
    alpha_lo: float
    alpha_hi: float


class ConfigurationEntry(BaseModel):
    alpha: List[float] = Field(..., description="Prior inclusion vector of this configuration")
    active_set: List[int] = Field(..., description="1-based column numbers with inclusion odds > 1")
    posterior_mean: List[float] = Field(..., description="E(beta_j | y) per covariate, on the original column scale")
    squared_error: float = Field(..., ge=0)
    delta_beta: Optional[float] = Field(None, ge=0, description="Only when the true coefficients are known")


class ConfusionCounts(BaseModel):
    """Counts as (determinate, indeterminate) pairs, printed as 'x-y'."""

    act: Tuple[int, int]
    false_act: Optional[Tuple[int, int]] = None
    inact: Tuple[int, int]
    false_inact: Optional[Tuple[int, int]] = None

    @staticmethod
    def hyphen(pair: Optional[Tuple[int, int]]) -> str:
        return "n/a" if pair is None else f"{pair[0]}-{pair[1]}"

    def row(self) -> List[str]:
        return [self.hyphen(p) for p in (self.act, self.false_act, self.inact, self.false_inact)]


class Aggregates(BaseModel):
    min_sq_err: float = Field(..., ge=0)
    max_sq_err: float = Field(..., ge=0)
    model_indeterminacy: float = Field(..., ge=0, le=1)
    optimistic: int = Field(..., description="Index into `configurations` attaining the minimum error")
    pessimistic: int = Field(..., description="Index into `configurations` attaining the maximum error")
    delta_beta: Optional[float] = Field(None, description="Delta(beta) of the optimistic fit")
    delta_beta_pessimistic: Optional[float] = None


class DataSummary(BaseModel):
    path: Optional[str] = None
    n: int
    p: int
    response: str
    standardized: bool
    screened_from: Optional[int] = Field(None, description="Column count before screening")


class SelectionReport(BaseModel):
    """Outcome of one cautious selection run."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    schema_version: str = SCHEMA_VERSION
    backend: Literal["closed-form", "exact", "gibbs"]
    schedule: str
    seed: int
    data: DataSummary
    hyperparameters: Hyperparameters
    sigma2: Optional[float] = Field(None, description="Known variance used by the closed-form backend")
    disclosures: List[str] = Field(default_factory=list)
    covariates: List[CovariateEntry]
    configurations: List[ConfigurationEntry]
    aggregates: Aggregates
    confusion: Dict[str, ConfusionCounts] = Field(
        default_factory=dict, description="Keyed by 'optimistic' and 'pessimistic'"
    )

    def count(self, status: Status) -> int:
        return sum(1 for c in self.covariates if c.status == status)


class MetricsSummary(BaseModel):
    """Accuracy measures recomputed from a saved report."""

    min_sq_err: float
    max_sq_err: float
    model_indeterminacy: float
    optimistic_alpha: List[float]
    pessimistic_alpha: List[float]
    delta_beta: Dict[str, float] = Field(default_factory=dict, description="Keyed by 'optimistic' and 'pessimistic'")
    confusion: Dict[str, ConfusionCounts] = Field(default_factory=dict)
    status_counts: Dict[str, int] = Field(default_factory=dict)
