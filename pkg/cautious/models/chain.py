from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cautious.errors import DomainError, PreconditionError
from cautious.models.posterior import OddsInterval
from cautious.numerics import smoothed_log_odds


GammaUpdate = Literal["joint", "conditional"]


@dataclass
class GibbsState:
    """Current values of the four sampler blocks."""

    beta: np.ndarray
    gamma: np.ndarray
    q: np.ndarray
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        if np.any((self.q <= 0.0) | (self.q >= 1.0)):
            raise DomainError("q entries must lie in (0, 1)")


class ChainSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(10_000, ge=1, description="Total sweeps, burn-in included")
    burnin: int = Field(2_000, ge=0)
    thin: int = Field(1, ge=1)
    chains: int = Field(2, ge=1)
    update: GammaUpdate = Field("joint", description="Gamma step: joint (gamma_j, beta_j) redraw or gamma given beta")

    @model_validator(mode="after")
    def _burnin_before_end(self):
        if self.burnin >= self.iterations:
            raise ValueError(f"burnin ({self.burnin}) must be smaller than iterations ({self.iterations})")
        return self


class ChainOutput(BaseModel):
    """Post-burn-in accumulators of one chain, or of several merged chains."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kept_draws: int = Field(..., ge=1)
    inclusion_counts: np.ndarray
    beta_sum: np.ndarray
    beta_sum_sq: np.ndarray
    sigma2_sum: float
    sigma2_sum_sq: float
    iterations: int
    burnin: int
    thin: int
    seeds: List[str] = Field(default_factory=list, description="Seed provenance, one entry per chain")
    trace_path: Optional[str] = None

    @model_validator(mode="after")
    def _counts_in_range(self):
        if np.any(self.inclusion_counts < 0) or np.any(self.inclusion_counts > self.kept_draws):
            raise ValueError("inclusion counts must lie in [0, kept_draws]")
        return self

    @property
    def chains(self) -> int:
        return max(1, len(self.seeds))

    def inclusion_frequency(self) -> np.ndarray:
        return self.inclusion_counts / self.kept_draws

    def inclusion_log_odds(self) -> np.ndarray:
        """Half-smoothed log odds, finite even when a covariate was never (or always) included."""
        return smoothed_log_odds(self.inclusion_counts, self.kept_draws)

    def posterior_mean(self) -> np.ndarray:
        return self.beta_sum / self.kept_draws

    def posterior_variance(self) -> np.ndarray:
        mean = self.posterior_mean()
        return np.maximum(self.beta_sum_sq / self.kept_draws - mean**2, 0.0)

    def sigma2_mean(self) -> float:
        return self.sigma2_sum / self.kept_draws

    @classmethod
    def merge(cls, outputs: List["ChainOutput"]) -> "ChainOutput":
        if not outputs:
            raise PreconditionError("nothing to merge")
        first = outputs[0]
        return cls(
            kept_draws=sum(o.kept_draws for o in outputs),
            inclusion_counts=sum(o.inclusion_counts for o in outputs),
            beta_sum=sum(o.beta_sum for o in outputs),
            beta_sum_sq=sum(o.beta_sum_sq for o in outputs),
            sigma2_sum=sum(o.sigma2_sum for o in outputs),
            sigma2_sum_sq=sum(o.sigma2_sum_sq for o in outputs),
            iterations=first.iterations,
            burnin=first.burnin,
            thin=first.thin,
            seeds=[s for o in outputs for s in o.seeds],
        )


Source = Literal["closed-form", "exact", "gibbs"]


class SweepConfiguration(BaseModel):
    """One evaluated prior inclusion vector and the fit it produced."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: Tuple[float, ...]
    log_odds: np.ndarray = Field(..., description="Posterior inclusion log odds per covariate")
    posterior_mean: np.ndarray
    chain: Optional[ChainOutput] = None

    @property
    def active_set(self) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.log_odds > 0.0)]


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: Source
    schedule: str = Field(..., description="'endpoints' or 'grid(G)'")
    configurations: List[SweepConfiguration]

    @property
    def log_odds_lower(self) -> np.ndarray:
        return np.min([c.log_odds for c in self.configurations], axis=0)

    @property
    def log_odds_upper(self) -> np.ndarray:
        return np.max([c.log_odds for c in self.configurations], axis=0)

    def odds_intervals(self) -> List[OddsInterval]:
        return [
            OddsInterval(log_lower=float(lo), log_upper=float(hi))
            for lo, hi in zip(self.log_odds_lower, self.log_odds_upper)
        ]
