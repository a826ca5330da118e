from typing import Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cautious.errors import PreconditionError


class SynthSpec(BaseModel):
    """Recipe for a correlated synthetic regression problem."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(50, ge=1)
    p: int = Field(100, ge=1)
    n_active: int = Field(10, ge=0)
    corr_base: float = Field(0.2, ge=0.0, lt=1.0, description="Sigma_ij = corr_base^|i-j|")
    noise_var: float = Field(4.0, gt=0, description="Noise variance (not standard deviation)")
    coef_low: float = Field(1.0, gt=0)
    coef_high: float = Field(4.0, gt=0)
    seed: int = 0

    @model_validator(mode="after")
    def _sizes(self):
        if self.n_active > self.p:
            raise PreconditionError(f"n_active ({self.n_active}) cannot exceed p ({self.p})")
        if self.coef_low > self.coef_high:
            raise PreconditionError("coef_low must not exceed coef_high")
        return self

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "SynthSpec":
        if name not in SYNTH_PRESETS:
            raise PreconditionError(f"unknown dataset preset '{name}'; choose from {sorted(SYNTH_PRESETS)}")
        return cls(**{**SYNTH_PRESETS[name], **overrides})


SYNTH_PRESETS: Dict[str, dict] = {
    "dataset1": {"n": 50, "p": 100, "n_active": 10},
    "dataset2": {"n": 50, "p": 100, "n_active": 20},
    "dataset3": {"n": 50, "p": 100, "n_active": 50},
    "dataset4": {"n": 50, "p": 100, "n_active": 60},
}


class SynthTruth(BaseModel):
    """Sidecar written next to a simulated CSV."""

    spec: SynthSpec
    beta_true: List[float]
    active_indices: List[int] = Field(..., description="0-based indices of the nonzero coefficients")
    response: str = "y"


class ElicitationResult(BaseModel):
    alpha_lo: float = Field(..., gt=0, lt=1)
    alpha_hi: float = Field(..., gt=0, lt=1)
    counts_at_thresholds: Dict[float, int]
    method: Literal["ridge-pvalue"] = "ridge-pvalue"
    ridge_penalty: float

    @model_validator(mode="after")
    def _ordered(self):
        if self.alpha_lo > self.alpha_hi:
            raise ValueError("alpha_lo must not exceed alpha_hi")
        return self
