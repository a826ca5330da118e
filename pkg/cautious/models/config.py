from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cautious.errors import PreconditionError
from cautious.models.chain import ChainSettings
from cautious.models.dataset import ALPHA_PRESETS, AlphaBox, Hyperparameters
from cautious.posterior.exact import DEFAULT_CAP

DEFAULT_ALPHA_PRESET = "nearVacuous"

Backend = Literal["auto", "orthogonal", "exact", "gibbs"]


class RunConfig(BaseModel):
    """Resolved settings of a `fit` run (flags, then config file, then environment, then defaults)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    data: Optional[str] = Field(None, description="Input CSV path")
    response: str = Field("0", description="Response column name or 0-based position")
    standardize: bool = True
    alpha_lo: Optional[float] = None
    alpha_hi: Optional[float] = None
    alpha_preset: Optional[str] = None
    elicit: bool = Field(False, description="Elicit the alpha interval from ridge p-values")
    tau0: Optional[float] = None
    tau1: Optional[float] = None
    s: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    backend: Backend = "auto"
    iters: int = Field(10_000, ge=1)
    burnin: int = Field(2_000, ge=0)
    thin: int = Field(1, ge=1)
    chains: int = Field(2, ge=1)
    grid: Optional[int] = Field(None, ge=1, description="Grid size; endpoints when unset")
    seed: int = 0
    out: Optional[str] = None
    cap: int = Field(DEFAULT_CAP, ge=2)
    sigma2: Optional[float] = Field(None, gt=0)
    screen: Optional[int] = Field(None, ge=1, description="Keep only this many columns by correlation screening")
    trace_dir: Optional[str] = None
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _consistent(self):
        if self.alpha_preset is not None and self.alpha_preset not in ALPHA_PRESETS:
            raise PreconditionError(f"unknown alpha preset '{self.alpha_preset}'; choose from {sorted(ALPHA_PRESETS)}")
        if (self.alpha_lo is None) != (self.alpha_hi is None):
            raise PreconditionError("--alpha-lo and --alpha-hi must be given together")
        if self.alpha_lo is not None and self.alpha_lo > self.alpha_hi:
            raise PreconditionError(f"alpha-lo ({self.alpha_lo}) exceeds alpha-hi ({self.alpha_hi})")
        explicit = sum([self.alpha_preset is not None, self.alpha_lo is not None, self.elicit])
        if explicit > 1:
            raise PreconditionError("choose one of --alpha-preset, --alpha-lo/--alpha-hi and --elicit")
        if self.burnin >= self.iters:
            raise PreconditionError(f"burnin ({self.burnin}) must be smaller than iters ({self.iters})")
        return self

    def hyperparameters(self) -> Hyperparameters:
        given = {k: getattr(self, k) for k in ("tau0", "tau1", "s", "a", "b") if getattr(self, k) is not None}
        return Hyperparameters(**given)

    def chain_settings(self) -> ChainSettings:
        return ChainSettings(iterations=self.iters, burnin=self.burnin, thin=self.thin, chains=self.chains)

    def alpha_box(self, p: int) -> AlphaBox:
        """Explicit bounds, else the named preset, else the near-vacuous default."""
        if self.alpha_lo is not None:
            return AlphaBox.uniform(self.alpha_lo, self.alpha_hi, p)
        return AlphaBox.from_preset(self.alpha_preset or DEFAULT_ALPHA_PRESET, p)
