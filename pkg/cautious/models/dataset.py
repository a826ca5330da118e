import logging
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cautious.errors import DomainError, PreconditionError

logger = logging.getLogger(__name__)

STANDARDIZE_TOL = 1e-10


def _frozen_array(value, ndim: int, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Gram:
    """Sufficient statistics of a dataset for the linear model."""

    xtx: np.ndarray
    xty: np.ndarray
    yty: float
    n: int
    p: int


class Dataset(BaseModel):
    """Response vector and design matrix with their provenance."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: np.ndarray
    x: np.ndarray
    standardized: bool = False
    column_means: Optional[np.ndarray] = None
    column_scales: Optional[np.ndarray] = None
    response_mean: Optional[float] = None
    column_names: List[str] = Field(default_factory=list)
    column_index: List[int] = Field(default_factory=list, description="Original (pre-screening) column numbers")
    response_name: str = "y"

    @field_validator("y", mode="before")
    @classmethod
    def _coerce_y(cls, v):
        return _frozen_array(v, 1, "y")

    @field_validator("x", mode="before")
    @classmethod
    def _coerce_x(cls, v):
        return _frozen_array(v, 2, "x")

    @field_validator("column_means", "column_scales", mode="before")
    @classmethod
    def _coerce_vectors(cls, v):
        return None if v is None else _frozen_array(v, 1, "column statistics")

    @model_validator(mode="after")
    def _check_shapes(self):
        n, p = self.x.shape
        if n < 1 or p < 1:
            raise DomainError(f"dataset needs n >= 1 and p >= 1, got n={n}, p={p}")
        if self.y.shape[0] != n:
            raise DomainError(f"y has {self.y.shape[0]} rows but x has {n}")
        if not self.column_names:
            object.__setattr__(self, "column_names", [f"x{j + 1}" for j in range(p)])
        if not self.column_index:
            object.__setattr__(self, "column_index", list(range(p)))
        if len(self.column_names) != p or len(self.column_index) != p:
            raise DomainError("column_names/column_index must have one entry per column")
        if self.standardized:
            if abs(float(self.y.mean())) > STANDARDIZE_TOL * max(1.0, float(np.abs(self.y).max())):
                raise PreconditionError("standardized dataset must have a centered response")
            means = self.x.mean(axis=0)
            variances = self.x.var(axis=0)
            if np.any(np.abs(means) > STANDARDIZE_TOL):
                raise PreconditionError("standardized dataset has a column with nonzero mean")
            bad = (np.abs(variances - 1.0) > STANDARDIZE_TOL) & (variances > STANDARDIZE_TOL)
            if np.any(bad):
                raise PreconditionError(f"standardized dataset has non-unit variance in column {int(np.argmax(bad)) + 1}")
        return self

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])

    @cached_property
    def gram(self) -> Gram:
        return Gram(
            xtx=self.x.T @ self.x,
            xty=self.x.T @ self.y,
            yty=float(self.y @ self.y),
            n=self.n,
            p=self.p,
        )


class Hyperparameters(BaseModel):
    """Fixed constants of the hierarchical model."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    # Reports disclose when any of s, a, b falls back to these.
    DEFAULT_PRIOR: ClassVar[dict] = {"s": 1.0, "a": 0.01, "b": 0.01}

    tau0: float = Field(1e-6, gt=0, description="Spike scale")
    tau1: float = Field(5.0, gt=0, description="Slab scale")
    s: float = Field(1.0, gt=0, description="Beta concentration")
    a: float = Field(0.01, gt=0, description="Inverse-gamma shape")
    b: float = Field(0.01, gt=0, description="Inverse-gamma rate")

    @model_validator(mode="after")
    def _ordering(self):
        if not self.tau0 < self.tau1:
            raise DomainError(f"need tau0 < tau1, got tau0={self.tau0}, tau1={self.tau1}")
        if not (self.tau0 < 1.0 < self.tau1):
            logger.warning("tau0=%g, tau1=%g outside the encouraged range tau0 < 1 < tau1", self.tau0, self.tau1)
        return self

    def tau(self, gamma) -> np.ndarray:
        return np.where(np.asarray(gamma, dtype=bool), self.tau1, self.tau0)

    def prior_precision(self, gamma) -> np.ndarray:
        """Diagonal of D_gamma: tau1^-2 where gamma=1, tau0^-2 where gamma=0."""
        return 1.0 / self.tau(gamma) ** 2

    def defaulted_prior_constants(self) -> List[str]:
        return [name for name in ("s", "a", "b") if name not in self.model_fields_set]


class SpikeSlabDensityParams(BaseModel):
    """Selects the spike (gamma=0) or slab (gamma=1) component at a given sigma^2."""

    model_config = ConfigDict(frozen=True)

    gamma: Literal[0, 1]
    sigma2: float = Field(gt=0)

    def variance(self, hp: Hyperparameters) -> float:
        scale = hp.tau1 if self.gamma == 1 else hp.tau0
        return self.sigma2 * scale**2


# Named alpha boxes: real-data elicitations, near-vacuous boxes and the synthetic presets.
ALPHA_PRESETS: dict[str, Tuple[float, float]] = {
    "diabetes": (0.2, 0.5),
    "gaia": (0.0625, 0.1875),
    "lymphoma": (0.1, 0.15),
    "nearVacuous": (0.05, 0.95),
    "nearVacuousReal": (0.1, 0.9),
    "dataset1": (0.05, 0.12),
    "dataset2": (0.08, 0.22),
    "dataset3": (0.10, 0.33),
    "dataset4": (0.16, 0.34),
}


class AlphaBox(BaseModel):
    """Per-covariate interval of prior inclusion probabilities."""

    model_config = ConfigDict(frozen=True)

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    @model_validator(mode="after")
    def _bounds(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise PreconditionError("alpha box bounds must be non-empty and of equal length")
        for j, (lo, hi) in enumerate(zip(self.lo, self.hi)):
            if not (0.0 < lo <= hi < 1.0):
                raise PreconditionError(f"alpha box entry {j + 1} must satisfy 0 < lo <= hi < 1, got [{lo}, {hi}]")
        return self

    @classmethod
    def uniform(cls, lo: float, hi: float, p: int) -> "AlphaBox":
        return cls(lo=(float(lo),) * p, hi=(float(hi),) * p)

    @classmethod
    def from_preset(cls, name: str, p: int) -> "AlphaBox":
        if name not in ALPHA_PRESETS:
            raise PreconditionError(f"unknown alpha preset '{name}'; choose from {sorted(ALPHA_PRESETS)}")
        return cls.uniform(*ALPHA_PRESETS[name], p)

    @property
    def p(self) -> int:
        return len(self.lo)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def bounds(self, j: int) -> Tuple[float, float]:
        return self.lo[j], self.hi[j]

    def endpoints(self) -> List[np.ndarray]:
        if self.is_degenerate:
            return [np.array(self.lo)]
        return [np.array(self.lo), np.array(self.hi)]

    def grid(self, size: int) -> List[np.ndarray]:
        """`size` equispaced vector configurations from lo to hi."""
        if size < 1:
            raise PreconditionError("grid size must be at least 1")
        if self.is_degenerate:
            return [np.array(self.lo)]
        lo, hi = np.array(self.lo), np.array(self.hi)
        if size == 1:
            return [0.5 * (lo + hi)]
        return [lo + t * (hi - lo) for t in np.linspace(0.0, 1.0, size)]

    def restrict(self, indices) -> "AlphaBox":
        return AlphaBox(lo=tuple(self.lo[i] for i in indices), hi=tuple(self.hi[i] for i in indices))
