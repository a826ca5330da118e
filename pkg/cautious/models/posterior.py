from enum import Enum
from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator
from scipy import stats
from scipy.special import logsumexp

SLAB_SPIKE_TOL = 1e-12


class Status(str, Enum):
    ACTIVE = "Active"
    INACTIVE = "Inactive"
    INDETERMINATE = "Indeterminate"


class ShrinkageComponent(BaseModel):
    """One normal component of the orthogonal-design posterior of beta_j."""

    model_config = ConfigDict(frozen=True)

    k: Literal[0, 1] = Field(..., description="0 for spike, 1 for slab")
    beta_hat_kj: float = Field(..., description="Shrunk mean n tau_k^2 betaHat_j / (n tau_k^2 + 1)")
    sigma2_k: float = Field(..., gt=0, description="Component variance sigma^2 tau_k^2 / (n tau_k^2 + 1)")
    log_w_kj: float = Field(..., description="log of the marginal weight w_{k,j}")


class CoefficientMixturePosterior(BaseModel):
    """Two-component normal mixture posterior of a single coefficient."""

    model_config = ConfigDict(frozen=True)

    weight_slab: float = Field(..., ge=0, le=1)
    weight_spike: float = Field(..., ge=0, le=1)
    slab: Tuple[float, float] = Field(..., description="(mean, variance) of the slab component")
    spike: Tuple[float, float] = Field(..., description="(mean, variance) of the spike component")
    log_w_j: float = Field(..., description="log of the normalizer W_j")

    @model_validator(mode="after")
    def _weights_sum_to_one(self):
        if abs(self.weight_slab + self.weight_spike - 1.0) > SLAB_SPIKE_TOL:
            raise ValueError("mixture weights must sum to one")
        return self

    def mean(self) -> float:
        return self.weight_slab * self.slab[0] + self.weight_spike * self.spike[0]

    def variance(self) -> float:
        within = self.weight_slab * self.slab[1] + self.weight_spike * self.spike[1]
        between = self.weight_slab * self.weight_spike * (self.slab[0] - self.spike[0]) ** 2
        return within + between

    def _components(self):
        return (
            (self.weight_slab, stats.norm(self.slab[0], np.sqrt(self.slab[1]))),
            (self.weight_spike, stats.norm(self.spike[0], np.sqrt(self.spike[1]))),
        )

    def pdf(self, x) -> np.ndarray:
        return sum(w * dist.pdf(x) for w, dist in self._components())

    def cdf(self, x) -> np.ndarray:
        return sum(w * dist.cdf(x) for w, dist in self._components())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pick_slab = rng.random(size) < self.weight_slab
        slab = rng.normal(self.slab[0], np.sqrt(self.slab[1]), size)
        spike = rng.normal(self.spike[0], np.sqrt(self.spike[1]), size)
        return np.where(pick_slab, slab, spike)


class OddsInterval(BaseModel):
    """Bounds of the posterior inclusion odds of one covariate over its alpha interval."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    log_lower: float
    log_upper: float

    @model_validator(mode="after")
    def _ordered(self):
        if self.log_lower > self.log_upper:
            raise ValueError(f"odds interval is reversed: [{self.log_lower}, {self.log_upper}] (log scale)")
        return self

    @computed_field
    @property
    def lower(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_lower))

    @computed_field
    @property
    def upper(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_upper))

    @classmethod
    def from_odds(cls, lower: float, upper: float) -> "OddsInterval":
        with np.errstate(divide="ignore"):
            return cls(log_lower=float(np.log(lower)), log_upper=float(np.log(upper)))


class ModelIndicator(BaseModel):
    """A point of the 2^p model space."""

    model_config = ConfigDict(frozen=True)

    gamma: Tuple[int, ...]

    @field_validator("gamma", mode="before")
    @classmethod
    def _bits(cls, v):
        bits = tuple(int(b) for b in np.asarray(v).ravel())
        if any(b not in (0, 1) for b in bits):
            raise ValueError("model indicator entries must be 0 or 1")
        return bits

    @property
    def size(self) -> int:
        return sum(self.gamma)

    def as_array(self) -> np.ndarray:
        return np.array(self.gamma, dtype=bool)


class ModelGeometry(BaseModel):
    """Per-model linear algebra: D_gamma, L_gamma = (x'x + D_gamma)^-1, mu_gamma, r_gamma."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d_gamma: np.ndarray = Field(..., description="Diagonal of D_gamma")
    chol_precision: np.ndarray = Field(..., description="Lower Cholesky factor of x'x + D_gamma")
    mu_gamma: np.ndarray
    r_gamma: float = Field(..., gt=0)
    log_det_l: float

    @property
    def l_gamma(self) -> np.ndarray:
        eye = np.eye(self.chol_precision.shape[0])
        inv_factor = np.linalg.solve(self.chol_precision, eye)
        return inv_factor.T @ inv_factor


class TMixtureComponent(BaseModel):
    """One multivariate-t component of the joint posterior of beta."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: ModelIndicator
    weight_log: float = Field(..., description="Unnormalized log weight (the model log score)")
    weight: float = Field(..., ge=0, le=1, description="Normalized weight P(gamma | y)")
    mean: np.ndarray
    scale: np.ndarray
    dof: float = Field(..., gt=0)

    def logpdf(self, beta) -> np.ndarray:
        return stats.multivariate_t(loc=self.mean, shape=self.scale, df=self.dof).logpdf(beta)


class BetaMixturePosterior(BaseModel):
    """Joint posterior of beta as a weighted mixture of multivariate t distributions."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: List[TMixtureComponent]

    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    def mean(self) -> np.ndarray:
        return sum(c.weight * c.mean for c in self.components)

    def logpdf(self, beta) -> np.ndarray:
        logs = np.array([np.log(c.weight) + c.logpdf(beta) for c in self.components if c.weight > 0])
        return logsumexp(logs, axis=0)


class ModelPosterior(BaseModel):
    """Normalized posterior over an enumerated model space."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    models: np.ndarray = Field(..., description="(2^p, p) boolean array, one row per model")
    log_scores: np.ndarray
    probabilities: np.ndarray

    def probability(self, gamma) -> float:
        target = np.asarray(gamma, dtype=bool)
        match = np.all(self.models == target, axis=1)
        return float(self.probabilities[match][0])

    def marginal_inclusion(self) -> np.ndarray:
        return self.probabilities @ self.models.astype(float)

    def inclusion_log_odds(self) -> np.ndarray:
        """log P(gamma_j = 1 | y) - log P(gamma_j = 0 | y), summed over models in the log domain."""
        out = np.empty(self.models.shape[1])
        for j in range(out.shape[0]):
            column = self.models[:, j]
            out[j] = logsumexp(self.log_scores[column]) - logsumexp(self.log_scores[~column])
        return out
