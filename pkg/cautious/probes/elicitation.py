"""Heuristic elicitation of the alpha interval from ridge-regression p-values.

Ridge estimates are biased, so the p-values are approximate; they only serve
to gauge how many covariates look active.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from cautious.errors import DomainError
from cautious.models.dataset import Dataset
from cautious.models.synth import ElicitationResult
from cautious.numerics import guarded_cholesky

logger = logging.getLogger(__name__)

DEFAULT_RIDGE_PENALTY = 1.0


@dataclass(frozen=True)
class RidgeFit:
    coef: np.ndarray
    std_err: np.ndarray
    sigma2: float
    dof: float


def ridge_fit(data: Dataset, penalty: float = DEFAULT_RIDGE_PENALTY) -> RidgeFit:
    """Ridge coefficients with sandwich standard errors sigma^2 (G+lI)^-1 G (G+lI)^-1."""
    if not penalty > 0:
        raise DomainError(f"ridge penalty must be positive, got {penalty}")
    gram = data.gram
    factor = guarded_cholesky(gram.xtx + penalty * np.eye(data.p), context="for the ridge fit")
    coef = linalg.cho_solve((factor, True), gram.xty)
    inverse = linalg.cho_solve((factor, True), np.eye(data.p))
    residual = data.y - data.x @ coef
    effective = float(np.trace(inverse @ gram.xtx))
    dof = max(data.n - effective, 1.0)
    sigma2 = float(residual @ residual) / dof
    sandwich = sigma2 * inverse @ gram.xtx @ inverse
    return RidgeFit(coef=coef, std_err=np.sqrt(np.maximum(np.diag(sandwich), 0.0)), sigma2=sigma2, dof=dof)


def ridge_sigma2(data: Dataset, penalty: float = DEFAULT_RIDGE_PENALTY) -> float:
    """Residual variance of the ridge fit, used when sigma^2 must be supplied."""
    return ridge_fit(data, penalty).sigma2


def ridge_pvalues(data: Dataset, penalty: float = DEFAULT_RIDGE_PENALTY) -> np.ndarray:
    fit = ridge_fit(data, penalty)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(fit.std_err > 0, np.abs(fit.coef) / fit.std_err, 0.0)
    return 2.0 * stats.norm.sf(z)


def elicit_alpha_interval(
    data: Dataset, p_low: float = 0.01, p_high: float = 0.2, ridge_penalty: float = DEFAULT_RIDGE_PENALTY
) -> ElicitationResult:
    if not (0.0 < p_low < p_high < 1.0):
        raise DomainError(f"need 0 < p_low < p_high < 1, got {p_low}, {p_high}")
    pvalues = ridge_pvalues(data, ridge_penalty)
    counts = {t: int(np.sum(pvalues < t)) for t in (p_low, p_high)}
    margin = 1.0 / (2.0 * data.p)
    lo, hi = (float(np.clip(counts[t] / data.p, margin, 1.0 - margin)) for t in (p_low, p_high))
    logger.info("elicited alpha interval [%.4f, %.4f] from ridge p-values %s", lo, hi, counts)
    return ElicitationResult(alpha_lo=lo, alpha_hi=hi, counts_at_thresholds=counts, ridge_penalty=ridge_penalty)
