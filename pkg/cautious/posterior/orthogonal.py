"""Closed-form posteriors for an orthogonal design (x'x = nI) with known sigma^2.

Every covariate is handled independently: the posterior of beta_j is a
two-component normal mixture whose weights only depend on the least-squares
estimate betaHat_j.
"""

import logging
from typing import Iterable, List, Tuple

import numpy as np
from scipy.special import expit

from cautious.errors import DomainError, PreconditionError
from cautious.models.dataset import AlphaBox, Dataset, Hyperparameters
from cautious.models.posterior import CoefficientMixturePosterior, OddsInterval, ShrinkageComponent, Status
from cautious.numerics import log_prior_odds, log_weights, require_finite

logger = logging.getLogger(__name__)

ORTHOGONAL_TOL = 1e-8


def _orthogonality_gap(data: Dataset) -> Tuple[float, Tuple[int, int]]:
    deviation = np.abs(data.gram.xtx / data.n - np.eye(data.p))
    i, j = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    return float(deviation[i, j]), (int(i), int(j))


def is_orthogonal(data: Dataset, tol: float = ORTHOGONAL_TOL) -> bool:
    gap, _ = _orthogonality_gap(data)
    return gap <= tol


def ols_orthogonal(data: Dataset, tol: float = ORTHOGONAL_TOL) -> np.ndarray:
    """Least-squares estimate x'y/n; requires x'x/n = I up to `tol`."""
    gap, (i, j) = _orthogonality_gap(data)
    if gap > tol:
        raise PreconditionError(
            f"design is not orthogonal: |x'x/n - I| = {gap:.3e} at entry ({i + 1}, {j + 1}) exceeds {tol:g}"
        )
    return data.gram.xty / data.n


def _check_scalars(n: int, sigma2: float):
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    require_finite("sigma2", sigma2)
    if sigma2 <= 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")


def component_log_weights(beta_hat, n: int, sigma2: float, hp: Hyperparameters) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized (log w_1, log w_0) for one or many least-squares estimates."""
    _check_scalars(n, sigma2)
    beta_hat = require_finite("beta_hat", beta_hat)
    out = []
    for tau in (hp.tau1, hp.tau0):
        shrink = n * tau**2
        out.append(-0.5 * np.log1p(shrink) - n * beta_hat**2 / (2.0 * sigma2 * (shrink + 1.0)))
    return out[0], out[1]


def shrinkage_component(k: int, beta_hat_j: float, n: int, sigma2: float, hp: Hyperparameters) -> ShrinkageComponent:
    _check_scalars(n, sigma2)
    require_finite("beta_hat_j", beta_hat_j)
    tau = hp.tau1 if k == 1 else hp.tau0
    shrink = n * tau**2
    return ShrinkageComponent(
        k=k,
        beta_hat_kj=shrink * beta_hat_j / (shrink + 1.0),
        sigma2_k=sigma2 * tau**2 / (shrink + 1.0),
        log_w_kj=-0.5 * np.log1p(shrink) - n * beta_hat_j**2 / (2.0 * sigma2 * (shrink + 1.0)),
    )


def gamma_posterior_prob(alpha_j: float, log_w1: float, log_w0: float) -> float:
    """P(gamma_j = 1 | y) = alpha w1 / (alpha w1 + (1 - alpha) w0), evaluated on the logit scale."""
    require_finite("log weights", (log_w1, log_w0))
    return float(expit(log_prior_odds(alpha_j) + log_w1 - log_w0))


def odds_interval(box_j: Tuple[float, float], log_w1: float, log_w0: float) -> OddsInterval:
    """Posterior odds at the two ends of [lo, hi]; the odds are increasing in alpha."""
    lo, hi = box_j
    if not (0.0 < lo <= hi < 1.0):
        raise DomainError(f"alpha interval must satisfy 0 < lo <= hi < 1, got [{lo}, {hi}]")
    bayes_factor = float(log_w1 - log_w0)
    return OddsInterval(
        log_lower=float(log_prior_odds(lo)) + bayes_factor,
        log_upper=float(log_prior_odds(hi)) + bayes_factor,
    )


def classify(odds: OddsInterval) -> Status:
    # Odds exactly 1 at a bound stays Indeterminate.
    if odds.log_lower > 0.0:
        return Status.ACTIVE
    if odds.log_upper < 0.0:
        return Status.INACTIVE
    return Status.INDETERMINATE


def coefficient_posterior(
    alpha_j: float, beta_hat_j: float, n: int, sigma2: float, hp: Hyperparameters
) -> CoefficientMixturePosterior:
    if not 0.0 <= alpha_j <= 1.0:
        raise DomainError(f"alpha_j must lie in [0, 1], got {alpha_j}")
    slab = shrinkage_component(1, beta_hat_j, n, sigma2, hp)
    spike = shrinkage_component(0, beta_hat_j, n, sigma2, hp)
    log_a, log_1ma = log_weights(alpha_j)
    log_slab = float(log_a) + slab.log_w_kj
    log_spike = float(log_1ma) + spike.log_w_kj
    log_w_j = float(np.logaddexp(log_slab, log_spike))
    weight_slab = float(np.exp(log_slab - log_w_j))
    return CoefficientMixturePosterior(
        weight_slab=weight_slab,
        weight_spike=1.0 - weight_slab,
        slab=(slab.beta_hat_kj, slab.sigma2_k),
        spike=(spike.beta_hat_kj, spike.sigma2_k),
        log_w_j=log_w_j,
    )


def posterior_mean(alpha_j: float, beta_hat_j: float, n: int, sigma2: float, hp: Hyperparameters) -> float:
    return coefficient_posterior(alpha_j, beta_hat_j, n, sigma2, hp).mean()


def posterior_variance(alpha_j: float, beta_hat_j: float, n: int, sigma2: float, hp: Hyperparameters) -> float:
    return coefficient_posterior(alpha_j, beta_hat_j, n, sigma2, hp).variance()


def posterior_variance_set(
    beta_hat_j: float, n: int, sigma2: float, hp: Hyperparameters, alphas: Iterable[float]
) -> np.ndarray:
    """Posterior variances of beta_j over a set of prior inclusion probabilities."""
    return np.array([posterior_variance(a, beta_hat_j, n, sigma2, hp) for a in alphas])


def indeterminacy_region(
    n: int, sigma2: float, hp: Hyperparameters, eps1: float, eps2: float
) -> Tuple[float, float]:
    """betaHat^2 thresholds bounding the indeterminate band for the box [eps1, 1 - eps2].

    Above the upper threshold the covariate is active even at alpha = eps1;
    below the lower threshold it is inactive even at alpha = 1 - eps2. Values
    are returned raw and may be negative for extreme settings.
    """
    _check_scalars(n, sigma2)
    for name, eps in (("eps1", eps1), ("eps2", eps2)):
        if not 0.0 < eps <= 0.5:
            raise DomainError(f"{name} must lie in (0, 0.5], got {eps}")
    slab, spike = n * hp.tau1**2, n * hp.tau0**2
    scale = sigma2 / n * (slab + 1.0) * (spike + 1.0) / (slab - spike)
    log_ratio = np.log1p(slab) - np.log1p(spike)
    upper = scale * (2.0 * np.log((1.0 - eps1) / eps1) + log_ratio)
    lower = scale * (2.0 * np.log(eps2 / (1.0 - eps2)) + log_ratio)
    return float(lower), float(upper)


def orthogonal_selection(
    data: Dataset, box: AlphaBox, sigma2: float, hp: Hyperparameters
) -> Tuple[np.ndarray, List[OddsInterval], List[Status]]:
    """
    Least-squares estimates, odds bounds and statuses for every covariate.

    With x'x = nI and sigma^2 known, each covariate's inclusion odds depend
    only on its own estimate and alpha interval, so the odds bounds are the
    prior odds at the two box endpoints times one Bayes factor.
    """
    if box.p != data.p:
        raise PreconditionError(f"alpha box has {box.p} entries but the dataset has {data.p} columns")
    beta_hat = ols_orthogonal(data)
    log_w1, log_w0 = component_log_weights(beta_hat, data.n, sigma2, hp)
    intervals = [odds_interval(box.bounds(j), log_w1[j], log_w0[j]) for j in range(data.p)]
    logger.debug("orthogonal backend classified %d covariates", data.p)
    return beta_hat, intervals, [classify(iv) for iv in intervals]
