"""Spike-and-slab prior densities, all in the log domain."""

import numpy as np

from cautious.errors import DomainError
from cautious.models.dataset import Hyperparameters, SpikeSlabDensityParams
from cautious.numerics import log_weights, require_finite

LOG_2PI = float(np.log(2.0 * np.pi))


def normal_log_density(x, variance) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -0.5 * (LOG_2PI + np.log(variance)) - x**2 / (2.0 * variance)


def spike_slab_log_density(beta_j, gamma: int, sigma2: float, hp: Hyperparameters):
    """log f_gamma(beta_j): the normal N(0, sigma2 * tau_gamma^2) at beta_j."""
    require_finite("beta_j", beta_j)
    require_finite("sigma2", sigma2)
    if sigma2 <= 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    params = SpikeSlabDensityParams(gamma=int(gamma), sigma2=float(sigma2))
    return normal_log_density(beta_j, params.variance(hp))


def mixture_log_density(beta, alpha, sigma2: float, hp: Hyperparameters) -> np.ndarray:
    """Elementwise log(alpha f_1(beta) + (1 - alpha) f_0(beta)); alpha may touch 0 or 1."""
    log_a, log_1ma = log_weights(alpha)
    slab = normal_log_density(beta, sigma2 * hp.tau1**2)
    spike = normal_log_density(beta, sigma2 * hp.tau0**2)
    return np.logaddexp(log_a + slab, log_1ma + spike)


def marginal_prior_log_density(beta_j, alpha_j: float, sigma2: float, hp: Hyperparameters):
    """Log density of beta_j | sigma2 with gamma_j and q_j integrated out."""
    require_finite("beta_j", beta_j)
    alpha_j = float(alpha_j)
    if not 0.0 < alpha_j < 1.0:
        raise DomainError(f"alpha_j must lie in (0, 1), got {alpha_j}")
    if sigma2 <= 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    return mixture_log_density(beta_j, alpha_j, sigma2, hp)
