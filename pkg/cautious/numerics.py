"""Log-domain helpers, random streams and guarded Cholesky factorizations."""

import logging
from typing import Sequence

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from cautious.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

# Escalating diagonal jitter, relative to the mean diagonal of the matrix.
JITTER_LADDER = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


def require_finite(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return arr


def log_weights(alpha) -> tuple[np.ndarray, np.ndarray]:
    """Return (log alpha, log(1 - alpha)), allowing the closed interval [0, 1]."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(alpha), np.log1p(-alpha)


def log_prior_odds(alpha) -> np.ndarray:
    log_a, log_1ma = log_weights(alpha)
    return log_a - log_1ma


def log_normalize(log_values) -> np.ndarray:
    """Normalize log-weights into probabilities by log-sum-exp."""
    log_values = np.asarray(log_values, dtype=float)
    return np.exp(log_values - logsumexp(log_values))


def smoothed_log_odds(counts, total: int) -> np.ndarray:
    """log of (c + 1/2) / (N - c + 1/2); finite for every c in [0, N]."""
    counts = np.asarray(counts, dtype=float)
    return np.log(counts + 0.5) - np.log(total - counts + 0.5)


def make_rng(seed: int | np.random.SeedSequence | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn_seeds(seed: int | np.random.SeedSequence, count: int) -> list[np.random.SeedSequence]:
    """Split a master seed into `count` independent child streams."""
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return root.spawn(count)


def guarded_cholesky(matrix: np.ndarray, context: str = "") -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter before giving up."""
    scale = max(float(np.mean(np.diag(matrix))), 1.0)
    eye = np.eye(matrix.shape[0])
    for jitter in JITTER_LADDER:
        try:
            factor = linalg.cholesky(matrix + jitter * scale * eye, lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
        if jitter > 0:
            logger.debug("Cholesky needed jitter %.1e %s", jitter, context)
        return factor
    raise NumericError(f"Cholesky factorization failed after jitter escalation {context}".strip())


def chol_log_det(factor: np.ndarray) -> float:
    """log det of L L^T given the lower factor L."""
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


def chol_rank_one_update(factor: np.ndarray, vector: Sequence[float]) -> np.ndarray:
    """Return the lower factor of L L^T + v v^T.

    Positive updates only; downdates lose precision when the removed mass
    dominates the diagonal, callers refactorize instead.
    """
    factor = np.array(factor, dtype=float, copy=True)
    x = np.array(vector, dtype=float, copy=True)
    size = x.shape[0]
    for k in range(size):
        if x[k] == 0.0:
            continue
        d = factor[k, k]
        r = np.hypot(d, x[k])
        c = r / d
        s = x[k] / d
        factor[k, k] = r
        if k + 1 < size:
            factor[k + 1 :, k] = (factor[k + 1 :, k] + s * x[k + 1 :]) / c
            x[k + 1 :] = c * x[k + 1 :] - s * factor[k + 1 :, k]
    return factor
