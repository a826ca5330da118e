"""Exact posteriors over the full 2^p model space.

With beta and sigma^2 integrated out, each model gamma gets the log score

    sum_j [gamma_j log alpha_j + (1 - gamma_j) log(1 - alpha_j)]
      + 1/2 log det L_gamma - |gamma| log tau1 - (p - |gamma|) log tau0
      - (n/2 + a) log r_gamma

where L_gamma = (x'x + D_gamma)^-1 and r_gamma = b + (y'y - y'x L_gamma x'y) / 2.
Enumeration walks the models in Gray-code order so consecutive models differ
in one prior precision and only a trailing block of the Cholesky factor has to
be refreshed.
"""

import functools
import logging
from dataclasses import dataclass
from typing import List, Literal, Tuple

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from cautious.errors import CapacityError, DomainError, PreconditionError
from cautious.models.dataset import Dataset, Hyperparameters
from cautious.models.posterior import (
    BetaMixturePosterior,
    ModelGeometry,
    ModelIndicator,
    ModelPosterior,
    TMixtureComponent,
)
from cautious.numerics import chol_log_det, chol_rank_one_update, guarded_cholesky, log_normalize, log_weights
from cautious.posterior.prior import LOG_2PI, mixture_log_density
from cautious.sampler.pool import run_jobs

logger = logging.getLogger(__name__)

DEFAULT_CAP = 2**20
GRAY_MAX_P = 16
EXPANSION_MAX_P = 12

EnumerationMethod = Literal["auto", "gray", "direct"]


def model_space(p: int) -> np.ndarray:
    """All 2^p indicators; row c has gamma_j = bit j of c."""
    codes = np.arange(2**p, dtype=np.int64)
    return ((codes[:, None] >> np.arange(p)) & 1).astype(bool)


def _as_gamma(gamma, p: int) -> np.ndarray:
    if isinstance(gamma, ModelIndicator):
        gamma = gamma.gamma
    bits = np.asarray(gamma).astype(bool).ravel()
    if bits.shape[0] != p:
        raise PreconditionError(f"model indicator has {bits.shape[0]} entries, expected {p}")
    return bits


def _as_alpha(alpha, p: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.shape[0] == 1 and p > 1:
        alpha = np.repeat(alpha, p)
    if alpha.shape[0] != p:
        raise PreconditionError(f"alpha has {alpha.shape[0]} entries, expected {p}")
    if np.any((alpha <= 0.0) | (alpha >= 1.0)):
        raise DomainError("every alpha_j must lie in (0, 1)")
    return alpha


def model_geometry(gamma, data: Dataset, hp: Hyperparameters) -> ModelGeometry:
    bits = _as_gamma(gamma, data.p)
    gram = data.gram
    d_gamma = hp.prior_precision(bits)
    factor = guarded_cholesky(gram.xtx + np.diag(d_gamma), context=f"for gamma={bits.astype(int).tolist()}")
    mu = linalg.cho_solve((factor, True), gram.xty)
    quad = max(gram.yty - float(gram.xty @ mu), 0.0)
    return ModelGeometry(
        d_gamma=d_gamma,
        chol_precision=factor,
        mu_gamma=mu,
        r_gamma=hp.b + 0.5 * quad,
        log_det_l=-chol_log_det(factor),
    )


def _score_from_parts(bits, log_a, log_1ma, log_det_l, r_gamma, n, hp: Hyperparameters) -> float:
    size = int(bits.sum())
    prior = float(np.where(bits, log_a, log_1ma).sum())
    return (
        prior
        + 0.5 * log_det_l
        - size * np.log(hp.tau1)
        - (bits.shape[0] - size) * np.log(hp.tau0)
        - (0.5 * n + hp.a) * np.log(r_gamma)
    )


def model_log_score(gamma, data: Dataset, alpha, hp: Hyperparameters) -> float:
    bits = _as_gamma(gamma, data.p)
    log_a, log_1ma = log_weights(_as_alpha(alpha, data.p))
    geom = model_geometry(bits, data, hp)
    return float(_score_from_parts(bits, log_a, log_1ma, geom.log_det_l, geom.r_gamma, data.n, hp))


def log_model_odds(gamma_a, gamma_b, data: Dataset, alpha, hp: Hyperparameters) -> float:
    """log P(gamma_a | y) / P(gamma_b | y) as a product of per-factor ratios."""
    a_bits, b_bits = _as_gamma(gamma_a, data.p), _as_gamma(gamma_b, data.p)
    alpha = _as_alpha(alpha, data.p)
    geom_a, geom_b = model_geometry(a_bits, data, hp), model_geometry(b_bits, data, hp)
    flips = a_bits.astype(int) - b_bits.astype(int)
    prior_odds = float(flips @ (np.log(alpha) - np.log1p(-alpha)))
    scale_ratio = float(flips.sum()) * (np.log(hp.tau0) - np.log(hp.tau1))
    return float(
        prior_odds
        + 0.5 * (geom_a.log_det_l - geom_b.log_det_l)
        + scale_ratio
        + (0.5 * data.n + hp.a) * (np.log(geom_b.r_gamma) - np.log(geom_a.r_gamma))
    )


def model_odds(gamma_a, gamma_b, data: Dataset, alpha, hp: Hyperparameters) -> float:
    return float(np.exp(log_model_odds(gamma_a, gamma_b, data, alpha, hp)))


@dataclass(frozen=True)
class _ScoreContext:
    """Sufficient statistics with variable k stored at position p - 1 - k."""

    precision: np.ndarray
    xty: np.ndarray
    yty: float
    log_a: np.ndarray
    log_1ma: np.ndarray
    n: int
    hp: Hyperparameters

    @classmethod
    def build(cls, data: Dataset, alpha: np.ndarray, hp: Hyperparameters) -> "_ScoreContext":
        order = np.arange(data.p)[::-1]
        gram = data.gram
        log_a, log_1ma = log_weights(alpha)
        return cls(
            precision=gram.xtx[np.ix_(order, order)],
            xty=gram.xty[order],
            yty=gram.yty,
            log_a=log_a[order],
            log_1ma=log_1ma[order],
            n=data.n,
            hp=hp,
        )

    @property
    def p(self) -> int:
        return self.xty.shape[0]

    def bits(self, code: int) -> np.ndarray:
        # position m holds variable p - 1 - m
        return ((code >> (self.p - 1 - np.arange(self.p))) & 1).astype(bool)

    def diag(self, bits: np.ndarray) -> np.ndarray:
        return self.hp.prior_precision(bits)

    def score(self, bits: np.ndarray, factor: np.ndarray) -> float:
        mu = linalg.cho_solve((factor, True), self.xty, check_finite=False)
        r_gamma = self.hp.b + 0.5 * max(self.yty - float(self.xty @ mu), 0.0)
        return _score_from_parts(bits, self.log_a, self.log_1ma, -chol_log_det(factor), r_gamma, self.n, self.hp)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _score_direct_range(ctx: _ScoreContext, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    codes = np.arange(start, stop, dtype=np.int64)
    scores = np.empty(stop - start)
    for offset, code in enumerate(codes):
        bits = ctx.bits(int(code))
        factor = guarded_cholesky(ctx.precision + np.diag(ctx.diag(bits)), context=f"for model {int(code)}")
        scores[offset] = ctx.score(bits, factor)
    return codes, scores


def _score_gray_range(ctx: _ScoreContext, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    p = ctx.p
    codes = np.empty(stop - start, dtype=np.int64)
    scores = np.empty(stop - start)
    code = _gray(start)
    bits = ctx.bits(code)
    diag = ctx.diag(bits)
    factor = guarded_cholesky(ctx.precision + np.diag(diag), context=f"for model {code}")
    codes[0], scores[0] = code, ctx.score(bits, factor)
    boost = 1.0 / ctx.hp.tau0**2 - 1.0 / ctx.hp.tau1**2
    for offset, i in enumerate(range(start + 1, stop), start=1):
        k = (i & -i).bit_length() - 1
        code ^= 1 << k
        m = p - 1 - k
        bits[m] = not bits[m]
        diag[m] = ctx.diag(bits[m : m + 1])[0]
        if not bits[m]:
            # slab -> spike raises one diagonal entry: a positive rank-one update
            vector = np.zeros(k + 1)
            vector[0] = np.sqrt(boost)
            factor[m:, m:] = chol_rank_one_update(factor[m:, m:], vector)
        else:
            cross = factor[m:, :m]
            block = ctx.precision[m:, m:] + np.diag(diag[m:]) - cross @ cross.T
            factor[m:, m:] = guarded_cholesky(block, context=f"for model {code}")
        codes[offset], scores[offset] = code, ctx.score(bits, factor)
    return codes, scores


def _partitions(total: int, parts: int) -> List[Tuple[int, int]]:
    edges = np.linspace(0, total, max(1, min(parts, total)) + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def _check_capacity(p: int, cap: int):
    if 2**p > cap:
        raise CapacityError(
            f"exact enumeration needs 2^{p} models, above the cap of {cap}; use the gibbs backend instead"
        )


def enumerate_log_scores(
    data: Dataset,
    alpha,
    hp: Hyperparameters,
    cap: int = DEFAULT_CAP,
    method: EnumerationMethod = "auto",
    workers: int | None = None,
) -> np.ndarray:
    """
    Unnormalized log scores of all 2^p models, indexed by model code (gamma_j = bit j).

    `method="gray"` walks the models so that each step flips one indicator
    and refreshes only a trailing block of the Cholesky factor; `"direct"`
    factorizes every model afresh. The code range is split over `workers`.
    Raises CapacityError when 2^p exceeds `cap`.
    """
    _check_capacity(data.p, cap)
    alpha = _as_alpha(alpha, data.p)
    if method == "auto":
        method = "gray" if data.p <= GRAY_MAX_P else "direct"
    ctx = _ScoreContext.build(data, alpha, hp)
    scorer = _score_gray_range if method == "gray" else _score_direct_range
    ranges = _partitions(2**data.p, workers or 1)
    logger.debug("enumerating %d models (%s) over %d partitions", 2**data.p, method, len(ranges))
    jobs = [functools.partial(scorer, ctx, lo, hi) for lo, hi in ranges]
    log_scores = np.empty(2**data.p)
    for codes, scores in run_jobs(jobs, workers=workers, label="enumeration"):
        log_scores[codes] = scores
    return log_scores


def enumerate_posterior(
    data: Dataset,
    alpha,
    hp: Hyperparameters,
    cap: int = DEFAULT_CAP,
    method: EnumerationMethod = "auto",
    workers: int | None = None,
) -> ModelPosterior:
    """Normalized posterior over every model."""
    log_scores = enumerate_log_scores(data, alpha, hp, cap=cap, method=method, workers=workers)
    return ModelPosterior(models=model_space(data.p), log_scores=log_scores, probabilities=log_normalize(log_scores))


def marginal_inclusion_exact(data: Dataset, alpha, hp: Hyperparameters, cap: int = DEFAULT_CAP) -> np.ndarray:
    return enumerate_posterior(data, alpha, hp, cap=cap).marginal_inclusion()


def beta_posterior_mixture_exact(
    data: Dataset, alpha, hp: Hyperparameters, cap: int = DEFAULT_CAP
) -> BetaMixturePosterior:
    """Joint posterior of beta: one multivariate t component per model."""
    posterior = enumerate_posterior(data, alpha, hp, cap=cap)
    dof = data.n + 2.0 * hp.a
    components = []
    for bits, log_score, weight in zip(posterior.models, posterior.log_scores, posterior.probabilities):
        geom = model_geometry(bits, data, hp)
        components.append(
            TMixtureComponent(
                gamma=ModelIndicator(gamma=bits),
                weight_log=float(log_score),
                weight=float(weight),
                mean=geom.mu_gamma,
                scale=(2.0 * geom.r_gamma / dof) * geom.l_gamma,
                dof=dof,
            )
        )
    return BetaMixturePosterior(components=components)


def verify_product_expansion(beta, alpha, sigma2: float, hp: Hyperparameters) -> Tuple[float, float]:
    """Two evaluations of log prod_j [alpha_j f_1(beta_j) + (1 - alpha_j) f_0(beta_j)].

    `lhs` multiplies the per-coordinate mixtures; `rhs` factors out the
    all-slab term and sums the 2^p cross terms, one per spike subset.
    alpha_j = 1 is allowed and removes every subset containing j.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    alpha = np.asarray(alpha, dtype=float).ravel()
    p = beta.shape[0]
    if p > EXPANSION_MAX_P:
        raise CapacityError(f"product expansion is limited to p <= {EXPANSION_MAX_P}, got {p}")
    if alpha.shape[0] != p or np.any((alpha <= 0.0) | (alpha > 1.0)):
        raise DomainError("alpha must have one entry per coefficient in (0, 1]")
    lhs = float(np.sum(mixture_log_density(beta, alpha, sigma2, hp)))

    slab_var = sigma2 * hp.tau1**2
    all_slab = -0.5 * p * (LOG_2PI + np.log(slab_var)) - float(beta @ beta) / (2.0 * slab_var) + float(np.log(alpha).sum())
    with np.errstate(divide="ignore"):
        swap = (
            np.log(hp.tau1 / hp.tau0)
            + np.log1p(-alpha)
            - np.log(alpha)
            - beta**2 / (2.0 * sigma2) * (1.0 / hp.tau0**2 - 1.0 / hp.tau1**2)
        )
    subsets = model_space(p)
    terms = np.where(subsets, swap, 0.0).sum(axis=1)
    rhs = float(all_slab + logsumexp(terms))
    return lhs, rhs


def posterior_mean_exact(data: Dataset, posterior: ModelPosterior, hp: Hyperparameters, floor: float = 1e-16) -> np.ndarray:
    """E(beta | y) = sum_gamma P(gamma | y) mu_gamma, skipping models below `floor`."""
    mean = np.zeros(data.p)
    for bits, weight in zip(posterior.models, posterior.probabilities):
        if weight < floor:
            continue
        mean += weight * model_geometry(bits, data, hp).mu_gamma
    return mean
