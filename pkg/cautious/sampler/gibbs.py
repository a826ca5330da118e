"""Systematic-scan Gibbs sampler over (beta, gamma, q, sigma^2).

Each sweep draws beta as one block, then the indicators, then q, then
sigma^2. The default indicator step redraws every (gamma_j, beta_j) pair
with beta_j integrated out, which is what lets the chain move between spike
and slab when tau0 is orders of magnitude below tau1. The plain step that
draws gamma given beta is kept as `update="conditional"`.
"""

import functools
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.special import expit

from cautious.errors import NumericError
from cautious.models.chain import ChainOutput, ChainSettings, GammaUpdate, GibbsState
from cautious.models.dataset import Dataset, Hyperparameters
from cautious.numerics import guarded_cholesky, make_rng, spawn_seeds
from cautious.posterior.prior import normal_log_density
from cautious.sampler.pool import run_jobs

logger = logging.getLogger(__name__)

Q_FLOOR = np.finfo(float).tiny
Q_CEIL = 1.0 - np.finfo(float).epsneg


def initial_state(data: Dataset, alpha: np.ndarray) -> GibbsState:
    """gamma = 0, q = alpha, sigma^2 = sample variance of y, beta = 0."""
    sigma2 = float(np.var(data.y, ddof=1)) if data.n > 1 else 0.0
    if not sigma2 > 0:
        sigma2 = 1.0
    return GibbsState(
        beta=np.zeros(data.p),
        gamma=np.zeros(data.p, dtype=bool),
        q=np.clip(np.asarray(alpha, dtype=float), Q_FLOOR, Q_CEIL),
        sigma2=sigma2,
    )


def conditional_beta_moments(state: GibbsState, data: Dataset, hp: Hyperparameters):
    """Mean mu_gamma and lower Cholesky factor of x'x + D_gamma."""
    gram = data.gram
    factor = guarded_cholesky(
        gram.xtx + np.diag(hp.prior_precision(state.gamma)),
        context=f"for gamma={state.gamma.astype(int).tolist()}",
    )
    mean = linalg.cho_solve((factor, True), gram.xty, check_finite=False)
    return mean, factor


def sample_beta(state: GibbsState, data: Dataset, hp: Hyperparameters, rng: np.random.Generator) -> np.ndarray:
    mean, factor = conditional_beta_moments(state, data, hp)
    noise = linalg.solve_triangular(factor.T, rng.standard_normal(data.p), lower=False, check_finite=False)
    return mean + np.sqrt(state.sigma2) * noise


def inclusion_probability(state: GibbsState, hp: Hyperparameters) -> np.ndarray:
    with np.errstate(divide="ignore"):
        prior_logit = np.log(state.q) - np.log1p(-state.q)
    slab = normal_log_density(state.beta, state.sigma2 * hp.tau1**2)
    spike = normal_log_density(state.beta, state.sigma2 * hp.tau0**2)
    return expit(prior_logit + slab - spike)


def sample_gamma(state: GibbsState, data: Dataset, hp: Hyperparameters, rng: np.random.Generator) -> np.ndarray:
    return rng.random(data.p) < inclusion_probability(state, hp)


def sample_gamma_beta_joint(
    state: GibbsState, data: Dataset, hp: Hyperparameters, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draws each (gamma_j, beta_j) pair from its joint full conditional, one coordinate at a time.

    gamma_j is drawn with beta_j integrated out given the other coordinates,
    then beta_j is drawn given gamma_j. Each step is an exact conditional
    draw, so the posterior stays invariant, and gamma_j can switch even when
    the spike is orders of magnitude narrower than the slab.
    """
    xtx_diag = np.diag(data.gram.xtx)
    columns = data.x.T
    beta = state.beta.copy()
    gamma = state.gamma.copy()
    residual = data.y - data.x @ beta
    tau2 = np.array([hp.tau0**2, hp.tau1**2])
    with np.errstate(divide="ignore"):
        prior_logit = np.log(state.q) - np.log1p(-state.q)
    for j in range(data.p):
        column = columns[j]
        residual += column * beta[j]
        score = float(column @ residual)
        precision = xtx_diag[j] + 1.0 / tau2
        log_marginal = -0.5 * np.log1p(tau2 * xtx_diag[j]) + score**2 / (2.0 * state.sigma2 * precision)
        slab = bool(rng.random() < expit(prior_logit[j] + log_marginal[1] - log_marginal[0]))
        k = int(slab)
        beta[j] = score / precision[k] + np.sqrt(state.sigma2 / precision[k]) * rng.standard_normal()
        gamma[j] = slab
        residual -= column * beta[j]
    return gamma, beta


def sample_q(state: GibbsState, hp: Hyperparameters, alpha, rng: np.random.Generator) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    gamma = state.gamma.astype(float)
    draws = rng.beta(hp.s * alpha + gamma, hp.s * (1.0 - alpha) + 1.0 - gamma)
    return np.clip(draws, Q_FLOOR, Q_CEIL)


def sigma2_conditional(state: GibbsState, data: Dataset, hp: Hyperparameters):
    """(shape, rate) of the inverse-gamma full conditional of sigma^2."""
    residual = data.y - data.x @ state.beta
    shape = hp.a + 0.5 * (data.n + data.p)
    rate = hp.b + 0.5 * float(residual @ residual) + 0.5 * float(state.beta**2 @ hp.prior_precision(state.gamma))
    if not rate > 0:
        raise NumericError(f"inverse-gamma rate is not positive: {rate}")
    return shape, rate


def sample_sigma2(state: GibbsState, data: Dataset, hp: Hyperparameters, rng: np.random.Generator) -> float:
    shape, rate = sigma2_conditional(state, data, hp)
    return float(rate / rng.gamma(shape))


def sweep_once(
    state: GibbsState,
    data: Dataset,
    alpha,
    hp: Hyperparameters,
    rng: np.random.Generator,
    update: GammaUpdate = "joint",
) -> GibbsState:
    """One scan in the order beta, gamma, q, sigma^2.

    With `update="joint"` the gamma step redraws each (gamma_j, beta_j) pair
    jointly; with `"conditional"` it draws gamma from P(gamma_j | beta_j, sigma^2).
    """
    state.beta = sample_beta(state, data, hp, rng)
    if update == "joint":
        state.gamma, state.beta = sample_gamma_beta_joint(state, data, hp, rng)
    else:
        state.gamma = sample_gamma(state, data, hp, rng)
    state.q = sample_q(state, hp, alpha, rng)
    state.sigma2 = sample_sigma2(state, data, hp, rng)
    return state


def _describe_seed(seed) -> str:
    if isinstance(seed, np.random.SeedSequence):
        return f"{seed.entropy}/{'.'.join(str(k) for k in seed.spawn_key)}"
    return str(seed)


def write_trace(rows: list, p: int, path: Path):
    columns = ["iteration", "sigma2"] + [f"gamma_{j + 1}" for j in range(p)] + [f"beta_{j + 1}" for j in range(p)]
    frame = pd.DataFrame(rows, columns=columns)
    frame["iteration"] = frame["iteration"].astype(int)
    frame.to_csv(path, index=False, float_format="%.17g")


def run_chain(
    data: Dataset,
    alpha,
    hp: Hyperparameters,
    iterations: int = 10_000,
    burnin: int = 2_000,
    thin: int = 1,
    seed: int | np.random.SeedSequence = 0,
    trace_path: str | Path | None = None,
    update: GammaUpdate = "joint",
) -> ChainOutput:
    """Runs one seeded chain from the neutral start and accumulates post-burn-in moments.

    Every `thin`-th draw after `burnin` is kept. With `trace_path` the kept
    draws are also written as CSV (iteration, sigma2, gamma_1..p, beta_1..p).
    """
    settings = ChainSettings(iterations=iterations, burnin=burnin, thin=thin, chains=1, update=update)
    alpha = np.asarray(alpha, dtype=float)
    rng = make_rng(seed)
    state = initial_state(data, alpha)

    counts = np.zeros(data.p, dtype=np.int64)
    beta_sum = np.zeros(data.p)
    beta_sum_sq = np.zeros(data.p)
    sigma2_sum = sigma2_sum_sq = 0.0
    kept = 0
    rows = []

    logger.debug("chain %s: %d iterations, burn-in %d", _describe_seed(seed), iterations, burnin)
    for it in range(settings.iterations):
        try:
            sweep_once(state, data, alpha, hp, rng, settings.update)
        except NumericError as exc:
            raise NumericError(f"{exc} at iteration {it}") from exc
        if it < settings.burnin or (it - settings.burnin) % settings.thin:
            continue
        kept += 1
        counts += state.gamma
        beta_sum += state.beta
        beta_sum_sq += state.beta**2
        sigma2_sum += state.sigma2
        sigma2_sum_sq += state.sigma2**2
        if trace_path is not None:
            rows.append([it, state.sigma2, *state.gamma.astype(int), *state.beta])

    if trace_path is not None:
        write_trace(rows, data.p, Path(trace_path))

    return ChainOutput(
        kept_draws=kept,
        inclusion_counts=counts,
        beta_sum=beta_sum,
        beta_sum_sq=beta_sum_sq,
        sigma2_sum=sigma2_sum,
        sigma2_sum_sq=sigma2_sum_sq,
        iterations=settings.iterations,
        burnin=settings.burnin,
        thin=settings.thin,
        seeds=[_describe_seed(seed)],
        trace_path=str(trace_path) if trace_path is not None else None,
    )


def run_chains(
    data: Dataset,
    alpha,
    hp: Hyperparameters,
    settings: ChainSettings = ChainSettings(),
    seed: int | np.random.SeedSequence = 0,
    trace_dir: str | Path | None = None,
    workers: int | None = None,
) -> ChainOutput:
    """Independent chains on spawned streams, merged into one output."""
    streams = spawn_seeds(seed, settings.chains)
    jobs = []
    for index, stream in enumerate(streams):
        trace = Path(trace_dir) / f"trace_chain{index + 1}.csv" if trace_dir is not None else None
        jobs.append(
            functools.partial(
                run_chain,
                data,
                alpha,
                hp,
                iterations=settings.iterations,
                burnin=settings.burnin,
                thin=settings.thin,
                seed=stream,
                trace_path=trace,
                update=settings.update,
            )
        )
    return ChainOutput.merge(run_jobs(jobs, workers=workers, label="chains"))
