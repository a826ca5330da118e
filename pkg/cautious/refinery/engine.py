"""Turns a dataset and a RunConfig into a SelectionReport."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from cautious.decision.metrics import entry_confusion, entry_delta_beta, min_max_error, model_indeterminacy
from cautious.errors import PreconditionError
from cautious.models.chain import SweepConfiguration, SweepResult
from cautious.models.config import RunConfig
from cautious.models.dataset import AlphaBox, Dataset, Hyperparameters
from cautious.models.posterior import OddsInterval
from cautious.models.report import (
    Aggregates,
    ConfigurationEntry,
    CovariateEntry,
    DataSummary,
    SelectionReport,
)
from cautious.models.synth import SynthTruth
from cautious.numerics import log_prior_odds
from cautious.posterior import orthogonal
from cautious.posterior.exact import enumerate_posterior, posterior_mean_exact
from cautious.probes.elicitation import elicit_alpha_interval, ridge_sigma2
from cautious.probes.normalizer import restrict_columns
from cautious.probes.screening import screen_covariates
from cautious.refinery.validator import refine_report
from cautious.sampler.sweep import schedule_configurations, sensitivity_sweep

logger = logging.getLogger(__name__)


@dataclass
class Fit:
    """Everything a backend produced, before it is written into a report."""

    sweep: SweepResult
    intervals: List[OddsInterval]
    sigma2: Optional[float] = None
    disclosures: List[str] = field(default_factory=list)


def choose_backend(data: Dataset, config: RunConfig) -> str:
    if config.backend != "auto":
        return config.backend
    if config.sigma2 is not None and orthogonal.is_orthogonal(data):
        return "orthogonal"
    if 2**data.p <= config.cap:
        return "exact"
    return "gibbs"


def fit_orthogonal(data: Dataset, box: AlphaBox, hp: Hyperparameters, config: RunConfig) -> Fit:
    disclosures = []
    sigma2 = config.sigma2
    if sigma2 is None:
        sigma2 = ridge_sigma2(data)
        disclosures.append(f"sigma2 = {sigma2:.6g} estimated from the ridge residual variance")
    beta_hat, intervals, _ = orthogonal.orthogonal_selection(data, box, sigma2, hp)
    log_w1, log_w0 = orthogonal.component_log_weights(beta_hat, data.n, sigma2, hp)
    schedule, alphas = schedule_configurations(box, config.grid)
    configurations = []
    for alpha in alphas:
        mean = np.array(
            [orthogonal.posterior_mean(alpha[j], beta_hat[j], data.n, sigma2, hp) for j in range(data.p)]
        )
        configurations.append(
            SweepConfiguration(
                alpha=tuple(float(a) for a in alpha),
                log_odds=log_prior_odds(alpha) + (log_w1 - log_w0),
                posterior_mean=mean,
            )
        )
    sweep = SweepResult(source="closed-form", schedule=schedule, configurations=configurations)
    return Fit(sweep=sweep, intervals=intervals, sigma2=sigma2, disclosures=disclosures)


def fit_exact(data: Dataset, box: AlphaBox, hp: Hyperparameters, config: RunConfig) -> Fit:
    schedule, alphas = schedule_configurations(box, config.grid)
    configurations = []
    for alpha in alphas:
        posterior = enumerate_posterior(data, alpha, hp, cap=config.cap, workers=config.workers)
        configurations.append(
            SweepConfiguration(
                alpha=tuple(float(a) for a in alpha),
                log_odds=posterior.inclusion_log_odds(),
                posterior_mean=posterior_mean_exact(data, posterior, hp),
            )
        )
    sweep = SweepResult(source="exact", schedule=schedule, configurations=configurations)
    return Fit(sweep=sweep, intervals=sweep.odds_intervals())


def fit_gibbs(data: Dataset, box: AlphaBox, hp: Hyperparameters, config: RunConfig) -> Fit:
    sweep = sensitivity_sweep(
        data,
        box,
        hp,
        grid=config.grid,
        settings=config.chain_settings(),
        seed=config.seed,
        trace_dir=config.trace_dir,
        workers=config.workers,
    )
    disclosures = ["inclusion odds are estimated from 1/2-smoothed counts (c + 1/2) / (N - c + 1/2)"]
    return Fit(sweep=sweep, intervals=sweep.odds_intervals(), disclosures=disclosures)


BACKENDS = {"orthogonal": fit_orthogonal, "exact": fit_exact, "gibbs": fit_gibbs}


def _original_scale(data: Dataset, coef: np.ndarray) -> np.ndarray:
    if data.standardized and data.column_scales is not None:
        return coef / data.column_scales
    return coef


def select(
    data: Dataset, config: RunConfig, truth: Optional[SynthTruth] = None, source_path: Optional[str] = None
) -> SelectionReport:
    """
    Runs one cautious selection and returns the validated report.

    The alpha box comes from explicit bounds, a preset, or ridge elicitation.
    Optional screening keeps the strongest columns first; the report still
    numbers covariates by their original column. The backend (closed-form,
    exact or Gibbs) is picked by `choose_backend`, every scheduled alpha
    vector is fitted, and covariates are classified from their odds bounds.
    With `truth` the report also carries Delta(beta) and false counts.
    """
    hp = config.hyperparameters()
    disclosures = []
    defaulted = hp.defaulted_prior_constants()
    if defaulted:
        values = ", ".join(f"{name}={Hyperparameters.DEFAULT_PRIOR[name]:g}" for name in defaulted)
        disclosures.append(f"default prior constants used: {values}")
        logger.warning("using default prior constants for %s", ", ".join(defaulted))

    screened_from = None
    if config.screen is not None and config.screen < data.p:
        screened_from = data.p
        data = restrict_columns(data, screen_covariates(data, config.screen))
        disclosures.append(f"screened {screened_from} columns down to {data.p} by absolute correlation")

    if config.elicit:
        elicited = elicit_alpha_interval(data)
        box = AlphaBox.uniform(elicited.alpha_lo, elicited.alpha_hi, data.p)
        disclosures.append(
            f"alpha interval [{elicited.alpha_lo:.4g}, {elicited.alpha_hi:.4g}] elicited from ridge p-values"
        )
    else:
        box = config.alpha_box(data.p)

    backend = choose_backend(data, config)
    if backend not in BACKENDS:
        raise PreconditionError(f"unknown backend '{backend}'")
    logger.info("fitting n=%d, p=%d with the %s backend", data.n, data.p, backend)
    fit = BACKENDS[backend](data, box, hp, config)
    disclosures.extend(fit.disclosures)

    covariates = [
        CovariateEntry(
            column=data.column_index[j] + 1,
            name=data.column_names[j],
            status=orthogonal.classify(fit.intervals[j]),
            odds=fit.intervals[j],
            source=fit.sweep.source,
            alpha_lo=box.lo[j],
            alpha_hi=box.hi[j],
        )
        for j in range(data.p)
    ]

    errors = min_max_error(fit.sweep, data)
    configurations = []
    for c, err in zip(fit.sweep.configurations, errors.errors):
        entry = ConfigurationEntry(
            alpha=list(c.alpha),
            active_set=[data.column_index[j] + 1 for j in c.active_set],
            posterior_mean=_original_scale(data, c.posterior_mean).tolist(),
            squared_error=err,
        )
        if truth is not None:
            entry = entry.model_copy(update={"delta_beta": entry_delta_beta(covariates, entry, truth.beta_true)})
        configurations.append(entry)

    optimistic, pessimistic = configurations[errors.optimistic], configurations[errors.pessimistic]
    aggregates = Aggregates(
        min_sq_err=errors.min,
        max_sq_err=errors.max,
        model_indeterminacy=model_indeterminacy(errors.min, errors.max),
        optimistic=errors.optimistic,
        pessimistic=errors.pessimistic,
        delta_beta=optimistic.delta_beta,
        delta_beta_pessimistic=pessimistic.delta_beta,
    )
    true_active = truth.active_indices if truth is not None else None
    confusion = {
        "optimistic": entry_confusion(covariates, optimistic, true_active),
        "pessimistic": entry_confusion(covariates, pessimistic, true_active),
    }

    report = SelectionReport(
        backend=fit.sweep.source,
        schedule=fit.sweep.schedule,
        seed=config.seed,
        data=DataSummary(
            path=source_path,
            n=data.n,
            p=data.p,
            response=data.response_name,
            standardized=data.standardized,
            screened_from=screened_from,
        ),
        hyperparameters=hp,
        sigma2=fit.sigma2,
        disclosures=disclosures,
        covariates=covariates,
        configurations=configurations,
        aggregates=aggregates,
        confusion=confusion,
    )
    return refine_report(report)
