"""Accuracy measures over a sweep of prior inclusion vectors."""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from cautious.errors import PreconditionError
from cautious.models.chain import SweepResult
from cautious.models.dataset import Dataset
from cautious.models.posterior import Status
from cautious.models.report import ConfigurationEntry, ConfusionCounts, CovariateEntry, MetricsSummary, SelectionReport
from cautious.models.synth import SynthTruth

logger = logging.getLogger(__name__)


class ErrorRange(BaseModel):
    min: float
    max: float
    optimistic: int
    pessimistic: int
    errors: List[float]


def active_set(inclusion_odds) -> List[int]:
    """Indices with odds strictly above 1."""
    odds = np.asarray(inclusion_odds, dtype=float)
    return [int(j) for j in np.flatnonzero(odds > 1.0)]


def refit_and_error(data: Dataset, active: Sequence[int], posterior_mean_restricted) -> float:
    """||y - x_A E(beta_A | y)||^2; the null model when A is empty.

    `posterior_mean_restricted` holds one value per active column, or a full
    length-p vector from which the active entries are taken.
    """
    active = list(active)
    if not active:
        return float(data.y @ data.y)
    if any(j < 0 or j >= data.p for j in active):
        raise PreconditionError(f"active set {active} refers to columns outside 0..{data.p - 1}")
    coef = np.asarray(posterior_mean_restricted, dtype=float)
    if coef.shape[0] == data.p and len(active) != data.p:
        coef = coef[active]
    if coef.shape[0] != len(active):
        raise PreconditionError(f"need {len(active)} coefficients for the active set, got {coef.shape[0]}")
    residual = data.y - data.x[:, active] @ coef
    return float(residual @ residual)


def configuration_errors(sweep: SweepResult, data: Dataset) -> List[float]:
    return [refit_and_error(data, c.active_set, c.posterior_mean) for c in sweep.configurations]


def min_max_error(sweep: SweepResult, data: Dataset) -> ErrorRange:
    if not sweep.configurations:
        raise PreconditionError("the sweep has no configurations")
    errors = configuration_errors(sweep, data)
    lo, hi = int(np.argmin(errors)), int(np.argmax(errors))
    return ErrorRange(min=errors[lo], max=errors[hi], optimistic=lo, pessimistic=hi, errors=errors)


def model_indeterminacy(min_error: float, max_error: float) -> float:
    """(max - min) / max, or 0 when max is 0."""
    if max_error <= 0.0:
        return 0.0
    return (max_error - min_error) / max_error


def delta_beta(posterior_mean, active: Iterable[int], beta_true) -> float:
    mask = np.zeros(len(beta_true), dtype=bool)
    mask[list(active)] = True
    masked = np.where(mask, np.asarray(posterior_mean, dtype=float), 0.0)
    return float(np.sum((masked - np.asarray(beta_true, dtype=float)) ** 2))


def confusion_counts(
    statuses: Sequence[Status], active: Iterable[int], true_active: Optional[Iterable[int]] = None
) -> ConfusionCounts:
    """Split selected/excluded covariates into determinate and indeterminate counts."""
    p = len(statuses)
    in_model = np.zeros(p, dtype=bool)
    in_model[list(active)] = True
    indeterminate = np.array([s == Status.INDETERMINATE for s in statuses])
    determinate = ~indeterminate

    def pair(mask) -> tuple[int, int]:
        return int(np.sum(mask & determinate)), int(np.sum(mask & indeterminate))

    false_act = false_inact = None
    if true_active is not None:
        truth = np.zeros(p, dtype=bool)
        truth[list(true_active)] = True
        false_act = pair(in_model & ~truth)
        false_inact = pair(~in_model & truth)
    return ConfusionCounts(act=pair(in_model), false_act=false_act, inact=pair(~in_model), false_inact=false_inact)


def entry_delta_beta(covariates: Sequence[CovariateEntry], entry: ConfigurationEntry, beta_true) -> float:
    """Delta(beta) over every original column; columns absent from the report count as estimated 0."""
    beta_true = np.asarray(beta_true, dtype=float)
    mean = np.zeros_like(beta_true)
    for cov, value in zip(covariates, entry.posterior_mean):
        mean[cov.column - 1] = value
    return delta_beta(mean, [col - 1 for col in entry.active_set], beta_true)


def entry_confusion(
    covariates: Sequence[CovariateEntry], entry: ConfigurationEntry, true_active: Optional[Iterable[int]] = None
) -> ConfusionCounts:
    """Confusion counts of one fit; `true_active` holds 0-based original column numbers."""
    position = {cov.column: j for j, cov in enumerate(covariates)}
    active = [position[col] for col in entry.active_set]
    truth = None
    if true_active is not None:
        truth = [position[c + 1] for c in true_active if c + 1 in position]
    return confusion_counts([cov.status for cov in covariates], active, truth)


def report_metrics(report: SelectionReport, truth: Optional[SynthTruth] = None) -> MetricsSummary:
    errors = [c.squared_error for c in report.configurations]
    lo, hi = int(np.argmin(errors)), int(np.argmax(errors))
    fits = {"optimistic": report.configurations[lo], "pessimistic": report.configurations[hi]}
    deltas = {}
    if truth is None:
        logger.warning("no truth sidecar available; Delta(beta) and false counts are omitted")
    else:
        deltas = {label: entry_delta_beta(report.covariates, entry, truth.beta_true) for label, entry in fits.items()}
    true_active = truth.active_indices if truth is not None else None
    return MetricsSummary(
        min_sq_err=errors[lo],
        max_sq_err=errors[hi],
        model_indeterminacy=model_indeterminacy(errors[lo], errors[hi]),
        optimistic_alpha=fits["optimistic"].alpha,
        pessimistic_alpha=fits["pessimistic"].alpha,
        delta_beta=deltas,
        confusion={label: entry_confusion(report.covariates, entry, true_active) for label, entry in fits.items()},
        status_counts={s.value: report.count(s) for s in Status},
    )
