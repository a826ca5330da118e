import logging
from typing import List

from cautious.errors import CautiousError
from cautious.models.posterior import Status
from cautious.models.report import SelectionReport
from cautious.posterior.orthogonal import classify

logger = logging.getLogger(__name__)


def check_statuses(report: SelectionReport) -> List[str]:
    return [
        f"column {c.column}: status {c.status.value} disagrees with odds interval [{c.odds.lower:.4g}, {c.odds.upper:.4g}]"
        for c in report.covariates
        if classify(c.odds) != c.status
    ]


def check_active_sets(report: SelectionReport) -> List[str]:
    """Every configuration must include the Active columns and exclude the Inactive ones."""
    issues = []
    active = {c.column for c in report.covariates if c.status == Status.ACTIVE}
    inactive = {c.column for c in report.covariates if c.status == Status.INACTIVE}
    for index, config in enumerate(report.configurations):
        chosen = set(config.active_set)
        if active - chosen:
            issues.append(f"configuration {index}: active columns {sorted(active - chosen)} missing")
        if inactive & chosen:
            issues.append(f"configuration {index}: inactive columns {sorted(inactive & chosen)} selected")
    return issues


def check_aggregates(report: SelectionReport) -> List[str]:
    issues = []
    agg = report.aggregates
    if agg.min_sq_err > agg.max_sq_err:
        issues.append(f"minimum squared error {agg.min_sq_err} exceeds maximum {agg.max_sq_err}")
    if not 0.0 <= agg.model_indeterminacy <= 1.0:
        issues.append(f"model indeterminacy {agg.model_indeterminacy} outside [0, 1]")
    count = len(report.configurations)
    for label, index, expected in (
        ("optimistic", agg.optimistic, agg.min_sq_err),
        ("pessimistic", agg.pessimistic, agg.max_sq_err),
    ):
        if not 0 <= index < count:
            issues.append(f"{label} index {index} outside 0..{count - 1}")
        elif report.configurations[index].squared_error != expected:
            issues.append(f"{label} configuration does not attain the reported error")
    return issues


def validate_report(report: SelectionReport) -> List[str]:
    """Every consistency problem found in the report, as readable messages."""
    return check_statuses(report) + check_active_sets(report) + check_aggregates(report)


def refine_report(report: SelectionReport) -> SelectionReport:
    """Raises if the report is internally inconsistent; returns it unchanged otherwise."""
    issues = validate_report(report)
    if issues:
        for issue in issues:
            logger.error("report check failed: %s", issue)
        raise CautiousError(f"selection report failed {len(issues)} consistency check(s): {issues[0]}")
    return report
