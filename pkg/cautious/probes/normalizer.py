import logging
from typing import Sequence

import numpy as np

from cautious.errors import PreconditionError
from cautious.models.dataset import STANDARDIZE_TOL, Dataset

logger = logging.getLogger(__name__)


def standardize(data: Dataset) -> Dataset:
    """Centers y and scales every column of x to mean 0 and unit population variance.

    Population variance means sum(x_j^2) = n, so an orthogonal standardized
    design has x'x = nI. Zero-variance columns are left at zero.
    """
    if data.standardized:
        return data
    means = data.x.mean(axis=0)
    centered = data.x - means
    scales = centered.std(axis=0)
    flat = scales <= STANDARDIZE_TOL
    if np.any(flat):
        logger.warning("columns %s have zero variance and are left at zero", [data.column_names[j] for j in np.flatnonzero(flat)])
        scales = np.where(flat, 1.0, scales)
        centered[:, flat] = 0.0
    response_mean = float(data.y.mean())
    return Dataset(
        y=data.y - response_mean,
        x=centered / scales,
        standardized=True,
        column_means=means,
        column_scales=scales,
        response_mean=response_mean,
        column_names=list(data.column_names),
        column_index=list(data.column_index),
        response_name=data.response_name,
    )


def restrict_columns(data: Dataset, indices: Sequence[int]) -> Dataset:
    """Keeps the given columns (0-based positions), preserving their original numbering."""
    indices = [int(i) for i in indices]
    if not indices:
        raise PreconditionError("cannot restrict a dataset to zero columns")
    if any(i < 0 or i >= data.p for i in indices):
        raise PreconditionError(f"column positions must lie in 0..{data.p - 1}")
    pick = lambda v: None if v is None else v[indices]
    return Dataset(
        y=data.y,
        x=data.x[:, indices],
        standardized=data.standardized,
        column_means=pick(data.column_means),
        column_scales=pick(data.column_scales),
        response_mean=data.response_mean,
        column_names=[data.column_names[i] for i in indices],
        column_index=[data.column_index[i] for i in indices],
        response_name=data.response_name,
    )
