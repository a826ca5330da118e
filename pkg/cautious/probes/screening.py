from typing import List

import numpy as np

from cautious.errors import PreconditionError
from cautious.models.dataset import Dataset


def absolute_correlations(data: Dataset) -> np.ndarray:
    """|Pearson correlation| of each column with y; 0 for zero-variance columns."""
    xc = data.x - data.x.mean(axis=0)
    yc = data.y - data.y.mean()
    norms = np.sqrt((xc**2).sum(axis=0)) * np.sqrt(float(yc @ yc))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(norms > 0, np.abs(xc.T @ yc) / norms, 0.0)
    return corr


def screen_covariates(data: Dataset, keep: int) -> List[int]:
    """Top `keep` column positions by absolute correlation; ties keep column order."""
    if not 1 <= keep <= data.p:
        raise PreconditionError(f"keep must lie in 1..{data.p}, got {keep}")
    order = np.argsort(-absolute_correlations(data), kind="stable")
    return [int(j) for j in order[:keep]]
