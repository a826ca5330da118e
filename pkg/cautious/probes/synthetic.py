"""Seeded synthetic regression problems and their truth sidecars."""

import json
import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy import linalg

from cautious.models.dataset import Dataset
from cautious.models.synth import SynthSpec, SynthTruth
from cautious.numerics import guarded_cholesky, make_rng

logger = logging.getLogger(__name__)


def correlation_matrix(p: int, corr_base: float) -> np.ndarray:
    """Sigma_ij = corr_base^|i - j|."""
    return linalg.toeplitz(corr_base ** np.arange(p))


def generate_synthetic(spec: SynthSpec) -> Tuple[Dataset, np.ndarray, List[int]]:
    """
    Draws a correlated design, sparse true coefficients and a noisy response.

    Rows of x are N(0, Sigma) with Sigma_ij = corr_base^|i-j|. `n_active`
    columns get coefficients of random sign and magnitude in
    [coef_low, coef_high]. Returns the dataset, the true coefficients and the
    sorted 0-based active columns.
    """
    rng = make_rng(spec.seed)
    factor = guarded_cholesky(correlation_matrix(spec.p, spec.corr_base), context="for the design covariance")
    x = rng.standard_normal((spec.n, spec.p)) @ factor.T

    active = sorted(int(j) for j in rng.choice(spec.p, size=spec.n_active, replace=False))
    beta_true = np.zeros(spec.p)
    magnitudes = rng.uniform(spec.coef_low, spec.coef_high, size=spec.n_active)
    signs = rng.choice([-1.0, 1.0], size=spec.n_active)
    beta_true[active] = signs * magnitudes

    y = x @ beta_true + np.sqrt(spec.noise_var) * rng.standard_normal(spec.n)
    logger.debug("simulated n=%d p=%d with %d active columns", spec.n, spec.p, spec.n_active)
    return Dataset(y=y, x=x), beta_true, active


def sidecar_path(csv_path: str | Path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".truth.json")


def save_csv(data: Dataset, path: str | Path, truth: SynthTruth | None = None) -> Path:
    """Writes the response first, then the columns, with 17 significant digits."""
    path = Path(path)
    frame = pd.DataFrame(data.x, columns=data.column_names)
    frame.insert(0, data.response_name, data.y)
    frame.to_csv(path, index=False, float_format="%.17g")
    if truth is not None:
        sidecar = sidecar_path(path)
        sidecar.write_text(truth.model_dump_json(indent=2), encoding="utf-8")
        logger.debug("wrote truth sidecar %s", sidecar)
    return path


def load_truth(csv_path: str | Path) -> SynthTruth | None:
    sidecar = sidecar_path(csv_path)
    if not sidecar.exists():
        return None
    return SynthTruth.model_validate(json.loads(sidecar.read_text(encoding="utf-8")))
