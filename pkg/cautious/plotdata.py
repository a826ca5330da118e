"""x/y series for re-drawing the prior, posterior and indeterminacy figures with any plotting tool."""

import logging
from pathlib import Path
from typing import Callable, Dict, Iterable, Sequence

import numpy as np
import pandas as pd

from cautious.models.dataset import Hyperparameters
from cautious.posterior import orthogonal
from cautious.posterior.prior import mixture_log_density

logger = logging.getLogger(__name__)

# Plot grids only; ten equispaced alpha values.
DEFAULT_ALPHAS = tuple(np.round(np.linspace(0.05, 0.95, 10), 10))
FIGURE_HP = Hyperparameters(tau0=1e-4, tau1=10.0)


def beta_grid(sigma2: float, hp: Hyperparameters, points: int = 4001) -> np.ndarray:
    """Wide grid for the slab plus a dense patch resolving the spike at zero."""
    sd = np.sqrt(sigma2)
    wide = np.linspace(-8.0 * sd * hp.tau1, 8.0 * sd * hp.tau1, points)
    spike = np.linspace(-8.0 * sd * hp.tau0, 8.0 * sd * hp.tau0, 2001)
    return np.unique(np.concatenate([wide, spike]))


def prior_series(
    alphas: Sequence[float] = DEFAULT_ALPHAS, sigma2: float = 1.0, hp: Hyperparameters = FIGURE_HP
) -> pd.DataFrame:
    grid = beta_grid(sigma2, hp)
    frames = [
        pd.DataFrame({"alpha": a, "beta": grid, "density": np.exp(mixture_log_density(grid, a, sigma2, hp))})
        for a in alphas
    ]
    return pd.concat(frames, ignore_index=True)


def posterior_cdf_series(
    beta_hats: Sequence[float] = (0.1, 0.3, 0.5),
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    n: int = 100,
    sigma2: float = 1.0,
    hp: Hyperparameters = FIGURE_HP,
    points: int = 801,
) -> pd.DataFrame:
    grid = np.linspace(-0.5, 1.0, points)
    rows = []
    for beta_hat in beta_hats:
        for a in alphas:
            post = orthogonal.coefficient_posterior(a, beta_hat, n, sigma2, hp)
            rows.append(pd.DataFrame({"beta_hat": beta_hat, "alpha": a, "beta": grid, "cdf": post.cdf(grid)}))
    return pd.concat(rows, ignore_index=True)


def _moment_series(
    moment: Callable, column: str, beta_hats: Iterable[float], alphas: Sequence[float], n: int, sigma2: float, hp
) -> pd.DataFrame:
    rows = [
        {"beta_hat": beta_hat, "alpha": a, column: moment(a, beta_hat, n, sigma2, hp)}
        for beta_hat in beta_hats
        for a in alphas
    ]
    return pd.DataFrame(rows)


def posterior_mean_series(
    beta_hats=(0.1, 0.3, 0.5), alphas=DEFAULT_ALPHAS, n: int = 100, sigma2: float = 1.0, hp=FIGURE_HP
) -> pd.DataFrame:
    return _moment_series(orthogonal.posterior_mean, "mean", beta_hats, alphas, n, sigma2, hp)


def posterior_variance_series(
    beta_hats=(0.1, 0.3, 0.5), alphas=DEFAULT_ALPHAS, n: int = 100, sigma2: float = 1.0, hp=FIGURE_HP
) -> pd.DataFrame:
    return _moment_series(orthogonal.posterior_variance, "variance", beta_hats, alphas, n, sigma2, hp)


def indeterminacy_series(
    tau1_values: Sequence[float] = tuple(np.linspace(1.5, 20.0, 38)),
    eps_values: Sequence[float] = (0.05, 0.1, 0.25, 0.5),
    n: int = 100,
    sigma2: float = 1.0,
    tau0: float = 1e-6,
) -> pd.DataFrame:
    """betaHat^2 thresholds of the indeterminate band against tau1, one band per epsilon."""
    rows = []
    for eps in eps_values:
        for tau1 in tau1_values:
            lower, upper = orthogonal.indeterminacy_region(n, sigma2, Hyperparameters(tau0=tau0, tau1=tau1), eps, eps)
            rows.append({"eps": eps, "tau1": tau1, "lower": lower, "upper": upper})
    return pd.DataFrame(rows)


FIGURES: Dict[str, Callable[[], pd.DataFrame]] = {
    "prior": prior_series,
    "posterior-cdf": posterior_cdf_series,
    "posterior-mean": posterior_mean_series,
    "posterior-variance": posterior_variance_series,
    "indeterminacy": indeterminacy_series,
}


def write_series(names: Iterable[str], out_dir: str | Path) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for name in names:
        path = out_dir / f"{name}.csv"
        FIGURES[name]().to_csv(path, index=False, float_format="%.17g")
        logger.debug("wrote %s", path)
        written[name] = path
    return written
