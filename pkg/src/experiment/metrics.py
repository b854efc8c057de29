# src/experiment/metrics.py

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import linregress

from src.config import MU_P, POINTWISE_GRID, VAR_P, VAR_Q
from src.estimator.model import RatioModel, evaluate_batch
from src.experiment.truth import true_beta

BOX_KEYS = ("min", "q1", "median", "q3", "max")


def msd(model: RatioModel, mu_q, mu_p=MU_P, var_p=VAR_P, var_q=VAR_Q) -> float:
    """n^{-1} sum_i (beta(x_i) - beta_hat(x_i))^2 over X_p."""
    truth = true_beta(model.xp_points[:, 0], mu_q, mu_p, var_p, var_q)
    return float(np.mean((truth - model.values_at_xp) ** 2))


def rn_error(model: RatioModel, mu_q, mu_p=MU_P, var_p=VAR_P, var_q=VAR_Q) -> float:
    return float(np.sqrt(msd(model, mu_q, mu_p, var_p, var_q)))


def probe_grid(spec=POINTWISE_GRID) -> np.ndarray:
    start, stop, count = spec
    return np.linspace(start, stop, int(count))


def pointwise_errors(model: RatioModel, mu_q, grid=None, mu_p=MU_P, var_p=VAR_P, var_q=VAR_Q) -> np.ndarray:
    """|beta(x) - beta_hat(x)| on a 1-d probe grid, off-sample."""
    grid = probe_grid() if grid is None else np.asarray(grid, dtype=float)
    return np.abs(true_beta(grid, mu_q, mu_p, var_p, var_q) - evaluate_batch(model, grid))


def box_stats(values) -> dict:
    """
    min, quartiles and max with nearest-rank (type-1) quantiles:
    the q-quantile is the ceil(q * N)-th smallest value.
    """

    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        return {key: None for key in BOX_KEYS}

    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method="inverted_cdf")
    return {
        "min": float(arr[0]),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(arr[-1]),
    }


@dataclass(frozen=True)
class SlopeFit:
    slope: Optional[float]
    intercept: Optional[float]
    points: int
    status: str

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "points": self.points,
            "status": self.status,
        }


def fit_log_slope(xs, errors) -> SlopeFit:
    """Least-squares slope of log(error) against log(x)."""

    xs = np.asarray(xs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = np.isfinite(xs) & np.isfinite(errors) & (xs > 0) & (errors > 0)
    xs, errors = xs[keep], errors[keep]

    if xs.size < 2 or np.unique(xs).size < 2:
        return SlopeFit(slope=None, intercept=None, points=int(xs.size), status="insufficient points")

    fit = linregress(np.log(xs), np.log(errors))
    return SlopeFit(slope=float(fit.slope), intercept=float(fit.intercept), points=int(xs.size), status="ok")
