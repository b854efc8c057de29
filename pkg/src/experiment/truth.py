# src/experiment/truth.py

import numpy as np
from scipy.stats import norm

from src.config import MU_P, VAR_P, VAR_Q


def true_beta(x, mu_q, mu_p=MU_P, var_p=VAR_P, var_q=VAR_Q):
    """
    dq/dp for p = N(mu_p, var_p), q = N(mu_q, var_q) (mean, variance):

        sqrt(var_p / var_q) * exp((x - mu_p)^2 / (2 var_p) - (x - mu_q)^2 / (2 var_q))

    With the defaults this is sqrt(10) * exp(((x - 2)^2 - 10 (x - mu_q)^2) / 10).
    """

    x = np.asarray(x, dtype=float)
    out = np.sqrt(var_p / var_q) * np.exp(
        (x - mu_p) ** 2 / (2.0 * var_p) - (x - mu_q) ** 2 / (2.0 * var_q)
    )
    return float(out) if out.ndim == 0 else out


def normal_pdf_ratio(x, mu_q, mu_p=MU_P, var_p=VAR_P, var_q=VAR_Q):
    """Same ratio through scipy's normal densities."""
    x = np.asarray(x, dtype=float)
    out = norm.pdf(x, loc=mu_q, scale=np.sqrt(var_q)) / norm.pdf(x, loc=mu_p, scale=np.sqrt(var_p))
    return float(out) if out.ndim == 0 else out
