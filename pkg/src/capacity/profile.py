# src/capacity/profile.py

"""
Effective dimension N(lambda) = trace((lambda I + K/n)^{-1} K/n) = sum t_i / (lambda + t_i)
over the eigenvalues t_i of K/n, the balance point lambda_* with N(lambda_*)/lambda_* = n,
and capacity curves over a lambda grid.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from src.capacity.christoffel import default_probe_grid, n_inf_estimate
from src.config import LAMBDA_STAR_LO, LAMBDA_STAR_RTOL
from src.estimator.lavrentiev import factorize
from src.io.exporter import export_csv
from src.kernels.functions import KernelSpec
from src.kernels.gram import GramSystem
from src.kernels.samples import SampleSet
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger()


def effective_dimension_from_spectrum(eigenvalues, lam: float) -> float:
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam}", flag="lambda")
    t = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    return float(np.sum(t / (lam + t)))


def effective_dimension(gram: GramSystem, lam: float, eigenvalues=None) -> float:
    if eigenvalues is None:
        eigenvalues = gram.eigenvalues()
    return effective_dimension_from_spectrum(eigenvalues, lam)


def find_lambda_star(gram: GramSystem, bracket: Optional[Tuple[float, float]] = None) -> float:
    """
    Bisection on the decreasing map lambda -> N(lambda)/lambda for the point
    where it equals n. Default bracket is (1e-8, max K(x_i, x_i)), i.e. (1e-8, kappa_0^2).
    """

    eigenvalues = gram.eigenvalues()
    n = gram.n

    if bracket is None:
        bracket = (LAMBDA_STAR_LO, float(np.max(np.diag(gram.k_matrix))))
    lo, hi = float(bracket[0]), float(bracket[1])

    if not (0 < lo < hi):
        raise InputError(f"Invalid lambda_* bracket ({lo}, {hi})", flag="bracket")

    def balance(lam):
        return effective_dimension_from_spectrum(eigenvalues, lam) / lam - n

    f_lo, f_hi = balance(lo) + n, balance(hi) + n
    if not (f_lo > n > f_hi):
        raise InputError(
            f"lambda_* not bracketed: N(lo)/lo={f_lo:.6g}, N(hi)/hi={f_hi:.6g}, n={n}",
            flag="bracket",
            lo_value=f_lo,
            hi_value=f_hi,
        )

    lam_star = float(bisect(balance, lo, hi, rtol=LAMBDA_STAR_RTOL, maxiter=500))
    logger.debug(f"[CAPACITY] lambda_*={lam_star:.6g} | n={n}")
    return lam_star


@dataclass(frozen=True)
class CapacityProfile:
    lambdas: np.ndarray
    n_eff: np.ndarray
    n_inf: np.ndarray
    lambda_star: Optional[float] = None

    def rows(self):
        return [
            {"lambda": repr(float(l)), "n_eff": repr(float(e)), "n_inf": repr(float(s))}
            for l, e, s in zip(self.lambdas, self.n_eff, self.n_inf)
        ]

    def to_dict(self) -> dict:
        return {
            "lambdas": self.lambdas.tolist(),
            "n_eff": self.n_eff.tolist(),
            "n_inf": self.n_inf.tolist(),
            "lambda_star": self.lambda_star,
        }


def capacity_profile(
    gram: GramSystem,
    kernel: KernelSpec,
    xp: SampleSet,
    lambdas: Sequence[float],
    probe_points=None,
    bracket=None,
) -> CapacityProfile:

    lambdas = np.sort(np.asarray(lambdas, dtype=float))[::-1]
    if lambdas.size == 0 or np.any(lambdas <= 0):
        raise InputError("lambda grid must be non-empty and positive", flag="lambda")

    if probe_points is None:
        probe_points = default_probe_grid(xp)

    eigenvalues = gram.eigenvalues()
    n_eff = np.array([effective_dimension_from_spectrum(eigenvalues, lam) for lam in lambdas])
    n_inf = np.array([
        n_inf_estimate(gram, kernel, xp, lam, probe_points, factor=factorize(gram, lam))
        for lam in lambdas
    ])

    try:
        lambda_star = find_lambda_star(gram, bracket)
    except InputError as e:
        logger.warning(f"[CAPACITY] lambda_* unavailable: {e}")
        lambda_star = None

    return CapacityProfile(lambdas=lambdas, n_eff=n_eff, n_inf=n_inf, lambda_star=lambda_star)


def export_profile_csv(profile: CapacityProfile, path):
    export_csv(profile.rows(), path, fieldnames=["lambda", "n_eff", "n_inf"])
