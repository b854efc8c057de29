# src/experiment/rates.py

"""
Empirical convergence rates at the a-priori lambda = lambda_{n,n}(eta, varsigma).

Two error sequences per n: the median |beta(x0) - beta_hat(x0)| at one probe
point and the median empirical-norm error over X_p. Both are regressed in
log-log scale against n^{-1/2}; the slopes are reported, not asserted.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.config import MU_P, VAR_P, VAR_Q
from src.estimator.lavrentiev import fit_iterated_lavrentiev
from src.estimator.model import evaluate
from src.experiment.metrics import SlopeFit, fit_log_slope, rn_error
from src.experiment.parallel import run_tasks
from src.experiment.sampling import STREAM_P, STREAM_Q, derive_seed, sample_normal
from src.experiment.truth import true_beta
from src.io.exporter import export_csv
from src.kernels.functions import KernelSpec
from src.kernels.gram import assemble_gram
from src.selection.balance import lambda_mn
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger()

RATE_FIELDS = ["n", "lambda", "pointwise_median", "rn_median"]


@dataclass
class RateRecord:
    n_list: List[int]
    lambdas: List[float]
    pointwise_median: List[float]
    rn_median: List[float]
    pointwise_fit: SlopeFit
    rn_fit: SlopeFit
    probe: float
    k: int
    eta: float
    varsigma: float

    def rows(self) -> List[dict]:
        return [
            {"n": n, "lambda": repr(lam), "pointwise_median": repr(pw), "rn_median": repr(rn)}
            for n, lam, pw, rn in zip(self.n_list, self.lambdas, self.pointwise_median, self.rn_median)
        ]

    def to_dict(self) -> dict:
        return {
            "n_list": self.n_list,
            "lambdas": self.lambdas,
            "pointwise_median": self.pointwise_median,
            "rn_median": self.rn_median,
            "pointwise_fit": self.pointwise_fit.to_dict(),
            "rn_fit": self.rn_fit.to_dict(),
            "probe": self.probe,
            "k": self.k,
            "eta": self.eta,
            "varsigma": self.varsigma,
        }


def _rate_replication(n, lam, k, replication, seed, mu_q, probe, kernel, mu_p, var_p, var_q):
    xp = sample_normal(mu_p, var_p, n, seed=derive_seed(seed, replication, float(n), STREAM_P), measure_tag="p")
    xq = sample_normal(mu_q, var_q, n, seed=derive_seed(seed, replication, float(n), STREAM_Q), measure_tag="q")
    gram = assemble_gram(kernel, xp, xq)
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, lam, k)

    pointwise = abs(true_beta(probe, mu_q, mu_p, var_p, var_q) - evaluate(model, [probe]))
    return pointwise, rn_error(model, mu_q, mu_p, var_p, var_q)


def run_rate_study(
    n_list,
    eta: float,
    varsigma: float,
    k: int,
    replications: int,
    seed: int,
    mu_q: float = 2.0,
    probe: Optional[float] = None,
    kernel: KernelSpec = None,
    mu_p: float = MU_P,
    var_p: float = VAR_P,
    var_q: float = VAR_Q,
    threads: int = 1,
) -> RateRecord:

    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InputError(f"n_list must be increasing, got {n_list}", flag="n-list")
    if replications < 1:
        raise InputError(f"replications must be >= 1, got {replications}", flag="replications")

    kernel = kernel or KernelSpec()
    probe = float(mu_q if probe is None else probe)

    lambdas, pw_medians, rn_medians = [], [], []
    for n in n_list:
        lam = lambda_mn(n, n, eta, varsigma)
        tasks = [
            (n, lam, k, r, seed, mu_q, probe, kernel, mu_p, var_p, var_q)
            for r in range(replications)
        ]
        results = run_tasks(_rate_replication, tasks, threads=threads, desc=f"RATES | n={n}")

        pw = np.array([r[0] for r in results])
        rn = np.array([r[1] for r in results])
        lambdas.append(float(lam))
        pw_medians.append(float(np.median(pw)))
        rn_medians.append(float(np.median(rn)))

        logger.info(
            f"[RATES] n={n} | lambda={lam:.4g} | "
            f"pointwise={pw_medians[-1]:.4g} | rn={rn_medians[-1]:.4g}"
        )

    scale = np.asarray(n_list, dtype=float) ** -0.5
    return RateRecord(
        n_list=n_list,
        lambdas=lambdas,
        pointwise_median=pw_medians,
        rn_median=rn_medians,
        pointwise_fit=fit_log_slope(scale, pw_medians),
        rn_fit=fit_log_slope(scale, rn_medians),
        probe=probe,
        k=int(k),
        eta=float(eta),
        varsigma=float(varsigma),
    )


def export_rates_csv(record: RateRecord, path):
    export_csv(record.rows(), path, fieldnames=RATE_FIELDS)
