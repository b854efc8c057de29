# src/estimator/lavrentiev.py

"""
Iterated Lavrentiev regularization of S_p^* S_p beta = f, f = S_q^* S_q 1.

Operator recursion, beta^0 = 0:

    (lambda I + T) beta^l = f + lambda beta^{l-1},   T = S_p^* S_p .

Point values at X_p (multiply by n, evaluate at x_i):

    (n lambda I + K) v^l = F + n lambda v^{l-1}.

Representer update. Rearranging the operator recursion,

    beta^l = f / lambda + beta^{l-1} - (1 / lambda) T beta^l
           = f / lambda + beta^{l-1} - (1 / (n lambda)) sum_i v^l_i k(., x_i),

so with beta^l = sum_i alpha_i k(., x_i) + mu f:

    mu^l    = mu^{l-1} + 1 / lambda           ->  mu^k = k / lambda
    alpha^l = alpha^{l-1} - v^l / (n lambda).

One Cholesky factor of (n lambda I + K) serves all k steps.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigvalsh

from src.estimator.model import RatioModel
from src.kernels.functions import KernelSpec
from src.kernels.gram import GramSystem
from src.kernels.samples import SampleSet
from src.regularization.schemes import iterated_lavrentiev
from src.utils.errors import InputError, NumericalError
from src.utils.logger import get_logger

logger = get_logger()


def factorize(gram: GramSystem, lam: float):
    """Cholesky factor of (n lambda I + K)."""

    shifted = gram.k_matrix + gram.n * lam * np.eye(gram.n)

    try:
        return cho_factor(shifted, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        try:
            min_eig = float(eigvalsh(shifted, subset_by_index=[0, 0])[0])
        except (np.linalg.LinAlgError, ValueError):
            min_eig = float("nan")
        raise NumericalError(
            f"(n*lambda*I + K) not positive definite at lambda={lam}: "
            f"min eigenvalue ~ {min_eig:.3e}",
            lam=lam,
            min_eig=min_eig,
        ) from e


def lavrentiev_step(factor, gram: GramSystem, lam: float, previous: np.ndarray) -> np.ndarray:
    """One step v^l = (n lambda I + K)^{-1} (F + n lambda v^{l-1})."""

    values = cho_solve(factor, gram.f_bar + gram.n * lam * previous)

    if not np.isfinite(values).all():
        raise NumericalError(f"Non-finite Lavrentiev iterate at lambda={lam}", lam=lam)

    return values


def lavrentiev_iterates(gram: GramSystem, lam: float, k: int, factor=None):
    """Point values v^1, ..., v^k."""

    iterated_lavrentiev(lam, k)  # validates lam, k
    if factor is None:
        factor = factorize(gram, lam)

    values = np.zeros(gram.n)
    iterates = []
    for _ in range(k):
        values = lavrentiev_step(factor, gram, lam, values)
        iterates.append(values)
    return iterates


def check_sample_shapes(gram: GramSystem, xp: SampleSet, xq: SampleSet):
    if gram.n != xp.size or gram.m != xq.size:
        raise InputError(
            f"Gram (n={gram.n}, m={gram.m}) does not match samples "
            f"(n={xp.size}, m={xq.size})"
        )


def fit_iterated_lavrentiev(
    gram: GramSystem,
    xp: SampleSet,
    xq: SampleSet,
    kernel: KernelSpec,
    lam: float,
    k: int,
    factor=None,
) -> RatioModel:

    scheme = iterated_lavrentiev(lam, k)
    check_sample_shapes(gram, xp, xq)

    n = gram.n
    if factor is None:
        factor = factorize(gram, scheme.lam)

    values = np.zeros(n)
    alpha = np.zeros(n)

    for _ in range(scheme.k):
        values = lavrentiev_step(factor, gram, scheme.lam, values)
        alpha = alpha - values / (n * scheme.lam)

    logger.debug(f"[FIT] lambda={scheme.lam:.6g} | k={scheme.k} | n={n} | m={gram.m}")

    return RatioModel(
        scheme=scheme,
        kernel=kernel,
        xp_points=xp.points,
        xq_points=xq.points,
        alpha=alpha,
        mu_coeff=scheme.k / scheme.lam,
        values_at_xp=values,
    )
