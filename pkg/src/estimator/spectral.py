# src/estimator/spectral.py

"""
General-scheme path beta = g(T) f through the eigendecomposition K/n = U diag(t) U^T.

Split g(t) = g(0) + t h(t), h the divided difference. Since T f = S_p^* (f(x_i))_i
and h(T) S_p^* = S_p^* h(K/n),

    g(T) f = g(0) f + S_p^* h(K/n) (F / n),

which gives

    mu_coeff = g(0)
    alpha    = (1/n) U h(t) U^T (F / n)
    values   = U g(t) U^T (F / n).

g(0) f carries the part of the mean embedding outside span{k(., x_i)}.
For Lavrentiev-type schemes the recursion is authoritative and this path is its oracle.
"""

import numpy as np
from scipy.linalg import eigh

from src.estimator.lavrentiev import check_sample_shapes, fit_iterated_lavrentiev
from src.estimator.model import RatioModel
from src.kernels.functions import KernelSpec
from src.kernels.gram import GramSystem
from src.kernels.samples import SampleSet
from src.regularization.schemes import RegScheme, filter_at_zero, filter_slope, filter_value
from src.utils.errors import NumericalError
from src.utils.logger import get_logger

logger = get_logger()


def spectral_decomposition(gram: GramSystem):
    """(t, U) of K/n with t clipped at 0."""

    try:
        t, U = eigh(gram.k_matrix / gram.n, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Eigendecomposition of K/n failed: {e}") from e

    return np.clip(t, 0.0, None), U


def fit_spectral(
    gram: GramSystem,
    xp: SampleSet,
    xq: SampleSet,
    kernel: KernelSpec,
    scheme: RegScheme,
    decomposition=None,
) -> RatioModel:

    check_sample_shapes(gram, xp, xq)

    t, U = decomposition if decomposition is not None else spectral_decomposition(gram)
    coeffs = U.T @ (gram.f_bar / gram.n)

    values = U @ (filter_value(scheme, t) * coeffs)
    alpha = U @ (filter_slope(scheme, t) * coeffs) / gram.n

    if not (np.isfinite(values).all() and np.isfinite(alpha).all()):
        raise NumericalError(f"Non-finite spectral fit at lambda={scheme.lam}", lam=scheme.lam)

    logger.debug(f"[FIT-SPECTRAL] kind={scheme.kind} | lambda={scheme.lam:.6g} | k={scheme.k}")

    return RatioModel(
        scheme=scheme,
        kernel=kernel,
        xp_points=xp.points,
        xq_points=xq.points,
        alpha=alpha,
        mu_coeff=filter_at_zero(scheme),
        values_at_xp=values,
    )


def fit_model(
    gram: GramSystem,
    xp: SampleSet,
    xq: SampleSet,
    kernel: KernelSpec,
    scheme: RegScheme,
) -> RatioModel:
    """Recursion for Lavrentiev-type schemes, spectral calculus otherwise."""

    if scheme.kind == "spectral_cutoff":
        return fit_spectral(gram, xp, xq, kernel, scheme)
    return fit_iterated_lavrentiev(gram, xp, xq, kernel, scheme.lam, scheme.k)
