# src/capacity/christoffel.py

"""
Regularized Christoffel function with the empirical operator T = S_p^* S_p:

    C(x) = <k_x, (lambda I + T)^{-1} k_x>
         = (1 / lambda) * (k(x, x) - k_x^T (n lambda I + K)^{-1} k_x),

k_x = (k(x_i, x))_i. The sup over a finite probe set is a lower bound of N_inf.
"""

import itertools
import math

import numpy as np
from scipy.linalg import cho_solve

from src.config import CHRISTOFFEL_FLOOR, PROBE_INFLATE, PROBE_SIZE
from src.estimator.lavrentiev import factorize
from src.kernels.functions import KernelSpec, kernel_matrix
from src.kernels.gram import GramSystem
from src.kernels.samples import SampleSet
from src.utils.errors import InputError, NumericalError


def _check_lambda(lam):
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam}", flag="lambda")


def _diag(kernel: KernelSpec, xs: np.ndarray) -> np.ndarray:
    if kernel.family == "custom_ref":
        return np.array([kernel_matrix(kernel, x[None, :], x[None, :])[0, 0] for x in xs])
    return np.full(len(xs), kernel.offset + 1.0)


def christoffel_batch(
    gram: GramSystem,
    kernel: KernelSpec,
    xp: SampleSet,
    lam: float,
    xs,
    factor=None,
) -> np.ndarray:

    _check_lambda(lam)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None] if xp.dim == 1 else xs[None, :]
    if xs.shape[1] != xp.dim:
        raise InputError(f"Dimension mismatch: X_p d={xp.dim}, probes d={xs.shape[1]}")

    if factor is None:
        factor = factorize(gram, lam)

    kx = kernel_matrix(kernel, xp.points, xs)          # (n, P)
    quad = np.einsum("ij,ij->j", kx, cho_solve(factor, kx))
    values = (_diag(kernel, xs) - quad) / lam

    if np.any(values < CHRISTOFFEL_FLOOR):
        worst = float(values.min())
        raise NumericalError(f"Christoffel value {worst:.3e} below floor at lambda={lam}", lam=lam)

    return np.maximum(values, 0.0)


def christoffel(gram: GramSystem, kernel: KernelSpec, xp: SampleSet, lam: float, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (xp.dim,):
        raise InputError(f"Dimension mismatch: X_p d={xp.dim}, point shape {x.shape}")
    return float(christoffel_batch(gram, kernel, xp, lam, x[None, :])[0])


def default_probe_grid(xp: SampleSet, size: int = PROBE_SIZE, inflate: float = PROBE_INFLATE) -> np.ndarray:
    """
    Uniform grid over the bounding box of X_p, each side widened by `inflate`
    of its length; about `size` points in total.
    """

    lo, hi = xp.points.min(axis=0), xp.points.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    lo, hi = lo - inflate * span, hi + inflate * span

    per_axis = max(2, int(math.ceil(size ** (1.0 / xp.dim))))
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    return np.array(list(itertools.product(*axes)), dtype=float)


def n_inf_estimate(
    gram: GramSystem,
    kernel: KernelSpec,
    xp: SampleSet,
    lam: float,
    probe_points,
    factor=None,
) -> float:
    """max C(x) over probe_points and X_p."""

    probes = np.asarray(probe_points, dtype=float)
    if probes.size == 0:
        raise InputError("probe_points must be non-empty", flag="probe-size")
    if probes.ndim == 1:
        probes = probes[:, None] if xp.dim == 1 else probes[None, :]

    if factor is None:
        factor = factorize(gram, lam)

    points = np.vstack([probes, xp.points])
    return float(christoffel_batch(gram, kernel, xp, lam, points, factor=factor).max())
