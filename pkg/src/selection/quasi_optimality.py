# src/selection/quasi_optimality.py

"""
Quasi-optimality choice of lambda on a geometric grid.

Fits are taken at lambda_0, lambda_1, ..., lambda_w; the chosen lambda_i
(i >= 1) minimizes |beta^{lambda_i} - beta^{lambda_{i-1}}| in the empirical
norm |u| = (mean u_j^2)^{1/2} over the values at X_p. Ties go to the larger lambda.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.estimator.lavrentiev import factorize, fit_iterated_lavrentiev
from src.estimator.model import RatioModel
from src.kernels.functions import KernelSpec
from src.kernels.gram import GramSystem
from src.kernels.samples import SampleSet
from src.selection.grid import LambdaGrid
from src.utils.errors import InputError, NumericalError
from src.utils.logger import get_logger

logger = get_logger()


def rn_norm(u) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.sqrt(np.mean(u * u)))


def select_quasi_optimal(value_vectors) -> tuple:
    """
    value_vectors[0] belongs to lambda_0, value_vectors[i] to lambda_i.
    Returns (diffs, index) with diffs[i-1] = |v_i - v_{i-1}| and index the
    0-based position of the minimum (first occurrence, i.e. larger lambda).
    """

    if len(value_vectors) < 3:
        raise InputError("quasi-optimality needs at least two grid values", flag="w")

    diffs = np.array([
        rn_norm(np.asarray(value_vectors[i]) - np.asarray(value_vectors[i - 1]))
        for i in range(1, len(value_vectors))
    ])
    return diffs, int(np.argmin(diffs))


@dataclass(frozen=True)
class SelectionTrace:
    grid: LambdaGrid
    k: int
    diffs: np.ndarray
    chosen_index: int
    chosen_lambda: float
    models: Optional[List[RatioModel]] = None

    @property
    def chosen_model(self) -> Optional[RatioModel]:
        """Model at the chosen lambda, when models were retained."""
        if self.models is None:
            return None
        return self.models[self.chosen_index + 1]

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "k": self.k,
            "diffs": self.diffs.tolist(),
            "chosen_index": self.chosen_index,
            "chosen_lambda": self.chosen_lambda,
        }


def quasi_optimality(
    gram: GramSystem,
    xp: SampleSet,
    xq: SampleSet,
    kernel: KernelSpec,
    k: int,
    grid: LambdaGrid = None,
    keep_models: bool = True,
) -> SelectionTrace:

    grid = grid or LambdaGrid()
    if grid.w < 2:
        raise InputError(f"grid needs w >= 2, got {grid.w}", flag="w")

    models = []
    for lam in grid.with_predecessor:
        try:
            models.append(
                fit_iterated_lavrentiev(gram, xp, xq, kernel, lam, k, factor=factorize(gram, lam))
            )
        except NumericalError as e:
            if e.lam is None:
                e.lam = float(lam)
            raise

    diffs, index = select_quasi_optimal([m.values_at_xp for m in models])
    chosen = float(grid.values[index])

    logger.debug(f"[SELECT] k={k} | chosen lambda={chosen:.6g} | index={index}")

    return SelectionTrace(
        grid=grid,
        k=int(k),
        diffs=diffs,
        chosen_index=index,
        chosen_lambda=chosen,
        models=models if keep_models else None,
    )
