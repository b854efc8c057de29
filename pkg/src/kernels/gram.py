# src/kernels/gram.py

"""
Finite-dimensional surrogate of the empirical operator equation

    S_p^* S_p beta = S_q^* S_q 1 .

K = (k(x_i, x_j)) over X_p stands for n * S_p S_p^*, and

    F_i = (n / m) * sum_j k(x_i, x'_j)

is n times the mean embedding of X_q evaluated at x_i.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from src.config import PSD_RTOL
from src.kernels.functions import KernelSpec, kernel_matrix, symmetric_kernel_matrix
from src.kernels.samples import SampleSet
from src.utils.errors import InputError, NumericalError
from src.utils.logger import get_logger

logger = get_logger()


@dataclass(frozen=True)
class GramSystem:
    k_matrix: np.ndarray
    f_bar: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        K = np.array(self.k_matrix, dtype=float)
        F = np.array(self.f_bar, dtype=float)
        if K.shape != (self.n, self.n) or F.shape != (self.n,):
            raise InputError(f"Gram shapes {K.shape}, {F.shape} do not match n={self.n}")
        K.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "k_matrix", K)
        object.__setattr__(self, "f_bar", F)

    @property
    def tol_psd(self) -> float:
        return PSD_RTOL * self.n * float(np.max(np.diag(self.k_matrix)))

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of K / n."""
        try:
            return eigvalsh(self.k_matrix / self.n)
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"Eigenvalue computation failed: {e}") from e

    def min_eigenvalue(self) -> float:
        return float(eigvalsh(self.k_matrix, subset_by_index=[0, 0])[0])

    def check_psd(self) -> bool:
        return self.min_eigenvalue() >= -self.tol_psd


def assemble_gram(spec: KernelSpec, xp: SampleSet, xq: SampleSet) -> GramSystem:
    if xp.measure_tag != "p" or xq.measure_tag != "q":
        raise InputError(
            f"Expected (p, q) samples, got ({xp.measure_tag}, {xq.measure_tag})"
        )
    if xp.dim != xq.dim:
        raise InputError(f"Dimension mismatch: X_p d={xp.dim}, X_q d={xq.dim}")

    n, m = xp.size, xq.size

    K = symmetric_kernel_matrix(spec, xp.points)
    f_bar = (n / m) * kernel_matrix(spec, xp.points, xq.points).sum(axis=1)

    logger.debug(f"[GRAM] n={n} | m={m} | family={spec.family}")

    return GramSystem(k_matrix=K, f_bar=f_bar, n=n, m=m)
