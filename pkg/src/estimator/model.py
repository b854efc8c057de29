# src/estimator/model.py

"""
Representer form of a fitted ratio

    beta(x) = sum_i alpha_i k(x, x_i) + mu_coeff * (1/m) sum_j k(x, x'_j)

The second term is the empirical mean embedding of X_q. It is tracked as one
coefficient instead of m extra sections because every spectral filter maps
S_q^* S_q 1 to g(0) times that embedding plus something in span{k(., x_i)}.
"""

from dataclasses import dataclass

import numpy as np

from src.io.exporter import export_json, read_json
from src.kernels.functions import KernelSpec, kernel_matrix
from src.regularization.schemes import RegScheme
from src.utils.errors import InputError


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RatioModel:
    scheme: RegScheme
    kernel: KernelSpec
    xp_points: np.ndarray
    xq_points: np.ndarray
    alpha: np.ndarray
    mu_coeff: float
    values_at_xp: np.ndarray

    def __post_init__(self):
        xp = np.array(self.xp_points, dtype=float)
        xq = np.array(self.xq_points, dtype=float)
        if xp.ndim == 1:
            xp = xp[:, None]
        if xq.ndim == 1:
            xq = xq[:, None]

        n = xp.shape[0]
        alpha = np.asarray(self.alpha, dtype=float)
        values = np.asarray(self.values_at_xp, dtype=float)
        if alpha.shape != (n,) or values.shape != (n,):
            raise InputError(
                f"alpha {alpha.shape} and values {values.shape} must have length n={n}"
            )
        if xp.shape[1] != xq.shape[1]:
            raise InputError(f"Dimension mismatch: X_p d={xp.shape[1]}, X_q d={xq.shape[1]}")

        object.__setattr__(self, "xp_points", _frozen(xp))
        object.__setattr__(self, "xq_points", _frozen(xq))
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "values_at_xp", _frozen(values))
        object.__setattr__(self, "mu_coeff", float(self.mu_coeff))

    @property
    def n(self) -> int:
        return self.xp_points.shape[0]

    @property
    def m(self) -> int:
        return self.xq_points.shape[0]

    @property
    def dim(self) -> int:
        return self.xp_points.shape[1]

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "scheme": self.scheme.to_dict(),
            "xp_points": self.xp_points.tolist(),
            "xq_points": self.xq_points.tolist(),
            "alpha": self.alpha.tolist(),
            "mu_coeff": self.mu_coeff,
            "values_at_xp": self.values_at_xp.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RatioModel":
        return cls(
            scheme=RegScheme.from_dict(d["scheme"]),
            kernel=KernelSpec.from_dict(d["kernel"]),
            xp_points=np.asarray(d["xp_points"], dtype=float),
            xq_points=np.asarray(d["xq_points"], dtype=float),
            alpha=np.asarray(d["alpha"], dtype=float),
            mu_coeff=float(d["mu_coeff"]),
            values_at_xp=np.asarray(d["values_at_xp"], dtype=float),
        )


def evaluate_batch(model: RatioModel, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0)
    if xs.ndim == 1:
        # a flat list is a list of scalars only for 1-d models
        xs = xs[:, None] if model.dim == 1 else xs[None, :]
    if xs.shape[1] != model.dim:
        raise InputError(f"Dimension mismatch: model d={model.dim}, points d={xs.shape[1]}")

    sections = kernel_matrix(model.kernel, xs, model.xp_points) @ model.alpha
    embedding = kernel_matrix(model.kernel, xs, model.xq_points).mean(axis=1)
    return sections + model.mu_coeff * embedding


def evaluate(model: RatioModel, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.shape[0] != model.dim:
        raise InputError(f"Dimension mismatch: model d={model.dim}, point shape {x.shape}")
    return float(evaluate_batch(model, x[None, :])[0])


def save_model(model: RatioModel, path):
    export_json(model.to_dict(), path)


def load_model(path) -> RatioModel:
    return RatioModel.from_dict(read_json(path))
