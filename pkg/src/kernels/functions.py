# src/kernels/functions.py

"""
Kernel definitions.

The default kernel is a Gaussian plus a constant,

    K(x, x') = offset + exp(-|x - x'|^2 / (2 * bandwidth^2)),

so the RKHS contains the constant functions. For d > 1 the distance is the
squared Euclidean one.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from src.config import BANDWIDTH, KERNEL_FAMILY, KERNEL_OFFSET
from src.utils.errors import InputError

FAMILIES = ("gaussian_plus_one", "gaussian", "custom_ref")

# name -> k(x, y) for the custom_ref family
_CUSTOM_KERNELS: dict = {}


def register_kernel(name: str, fn: Callable[[np.ndarray, np.ndarray], float]):
    """
    Registers a symmetric positive-definite kernel under `name`,
    usable as KernelSpec(family="custom_ref", ref=name).
    """
    _CUSTOM_KERNELS[name] = fn


@dataclass(frozen=True)
class KernelSpec:
    family: str = KERNEL_FAMILY
    bandwidth: float = BANDWIDTH
    offset: float = KERNEL_OFFSET
    ref: Optional[str] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"Unknown kernel family: {self.family}", flag="kernel-family")
        if not self.bandwidth > 0:
            raise InputError(f"bandwidth must be > 0, got {self.bandwidth}", flag="bandwidth")
        if self.offset < 0:
            raise InputError(f"offset must be >= 0, got {self.offset}", flag="offset")
        if self.family == "gaussian" and self.offset != 0:
            raise InputError("gaussian family has offset 0", flag="offset")
        if self.family == "custom_ref" and self.ref not in _CUSTOM_KERNELS:
            raise InputError(f"No kernel registered under '{self.ref}'", flag="kernel-family")

    @classmethod
    def gaussian(cls, bandwidth: float = BANDWIDTH) -> "KernelSpec":
        return cls(family="gaussian", bandwidth=bandwidth, offset=0.0)

    def to_dict(self) -> dict:
        d = {"family": self.family, "bandwidth": float(self.bandwidth), "offset": float(self.offset)}
        if self.ref is not None:
            d["ref"] = self.ref
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(
            family=d.get("family", KERNEL_FAMILY),
            bandwidth=float(d.get("bandwidth", BANDWIDTH)),
            offset=float(d.get("offset", KERNEL_OFFSET)),
            ref=d.get("ref"),
        )


def kappa0(spec: KernelSpec) -> Optional[float]:
    """sup_x sqrt(K(x, x)); unknown for custom kernels."""
    if spec.family == "custom_ref":
        return None
    return float(np.sqrt(spec.offset + 1.0))


def _from_sq_dist(spec: KernelSpec, sq):
    return spec.offset + np.exp(-sq / (2.0 * spec.bandwidth ** 2))


def eval_kernel(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))

    if x.shape != y.shape:
        raise InputError(f"Dimension mismatch: {x.shape} vs {y.shape}")

    if spec.family == "custom_ref":
        return float(_CUSTOM_KERNELS[spec.ref](x, y))

    diff = x - y
    return float(_from_sq_dist(spec, float(diff @ diff)))


def _as_points(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    return xs


def kernel_matrix(spec: KernelSpec, xs, ys) -> np.ndarray:
    """
    Cross-kernel matrix K[i, j] = k(xs[i], ys[j]).
    """

    xs, ys = _as_points(xs), _as_points(ys)
    if xs.shape[1] != ys.shape[1]:
        raise InputError(f"Dimension mismatch: d={xs.shape[1]} vs d={ys.shape[1]}")

    if spec.family == "custom_ref":
        fn = _CUSTOM_KERNELS[spec.ref]
        return np.array([[float(fn(a, b)) for b in ys] for a in xs], dtype=float).reshape(len(xs), len(ys))

    return _from_sq_dist(spec, cdist(xs, ys, "sqeuclidean"))


def symmetric_kernel_matrix(spec: KernelSpec, xs) -> np.ndarray:
    """
    K over one point set, each unordered pair evaluated once so the
    result equals its transpose exactly.
    """

    xs = _as_points(xs)
    n = len(xs)

    if spec.family == "custom_ref":
        fn = _CUSTOM_KERNELS[spec.ref]
        K = np.empty((n, n), dtype=float)
        for i in range(n):
            for j in range(i, n):
                K[i, j] = K[j, i] = float(fn(xs[i], xs[j]))
        return K

    if n == 1:
        return np.full((1, 1), _from_sq_dist(spec, 0.0))

    return _from_sq_dist(spec, squareform(pdist(xs, "sqeuclidean")))
