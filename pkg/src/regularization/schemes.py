# src/regularization/schemes.py

"""
Spectral filter families g_lambda and their residuals r_lambda(t) = 1 - t g_lambda(t).

Iterated Lavrentiev (k steps, k = 1 is plain Lavrentiev / KuLSIF):

    g(t) = (1 - a^k) / t,   a = lambda / (lambda + t)
    r(t) = a^k

evaluated through the cancellation-free sum

    g(t) = (1 / (lambda + t)) * sum_{j<k} a^j ,   g(0) = k / lambda.

Spectral cutoff: g(t) = 1/t for t >= lambda, else 0.
"""

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from src.utils.errors import InputError

KINDS = ("lavrentiev", "iterated_lavrentiev", "spectral_cutoff")


@dataclass(frozen=True)
class SchemeConstants:
    gamma_0: float
    gamma_neg_half: float
    gamma_neg_1: float


@dataclass(frozen=True)
class RegScheme:
    kind: str
    lam: float
    k: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"Unknown scheme kind: {self.kind}", flag="scheme")
        if not (isinstance(self.lam, (int, float, np.floating)) and self.lam > 0 and math.isfinite(self.lam)):
            raise InputError(f"lambda must be > 0, got {self.lam}", flag="lambda")
        if int(self.k) != self.k or self.k < 1:
            raise InputError(f"k must be a positive integer, got {self.k}", flag="k")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "k", int(self.k))
        if self.kind == "lavrentiev" and self.k != 1:
            raise InputError("lavrentiev is the k = 1 scheme", flag="k")

    @property
    def iterations(self) -> int:
        """Number of Lavrentiev steps; 0 for non-Lavrentiev kinds."""
        return self.k if self.kind != "spectral_cutoff" else 0

    @property
    def qualification(self) -> float:
        if self.kind == "spectral_cutoff":
            return math.inf
        return float(self.k)

    @property
    def constants(self) -> SchemeConstants:
        if self.kind == "spectral_cutoff":
            return SchemeConstants(1.0, 1.0, 1.0)
        return SchemeConstants(1.0, math.sqrt(self.k), float(self.k))

    def with_lambda(self, lam: float) -> "RegScheme":
        return replace(self, lam=lam)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d: dict) -> "RegScheme":
        return cls(kind=d["kind"], lam=float(d["lambda"]), k=int(d.get("k", 1)))


def lavrentiev(lam: float) -> RegScheme:
    return RegScheme("lavrentiev", lam, 1)


def iterated_lavrentiev(lam: float, k: int) -> RegScheme:
    return RegScheme("iterated_lavrentiev", lam, k)


def spectral_cutoff(lam: float) -> RegScheme:
    return RegScheme("spectral_cutoff", lam, 1)


# =========================
# Scalar filter algebra (vectorized over t)
# =========================

def _check_t(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise InputError("filter argument t must be >= 0")
    return arr


def _out(arr, t):
    return float(arr) if np.ndim(t) == 0 else arr


def filter_value(scheme: RegScheme, t) -> Union[float, np.ndarray]:
    t_arr = _check_t(t)
    lam = scheme.lam

    if scheme.kind == "spectral_cutoff":
        g = np.where(t_arr >= lam, 1.0 / np.maximum(t_arr, lam), 0.0)
        return _out(g, t)

    a = lam / (lam + t_arr)
    powers = np.ones_like(a)
    total = np.zeros_like(a)
    for _ in range(scheme.k):
        total = total + powers
        powers = powers * a
    return _out(total / (lam + t_arr), t)


def residual_value(scheme: RegScheme, t) -> Union[float, np.ndarray]:
    t_arr = _check_t(t)
    lam = scheme.lam

    if scheme.kind == "spectral_cutoff":
        return _out(np.where(t_arr >= lam, 0.0, 1.0), t)

    return _out((lam / (lam + t_arr)) ** scheme.k, t)


def filter_slope(scheme: RegScheme, t) -> Union[float, np.ndarray]:
    """
    Divided difference h(t) = (g(t) - g(0)) / t, with h(0) = g'(0).

    For iterated Lavrentiev:
        h(t) = -(1 / (lambda (lambda + t))) * sum_{i<k} (k - i) a^i
    """

    t_arr = _check_t(t)
    lam = scheme.lam

    if scheme.kind == "spectral_cutoff":
        safe = np.maximum(t_arr, lam)
        return _out(np.where(t_arr >= lam, 1.0 / (safe * safe), 0.0), t)

    k = scheme.k
    a = lam / (lam + t_arr)
    powers = np.ones_like(a)
    total = np.zeros_like(a)
    for i in range(k):
        total = total + (k - i) * powers
        powers = powers * a
    return _out(-total / (lam * (lam + t_arr)), t)


def filter_at_zero(scheme: RegScheme) -> float:
    return float(filter_value(scheme, 0.0))
