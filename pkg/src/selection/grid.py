# src/selection/grid.py

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.config import GRID_W, LAMBDA_0, RHO
from src.utils.errors import InputError


@dataclass(frozen=True)
class LambdaGrid:
    """
    Geometric grid lambda_i = lambda_0 * rho**i, i = 1..w.
    lambda_0 itself is kept as the predecessor of the first grid value.
    """

    lambda_0: float = LAMBDA_0
    rho: Optional[float] = RHO
    w: int = GRID_W
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.lambda_0 > 0:
            raise InputError(f"lambda_0 must be > 0, got {self.lambda_0}", flag="lambda0")

        if self.values is None:
            if self.rho is None or not 0 < self.rho < 1:
                raise InputError(f"rho must lie in (0, 1), got {self.rho}", flag="rho")
            if int(self.w) != self.w or self.w < 1:
                raise InputError(f"w must be a positive integer, got {self.w}", flag="w")
            values = self.lambda_0 * self.rho ** np.arange(1, int(self.w) + 1)
        else:
            values = np.asarray(self.values, dtype=float)
            if values.ndim != 1 or values.size != self.w:
                raise InputError(f"expected {self.w} grid values, got {values.size}", flag="w")
            if np.any(values <= 0):
                raise InputError("grid values must be positive", flag="lambda")

        values = np.array(values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "w", int(self.w))

    @classmethod
    def explicit(cls, lambda_0: float, values: Sequence[float]) -> "LambdaGrid":
        """Hand-built grid; values must be non-increasing and start at or below lambda_0."""

        values = np.asarray(values, dtype=float)
        full = np.concatenate([[lambda_0], values])
        if np.any(np.diff(full) > 0):
            raise InputError("explicit grid must be non-increasing", flag="lambda")
        return cls(lambda_0=lambda_0, rho=None, w=len(values), values=values)

    @property
    def with_predecessor(self) -> np.ndarray:
        """[lambda_0, lambda_1, ..., lambda_w]"""
        return np.concatenate([[self.lambda_0], self.values])

    def to_dict(self) -> dict:
        return {
            "lambda_0": float(self.lambda_0),
            "rho": None if self.rho is None else float(self.rho),
            "w": self.w,
            "values": self.values.tolist(),
        }
