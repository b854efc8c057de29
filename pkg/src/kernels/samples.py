# src/kernels/samples.py

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.utils.errors import InputError

MEASURE_TAGS = ("p", "q")


@dataclass(frozen=True)
class SampleSet:
    """
    Ordered points in R^d drawn from one measure.

    points      : (count, d) float array, read-only
    measure_tag : "p" (denominator) or "q" (numerator)
    seed        : generator seed when simulated
    """

    points: np.ndarray
    measure_tag: str = "p"
    seed: Optional[int] = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError(f"Sample set must be non-empty, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise InputError("Sample set contains non-finite coordinates")
        if self.measure_tag not in MEASURE_TAGS:
            raise InputError(f"measure_tag must be one of {MEASURE_TAGS}, got {self.measure_tag}")

        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.size

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "measure_tag": self.measure_tag,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleSet":
        return cls(
            points=np.asarray(d["points"], dtype=float),
            measure_tag=d.get("measure_tag", "p"),
            seed=d.get("seed"),
        )
