# src/regularization/constants.py

"""
Numerical check of the scheme requirements on (0, t_max]:

    sup |r(t)|            <= gamma_0
    sup sqrt(t) |g(t)|    <= gamma_{-1/2} / sqrt(lambda)
    sup |g(t)|            <= gamma_{-1} / lambda
    sup t^s |r(t)|        <= gamma_s lambda^s      (qualification s)

Used as a test oracle; violations are reported, not raised.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.config import CHECK_GRID_SIZE, CHECK_T_MIN_RATIO
from src.regularization.schemes import RegScheme, filter_value, residual_value
from src.utils.errors import InputError

# finite order checked for infinite-qualification schemes
INFINITE_QUALIFICATION_ORDER = 10.0


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    bound: float
    max_value: float
    slack: float
    worst_t: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bound": self.bound,
            "max_value": self.max_value,
            "slack": self.slack,
            "worst_t": self.worst_t,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ConstantsReport:
    scheme: RegScheme
    t_max: float
    s: float
    gamma_s: float
    checks: List[InequalityCheck] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def check(self, name: str) -> InequalityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.to_dict(),
            "t_max": self.t_max,
            "s": self.s,
            "gamma_s": self.gamma_s,
            "holds": self.holds,
            "checks": [c.to_dict() for c in self.checks],
        }


def _inequality(name, lhs, bound, grid, rtol=1e-12) -> InequalityCheck:
    gap = bound - lhs
    worst = int(np.argmin(gap))
    slack = float(gap[worst])
    return InequalityCheck(
        name=name,
        bound=float(bound),
        max_value=float(np.max(lhs)),
        slack=slack,
        worst_t=float(grid[worst]),
        holds=bool(slack >= -rtol * max(abs(bound), 1.0)),
    )


def check_scheme_constants(
    scheme: RegScheme,
    t_max: float,
    grid_size: int = CHECK_GRID_SIZE,
    s: Optional[float] = None,
    gamma_s: float = 1.0,
) -> ConstantsReport:

    if not t_max > 0:
        raise InputError(f"t_max must be > 0, got {t_max}", flag="t-max")
    if grid_size < 2:
        raise InputError(f"grid_size must be >= 2, got {grid_size}", flag="grid-size")

    if s is None:
        s = scheme.qualification
        if math.isinf(s):
            s = INFINITE_QUALIFICATION_ORDER

    lam = scheme.lam
    c = scheme.constants
    grid = np.geomspace(t_max * CHECK_T_MIN_RATIO, t_max, grid_size)

    g = np.abs(filter_value(scheme, grid))
    r = np.abs(residual_value(scheme, grid))

    checks = [
        _inequality("residual", r, c.gamma_0, grid),
        _inequality("sqrt_filter", np.sqrt(grid) * g, c.gamma_neg_half / math.sqrt(lam), grid),
        _inequality("filter", g, c.gamma_neg_1 / lam, grid),
        _inequality("qualification", grid ** s * r, gamma_s * lam ** s, grid),
    ]

    return ConstantsReport(scheme=scheme, t_max=float(t_max), s=float(s), gamma_s=float(gamma_s), checks=checks)
