# src/selection/balance.py

from src.utils.errors import InputError


def lambda_mn(m: int, n: int, eta: float, varsigma: float) -> float:
    """
    A-priori parameter for power-type smoothness phi(t) = t^eta and kernel
    source xi(t) = t^varsigma:

        theta(t) = t^(eta + 1 - varsigma),
        lambda_{m,n} = theta^{-1}(m^{-1/2} + n^{-1/2}).
    """

    if m < 1 or n < 1:
        raise InputError(f"m, n must be >= 1, got m={m}, n={n}", flag="n")
    if not eta > 0:
        raise InputError(f"eta must be > 0, got {eta}", flag="eta")
    if not 0 <= varsigma <= 0.5:
        raise InputError(f"varsigma must lie in [0, 1/2], got {varsigma}", flag="varsigma")

    exponent = eta + 1.0 - varsigma
    if exponent <= 0:
        raise InputError(f"eta + 1 - varsigma must be > 0, got {exponent}", flag="eta")

    return (m ** -0.5 + n ** -0.5) ** (1.0 / exponent)
