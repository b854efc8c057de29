# src/utils/errors.py


class RatioError(Exception):
    """Base class for estimator failures."""


class InputError(RatioError, ValueError):
    """A precondition on the inputs does not hold."""

    def __init__(self, message, flag=None, **context):
        super().__init__(message)
        self.flag = flag
        self.context = context


class NumericalError(RatioError, ArithmeticError):
    """Factorization, eigendecomposition or non-finite result."""

    def __init__(self, message, lam=None, min_eig=None, **context):
        super().__init__(message)
        self.lam = lam
        self.min_eig = min_eig
        self.context = context
