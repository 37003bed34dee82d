"""Exception types raised across the package."""


class CiError(Exception):
    pass


class NotPositiveDefinite(CiError, ArithmeticError):
    """Factorization pivot fell below the positive-definiteness floor."""


class BadDimensions(CiError, ValueError):
    pass


class BadParameter(CiError, ValueError):
    pass


class UnsupportedOrder(CiError, ValueError):
    pass


class UnsupportedModulation(CiError, ValueError):
    pass


class DegenerateDual(CiError, ArithmeticError):
    pass


class TooLarge(CiError, ValueError):
    pass


class ConfigError(CiError, ValueError):
    """Invalid simulation configuration; ``flag`` names the offending option."""

    def __init__(self, message, flag=None):
        super().__init__(message)
        self.flag = flag


class NotConverged(CiError, RuntimeError):
    """Iteration budget exhausted. ``result`` holds the last feasible iterate."""

    def __init__(self, message, result=None, residual=None):
        super().__init__(message)
        self.result = result
        self.residual = residual


class SelectorExhausted(CiError, RuntimeError):
    pass
