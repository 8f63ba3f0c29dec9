"""
Exceptions raised by the core layer.

Numerical failures carry the best result obtained so far, so callers can
report it instead of discarding the work.
"""
import numpy as np


class AccuracyError(RuntimeError):
    """A coefficient could not be computed to the requested tolerance."""

    def __init__(self, msg, estimate, tol):
        super().__init__(f"{msg} (achieved {estimate:.3e}, requested {tol:.3e})")
        self.estimate = estimate
        self.tol = tol


class ConvergenceError(RuntimeError):
    """The iterative eigensolver stopped before meeting its residual test."""

    def __init__(self, msg, estimate, residual):
        super().__init__(f"{msg} (estimate {estimate!r}, residual {residual:.3e})")
        self.estimate = estimate
        self.residual = residual


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


class SpectrumError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass
