"""
Spectral quantities of symmetric positive definite Toeplitz matrices.

Dense LAPACK solves are the default; the iterative path (Lanczos on the FFT
matvec, shift-and-invert for the low end) exists for extreme-only queries
and for cross-checking the dense results.
"""
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .config import ITERATIVE_MIN_ORDER, LANCZOS_MAXITER, RESIDUAL_RTOL, TRACE_RTOL
from .errors import ConvergenceError, NotPositiveDefiniteError, SpectrumError
from .toeplitz import _check_same_order

logger = logging.getLogger(__name__)

PLAIN_COLUMNS = ["n", "lambda_min", "lambda_min_star", "lambda_max", "lambda_max_star", "mu2", "mu2_star"]
PRECONDITIONED_COLUMNS = [
    "n", "lambda_min", "lambda_min_dagger", "lambda_max", "lambda_max_dagger", "mu2", "mu2_dagger",
]


def scaled_quantities(n, lambda_min, lambda_max, preconditioned=False):
    """
    Order-normalised extreme eigenvalues and condition number.

    Unpreconditioned: n*lmin, log(pi n)/(pi^2 n)*lmax, log(pi n)/(pi n)^2*mu2.
    Preconditioned:   log(n)/n*lmin, log(pi n)/n^2*lmax, mu2/n.
    """
    mu2 = lambda_max / lambda_min
    if preconditioned:
        return {
            "lambda_min_dagger": math.log(n) / n * lambda_min,
            "lambda_max_dagger": math.log(math.pi * n) / n ** 2 * lambda_max,
            "mu2_dagger": mu2 / n,
        }
    return {
        "lambda_min_star": n * lambda_min,
        "lambda_max_star": math.log(math.pi * n) / (math.pi ** 2 * n) * lambda_max,
        "mu2_star": math.log(math.pi * n) / (math.pi * n) ** 2 * mu2,
    }


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    n: int
    lambda_min: float
    lambda_max: float
    mu2: float
    full_spectrum: Optional[np.ndarray] = None
    scaled: dict = field(default_factory=dict)
    preconditioned: bool = False

    @property
    def columns(self):
        return PRECONDITIONED_COLUMNS if self.preconditioned else PLAIN_COLUMNS

    def to_row(self):
        values = {"n": self.n, "lambda_min": self.lambda_min, "lambda_max": self.lambda_max, "mu2": self.mu2}
        values.update(self.scaled)
        return {column: values[column] for column in self.columns}

    def to_dict(self, include_spectrum=False):
        data = dict(self.to_row())
        data["preconditioned"] = self.preconditioned
        if include_spectrum and self.full_spectrum is not None:
            data["full_spectrum"] = self.full_spectrum.tolist()
        return data

    def to_json(self, include_spectrum=False):
        return json.dumps(self.to_dict(include_spectrum))


def _residual(T, value, vector):
    return float(np.linalg.norm(T.matvec(vector) - value * vector))


def _lanczos(T, **kwargs):
    n = T.n
    op = LinearOperator((n, n), matvec=T.matvec, dtype=float)
    # random start: a symmetric start vector never sees skew-symmetric eigenvectors
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        values, vectors = eigsh(op, k=1, v0=v0, tol=0, maxiter=LANCZOS_MAXITER, **kwargs)
    except ArpackNoConvergence as e:
        estimate = float(e.eigenvalues[0]) if len(e.eigenvalues) else math.nan
        residual = _residual(T, estimate, e.eigenvectors[:, 0]) if len(e.eigenvalues) else math.inf
        logger.error(f"Lanczos did not converge for order {n}")
        raise ConvergenceError("Lanczos iteration did not converge", estimate, residual) from e

    value, vector = float(values[0]), vectors[:, 0]
    residual = _residual(T, value, vector)
    if residual > RESIDUAL_RTOL * T.norm_1():
        logger.error(f"Lanczos residual {residual:.2e} too large for order {n}")
        raise ConvergenceError("Lanczos residual above tolerance", value, residual)
    return value


def _iterative_extremes(T):
    lambda_max = _lanczos(T, which="LA")
    try:
        factor = scipy.linalg.cho_factor(T.dense(), lower=True)
    except np.linalg.LinAlgError:
        logger.warning(f"Order-{T.n} matrix is not positive definite, plain Lanczos for lambda_min")
        return _lanczos(T, which="SA"), lambda_max

    n = T.n
    inverse = LinearOperator((n, n), matvec=lambda x: scipy.linalg.cho_solve(factor, x), dtype=float)
    lambda_min = _lanczos(T, sigma=0.0, which="LM", OPinv=inverse)
    return lambda_min, lambda_max


def extreme_eigs(T, mode="full"):
    """
    Smallest and largest eigenvalue of a symmetric Toeplitz matrix.

    Args:
        T: SymToeplitz
        mode: 'full' (dense eigendecomposition) or 'iterative' (Lanczos,
            shift-and-invert with a Cholesky solve for lambda_min)

    Returns:
        Tuple of (lambda_min, lambda_max)

    Raises:
        ConvergenceError: If the iterative mode misses its residual test
    """
    start_time = time.time()
    if mode == "iterative" and T.n < ITERATIVE_MIN_ORDER:
        logger.debug(f"Order {T.n} below {ITERATIVE_MIN_ORDER}, using the dense solver")
        mode = "full"

    if mode == "full":
        eigs = scipy.linalg.eigvalsh(T.dense())
        result = float(eigs[0]), float(eigs[-1])
    elif mode == "iterative":
        result = _iterative_extremes(T)
    else:
        raise ValueError(f"Unknown mode '{mode}'. Use 'full' or 'iterative'")

    elapsed = (time.time() - start_time) * 1000
    logger.info(f"Extreme eigenvalues of order {T.n} ({mode}) in {elapsed:.1f}ms")
    return result


def full_spectrum(T):
    """
    All eigenvalues in ascending order, checked against the trace n * a_0.

    Raises:
        SpectrumError: If the eigenvalue sum misses the trace by more than
            TRACE_RTOL * |trace|, floored at the eigensolver roundoff n * eps * ||T||_1
    """
    start_time = time.time()
    eigs = scipy.linalg.eigvalsh(T.dense())
    trace = T.n * T.first_col[0]
    allowed = max(TRACE_RTOL * abs(trace), T.n * np.finfo(float).eps * T.norm_1())
    if abs(math.fsum(eigs) - trace) > allowed:
        logger.error(f"Trace check failed for order {T.n}: sum {math.fsum(eigs)!r} vs {trace!r}")
        raise SpectrumError(f"Eigenvalue sum does not match the trace for order {T.n}")

    elapsed = (time.time() - start_time) * 1000
    logger.info(f"Full spectrum of order {T.n} in {elapsed:.1f}ms")
    return eigs


def precond_spectrum(A, M):
    """
    Eigenvalues of M^{-1} A through the congruent symmetric matrix L^{-1} A L^{-T}, M = L L^T.

    Args:
        A: Symmetric SymToeplitz
        M: Symmetric positive definite SymToeplitz of the same order

    Returns:
        Ascending eigenvalues

    Raises:
        NotPositiveDefiniteError: If the Cholesky factorization of M fails
    """
    _check_same_order(A, M)
    start_time = time.time()
    try:
        L = scipy.linalg.cholesky(M.dense(), lower=True)
    except np.linalg.LinAlgError as e:
        logger.error(f"Preconditioner of order {M.n} is not positive definite: {e}")
        raise NotPositiveDefiniteError(f"Preconditioner of order {M.n} is not positive definite") from e

    left = scipy.linalg.solve_triangular(L, A.dense(), lower=True)
    congruent = scipy.linalg.solve_triangular(L, left.T, lower=True)
    eigs = scipy.linalg.eigvalsh((congruent + congruent.T) / 2.0)

    elapsed = (time.time() - start_time) * 1000
    logger.info(f"Pencil spectrum of order {A.n} in {elapsed:.1f}ms")
    return eigs


def condition_report(T, preconditioner=None, mode="full", with_spectrum=False):
    """
    Extreme eigenvalues, spectral condition number and their scaled versions.

    Args:
        T: SPD SymToeplitz
        preconditioner: Optional SPD SymToeplitz M; the report then describes M^{-1} T
        mode: Eigensolver mode for the unpreconditioned case
        with_spectrum: Keep the sorted spectrum in the report

    Returns:
        SpectrumReport
    """
    spectrum = None
    if preconditioner is not None:
        spectrum = precond_spectrum(T, preconditioner)
        lambda_min, lambda_max = float(spectrum[0]), float(spectrum[-1])
    elif with_spectrum:
        spectrum = full_spectrum(T)
        lambda_min, lambda_max = float(spectrum[0]), float(spectrum[-1])
    else:
        lambda_min, lambda_max = extreme_eigs(T, mode)

    if lambda_min <= 0:
        logger.error(f"Order-{T.n} matrix has lambda_min = {lambda_min:.3e}")
        raise NotPositiveDefiniteError(f"Condition report needs an SPD matrix (lambda_min = {lambda_min:.3e})")

    preconditioned = preconditioner is not None
    return SpectrumReport(
        n=T.n,
        lambda_min=lambda_min,
        lambda_max=lambda_max,
        mu2=lambda_max / lambda_min,
        full_spectrum=spectrum if with_spectrum else None,
        scaled=scaled_quantities(T.n, lambda_min, lambda_max, preconditioned),
        preconditioned=preconditioned,
    )
