"""
Symmetric Toeplitz matrices stored by their first column.

Entry (s, t) is first_col[|s - t|]. Dense arrays are only materialised for
eigensolvers and order checks.
"""
import json
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.linalg

from .config import LOEWNER_RTOL, SERIES_FLOAT_FORMAT
from .symbols import CoeffVector

logger = logging.getLogger(__name__)

DENSE_DUMP_MAX_N = 64


@dataclass(frozen=True, eq=False)
class SymToeplitz:
    """
    Real symmetric Toeplitz matrix with O(n) storage.

    Matrix-vector products use a circulant embedding of size 2n, so they cost
    O(n log n); the embedding spectrum is computed once at construction.
    """

    first_col: np.ndarray

    def __post_init__(self):
        col = np.array(self.first_col, dtype=float)
        if col.ndim != 1:
            raise ValueError(f"first_col shape {col.shape} is not 1-D")
        if len(col) == 0:
            raise ValueError("first_col is empty")
        col.setflags(write=False)
        object.__setattr__(self, "first_col", col)

        circ = np.zeros(2 * len(col))
        circ[: len(col)] = col
        circ[len(col) + 1:] = col[1:][::-1]
        object.__setattr__(self, "_circ_fft", np.fft.rfft(circ))

    @property
    def n(self):
        return len(self.first_col)

    def dense(self):
        return scipy.linalg.toeplitz(self.first_col)

    def matvec(self, x, method="fft"):
        """
        Multiply a vector by this matrix.

        Args:
            x: Vector of length n
            method: 'fft' (circulant embedding) or 'direct' (dense multiply)

        Returns:
            The product as a numpy array
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"Vector of shape {x.shape} does not match order {self.n}")
        if method == "direct":
            return self.dense() @ x
        if method == "fft":
            size = 2 * self.n
            return np.fft.irfft(self._circ_fft * np.fft.rfft(x, n=size), n=size)[: self.n]
        raise ValueError(f"Unknown matvec method '{method}'. Use 'fft' or 'direct'")

    def scaled(self, factor):
        return SymToeplitz(factor * self.first_col)

    def norm_1(self):
        """Maximum absolute row sum."""
        magnitudes = np.abs(self.first_col)
        cumulative = np.cumsum(magnitudes)
        rows = np.arange(self.n)
        return float(np.max(cumulative[rows] + cumulative[self.n - 1 - rows] - magnitudes[0]))

    def norm_2(self):
        eigs = scipy.linalg.eigvalsh(self.dense())
        return float(max(abs(eigs[0]), abs(eigs[-1])))

    def to_frame(self):
        return pd.DataFrame({"k": np.arange(self.n), "entry": self.first_col})

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format=SERIES_FLOAT_FORMAT)

    def to_json(self, path=None):
        text = json.dumps({"n": self.n, "first_col": self.first_col.tolist()})
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    def dense_to_csv(self, path):
        if self.n > DENSE_DUMP_MAX_N:
            raise ValueError(f"Dense dump is limited to n <= {DENSE_DUMP_MAX_N}, got {self.n}")
        np.savetxt(path, self.dense(), delimiter=",", fmt=SERIES_FLOAT_FORMAT)


@dataclass(frozen=True)
class LoewnerResult:
    holds: bool
    margin: float
    tol: float

    def __bool__(self):
        return self.holds


def assemble(coeffs):
    """
    Build T_n(f) from the coefficients a_0..a_{n-1} of an even symbol.

    Args:
        coeffs: CoeffVector or sequence of reals

    Returns:
        SymToeplitz of order len(coeffs)
    """
    values = coeffs.coeffs if isinstance(coeffs, CoeffVector) else coeffs
    if len(values) == 0:
        raise ValueError("Cannot assemble a Toeplitz matrix from an empty coefficient vector")
    return SymToeplitz(values)


def _check_same_order(*matrices):
    orders = {T.n for T in matrices}
    if len(orders) > 1:
        raise ValueError(f"Matrix orders differ: {sorted(orders)}")


def linear_combination(terms):
    """
    Coefficient-wise weighted sum of Toeplitz matrices.

    Args:
        terms: Iterable of (weight, SymToeplitz) pairs with positive weights

    Returns:
        SymToeplitz of the common order
    """
    terms = list(terms)
    if not terms:
        raise ValueError("linear_combination needs at least one term")
    _check_same_order(*(T for _, T in terms))
    if any(w <= 0 for w, _ in terms):
        raise ValueError("Weights must be strictly positive")
    return SymToeplitz(sum(w * T.first_col for w, T in terms))


def difference(B, A):
    _check_same_order(A, B)
    return SymToeplitz(B.first_col - A.first_col)


def loewner_leq(A, B, tol=None):
    """
    Test A <= B in the Loewner order, i.e. lambda_min(B - A) >= -tol.

    The default tolerance is LOEWNER_RTOL * ||B - A||_2, so exact-boundary
    cases (A == B, zero symbol gaps) survive roundoff.

    Returns:
        LoewnerResult (truthy when the inequality holds) with the margin lambda_min(B - A)
    """
    gap = difference(B, A)
    eigs = scipy.linalg.eigvalsh(gap.dense())
    margin = float(eigs[0])
    if tol is None:
        tol = LOEWNER_RTOL * float(max(abs(eigs[0]), abs(eigs[-1])))
    holds = margin >= -tol
    if not holds:
        logger.debug(f"Loewner test failed for order {A.n}: margin {margin:.3e}, tol {tol:.3e}")
    return LoewnerResult(bool(holds), margin, float(tol))
