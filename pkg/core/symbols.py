"""
Symbols of the distributed-order family and their Fourier coefficients.

Every symbol handled here is real and even on [-pi, pi], so its k-th Fourier
coefficient reduces to (1/pi) * int_0^pi f(theta) cos(k theta) dtheta and the
Toeplitz matrices it generates are real symmetric.
"""
import json
import logging
import math
import operator
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy import integrate

from .config import (
    DEFAULT_OVERSAMPLE,
    DEFAULT_TOL,
    GAUSS_ORDERS,
    GRADING_LEVELS,
    GRADING_RATIO,
    MAX_QUAD_REFINEMENTS,
    MIN_OVERSAMPLE,
    PSI_QUAD_LIMIT,
    PSI_TOL,
    SERIES_FLOAT_FORMAT,
)
from .errors import AccuracyError

logger = logging.getLogger(__name__)

# CoeffVector.engine tags
QUADRATURE = "quadrature"
FFT_SAMPLING = "fft-sampling"
CLOSED_FORM = "closed-form"

# CLI engine names -> CoeffVector tags
ENGINE_TAGS = {"quadrature": QUADRATURE, "fft": FFT_SAMPLING}

IMAG_TOL = 1e-13


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def _check_order(n):
    n = operator.index(n)
    if n < 1:
        raise ValueError(f"Matrix order must be a positive integer, got {n}")
    return n


def _check_index(k):
    k = operator.index(k)
    if k < 0:
        raise ValueError(f"Coefficient index must be >= 0 (symbols are even, use |k|), got {k}")
    return k


@dataclass(frozen=True)
class PowerSymbol:
    """g(theta) = |theta|^(2 - alpha)."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    @property
    def exponent(self):
        return 2.0 - self.alpha

    def __call__(self, theta):
        return np.abs(np.asarray(theta, dtype=float)) ** self.exponent


@dataclass(frozen=True)
class AggregateSymbol:
    """
    F(theta) = sum_j w_j |theta|^(2 - alpha_j), one term per matrix row.

    The factories build the three symbols of the reduction chain:
    canonical (w_j = h^(jh)), weighted (w_j = c_j h^(jh)) and general
    (w_j = c_j d_j h^(jh), i.e. f_j = d_j g_j).
    """

    n: int
    weights: tuple
    exponents: tuple

    def __post_init__(self):
        _check_order(self.n)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "exponents", tuple(float(a) for a in self.exponents))
        if len(self.weights) != self.n or len(self.exponents) != self.n:
            raise ValueError(
                f"Aggregate of order {self.n} needs {self.n} weights and exponents, "
                f"got {len(self.weights)} and {len(self.exponents)}"
            )
        if any(w <= 0 for w in self.weights):
            raise ValueError("Aggregate weights must be strictly positive")
        for a in self.exponents:
            _check_alpha(a)

    @staticmethod
    def _grid(n):
        h = 1.0 / n
        alphas = [j * h for j in range(n)]
        return alphas, [h ** a for a in alphas]

    @classmethod
    def canonical(cls, n):
        n = _check_order(n)
        alphas, base = cls._grid(n)
        return cls(n, base, alphas)

    @classmethod
    def weighted(cls, c):
        n = _check_order(len(c))
        alphas, base = cls._grid(n)
        return cls(n, [cj * b for cj, b in zip(c, base)], alphas)

    @classmethod
    def general(cls, c, d):
        if len(c) != len(d):
            raise ValueError(f"c and d lengths differ ({len(c)} vs {len(d)})")
        n = _check_order(len(c))
        alphas, base = cls._grid(n)
        return cls(n, [cj * dj * b for cj, dj, b in zip(c, d, base)], alphas)

    @property
    def total_weight(self):
        return math.fsum(self.weights)

    def __call__(self, theta):
        theta = np.abs(np.asarray(theta, dtype=float))
        out = np.zeros_like(theta)
        for w, a in zip(self.weights, self.exponents):
            out += w * theta ** (2.0 - a)
        return out


@dataclass(frozen=True)
class CutoffSymbol:
    """psi(theta) = 1_[-h,h](theta) * (|theta|^(2-alpha) h^alpha - theta^2), h = 1/n."""

    n: int
    alpha: float

    def __post_init__(self):
        _check_order(self.n)
        _check_alpha(self.alpha)

    @property
    def h(self):
        return 1.0 / self.n

    def __call__(self, theta):
        theta = np.abs(np.asarray(theta, dtype=float))
        inside = theta <= self.h
        values = theta ** (2.0 - self.alpha) * self.h ** self.alpha - theta ** 2
        return np.where(inside, values, 0.0)


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """First n Fourier coefficients a_0..a_{n-1} of an even real symbol."""

    coeffs: np.ndarray
    engine: str
    abs_tol: float

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 1:
            raise ValueError(f"Coefficients must be a 1-D vector, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "abs_tol", float(self.abs_tol))

    def __len__(self):
        return len(self.coeffs)

    def to_frame(self):
        return pd.DataFrame({"k": np.arange(len(self.coeffs)), "coeff": self.coeffs})

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format=SERIES_FLOAT_FORMAT)

    def to_dict(self):
        return {
            "coeffs": self.coeffs.tolist(),
            "engine": self.engine,
            "abs_tol": self.abs_tol,
        }

    def to_json(self, path=None):
        text = json.dumps(self.to_dict())
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(np.asarray(data["coeffs"], dtype=float), data["engine"], data["abs_tol"])


def fourier_coeff_eta(k):
    """
    Exact k-th Fourier coefficient of eta(theta) = theta^2.

    Args:
        k: Non-negative integer index

    Returns:
        pi^2/3 for k = 0, otherwise 2 cos(pi k)/k^2 (the sin(pi k) term vanishes)
    """
    k = _check_index(k)
    if k == 0:
        return math.pi ** 2 / 3.0
    return 2.0 * (-1) ** k / k ** 2


def eta_coeffs(n):
    n = _check_order(n)
    return CoeffVector([fourier_coeff_eta(k) for k in range(n)], CLOSED_FORM, 0.0)


def power_coeff_zero(alpha):
    """a_0(|theta|^(2-alpha)) = pi^(2-alpha)/(3-alpha)."""
    _check_alpha(alpha)
    return math.pi ** (2.0 - alpha) / (3.0 - alpha)


@lru_cache(maxsize=None)
def _gauss_rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=32)
def _panel_layout(size, panels, order):
    """
    Quadrature nodes for [0, pi] split into `panels` equal pieces.

    Each piece is no longer than half a period of cos(k theta) for k < size.
    The piece touching theta = 0 is graded geometrically towards the
    algebraic endpoint and summed directly; the remaining pieces share the
    same reference nodes, so their cosine sums for all k at once are one
    real FFT per Gauss node.
    """
    x, w = _gauss_rule(order)
    width = math.pi / panels
    ks = np.arange(size)

    edges = np.concatenate(([0.0], width * GRADING_RATIO ** np.arange(GRADING_LEVELS, -1, -1)))
    lo, hi = edges[:-1], edges[1:]
    head_nodes = (lo[:, None] + (hi - lo)[:, None] * x).ravel()
    head_weights = ((hi - lo)[:, None] * w).ravel()
    head_cos = np.cos(np.outer(ks, head_nodes))

    tail_nodes = (np.arange(panels)[None, :] + x[:, None]) * width
    tail_weights = w * width
    shift = np.outer(x, ks) * width
    return head_nodes, head_weights, head_cos, tail_nodes, tail_weights, np.cos(shift), np.sin(shift)


def _power_coeffs_once(exponent, size, panels, order):
    head_nodes, head_weights, head_cos, tail_nodes, tail_weights, cos_shift, sin_shift = (
        _panel_layout(size, panels, order)
    )
    head = head_cos @ (head_weights * head_nodes ** exponent)

    samples = tail_weights[:, None] * tail_nodes ** exponent
    samples[:, 0] = 0.0  # first piece is covered by the graded head
    spectrum = np.fft.rfft(samples, n=2 * panels, axis=1)[:, :size]
    tail = np.sum(cos_shift * spectrum.real + sin_shift * spectrum.imag, axis=0)
    return (head + tail) / math.pi


def table_size(count):
    """Cached table length covering `count` coefficients (power of two, at least 8)."""
    return max(8, 1 << (count - 1).bit_length())


@lru_cache(maxsize=8192)
def power_coeff_table(alpha, size, tol=DEFAULT_TOL):
    """
    Coefficients a_0..a_{size-1} of |theta|^(2-alpha) by oscillation-partitioned quadrature.

    Two Gauss-Legendre orders are run on the same partition; their largest
    gap is the error estimate. The partition is halved until the estimate
    meets `tol` or the refinement budget runs out.

    Args:
        alpha: Exponent deficit in [0, 1]
        size: Number of coefficients
        tol: Absolute accuracy per coefficient

    Returns:
        Tuple of (read-only coefficient array, achieved estimate)

    Raises:
        AccuracyError: If the estimate stays above `tol`
    """
    _check_alpha(alpha)
    size = _check_order(size)
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")

    exponent = 2.0 - alpha
    panels = 2 * size
    low, high = GAUSS_ORDERS
    estimate = math.inf
    for _ in range(MAX_QUAD_REFINEMENTS + 1):
        coarse = _power_coeffs_once(exponent, size, panels, low)
        fine = _power_coeffs_once(exponent, size, panels, high)
        estimate = float(np.max(np.abs(fine - coarse)))
        if estimate <= tol:
            fine.setflags(write=False)
            return fine, estimate
        logger.debug(f"alpha={alpha}: estimate {estimate:.2e} > {tol:.2e} with {panels} panels, refining")
        panels *= 2

    logger.error(f"Quadrature for alpha={alpha}, size={size} did not reach tol={tol:.2e}")
    raise AccuracyError(f"Coefficients of |theta|^{exponent:g} not converged", estimate, tol)


def sample_coeffs(symbol, size, oversample=DEFAULT_OVERSAMPLE):
    """
    Coefficients by discrete Fourier analysis of M = oversample * size samples.

    The aliasing error is estimated from the same samples taken on the
    half-resolution grid; for kinks and cusps of the symbols in this family
    the coarse error is at least four times the fine one, so the gap bounds
    the error of the returned values.
    """
    size = _check_order(size)
    if oversample < MIN_OVERSAMPLE:
        raise ValueError(
            f"Sampling grid too small: oversample={oversample} (need >= {MIN_OVERSAMPLE})"
        )
    m = oversample * size
    m += m % 2
    theta = 2.0 * math.pi * np.arange(m) / m
    values = symbol(np.minimum(theta, 2.0 * math.pi - theta))

    fine = np.fft.fft(values)[:size] / m
    coarse = np.fft.fft(values[::2])[:size] / (m // 2)

    imag = float(np.max(np.abs(fine.imag)))
    if imag > IMAG_TOL * max(1.0, abs(fine[0].real)):
        logger.warning(f"Sampled coefficients carry imaginary parts up to {imag:.2e}")

    coeffs = fine.real
    estimate = float(np.max(np.abs(coeffs - coarse.real)))
    return CoeffVector(coeffs, FFT_SAMPLING, estimate)


def fourier_coeff_power(alpha, k, engine="quadrature", tol=DEFAULT_TOL, oversample=DEFAULT_OVERSAMPLE):
    """
    k-th Fourier coefficient of g(theta) = |theta|^(2-alpha).

    Args:
        alpha: Exponent deficit in [0, 1]
        k: Non-negative integer index
        engine: 'quadrature' (reference) or 'fft' (sampling)
        tol: Requested absolute accuracy
        oversample: Grid factor for the 'fft' engine

    Returns:
        The coefficient as a float
    """
    _check_alpha(alpha)
    k = _check_index(k)
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")

    if engine == "quadrature":
        table, _ = power_coeff_table(float(alpha), table_size(k + 1), tol)
        return float(table[k])
    if engine == "fft":
        vector = sample_coeffs(PowerSymbol(alpha), k + 1, oversample)
        if vector.abs_tol > tol:
            raise AccuracyError(f"Sampled coefficient a_{k} above tolerance", vector.abs_tol, tol)
        return float(vector.coeffs[k])
    raise ValueError(f"Unknown engine '{engine}'. Use 'quadrature' or 'fft'")


def power_coeffs(alpha, n, engine="quadrature", tol=DEFAULT_TOL, oversample=DEFAULT_OVERSAMPLE):
    """First n coefficients of |theta|^(2-alpha) as a CoeffVector."""
    _check_alpha(alpha)
    n = _check_order(n)
    if engine == "quadrature":
        table, estimate = power_coeff_table(float(alpha), table_size(n), tol)
        return CoeffVector(table[:n], QUADRATURE, estimate)
    if engine == "fft":
        return sample_coeffs(PowerSymbol(alpha), n, oversample)
    raise ValueError(f"Unknown engine '{engine}'. Use 'quadrature' or 'fft'")


def power_coeff_matrix(alphas, size, tol):
    """
    Per-term coefficient table, one row per exponent.

    Returns:
        Tuple of (len(alphas) x size array, per-row error estimates)
    """
    table = np.empty((len(alphas), size))
    estimates = np.empty(len(alphas))
    padded = table_size(size)
    for j, alpha in enumerate(alphas):
        row, estimate = power_coeff_table(float(alpha), padded, tol)
        table[j] = row[:size]
        estimates[j] = estimate
    return table, estimates


def combine_power_coeffs(weights, alphas, size, tol=DEFAULT_TOL):
    """
    Coefficients of sum_j w_j |theta|^(2-alpha_j), each term at tol / sum(w).

    Args:
        weights: Positive weights w_j
        alphas: Exponent deficits alpha_j
        size: Number of coefficients
        tol: Absolute accuracy of the sum

    Returns:
        CoeffVector tagged 'quadrature'
    """
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(alphas):
        raise ValueError(f"{len(weights)} weights for {len(alphas)} exponents")
    if np.any(weights <= 0):
        raise ValueError("Weights must be strictly positive")
    table, estimates = power_coeff_matrix(alphas, size, tol / math.fsum(weights))
    return CoeffVector(weights @ table, QUADRATURE, float(weights @ estimates))


def fourier_coeffs_aggregate(sym, engine="quadrature", tol=DEFAULT_TOL, oversample=DEFAULT_OVERSAMPLE):
    """
    First sym.n Fourier coefficients of an aggregate symbol.

    Args:
        sym: AggregateSymbol
        engine: 'quadrature' (term by term, linearity) or 'fft' (pointwise sampling)
        tol: Absolute accuracy for the quadrature engine
        oversample: Grid factor for the 'fft' engine

    Returns:
        CoeffVector of length sym.n
    """
    start_time = time.time()
    if engine == "quadrature":
        vector = combine_power_coeffs(sym.weights, sym.exponents, sym.n, tol)
    elif engine == "fft":
        vector = sample_coeffs(sym, sym.n, oversample)
    else:
        raise ValueError(f"Unknown engine '{engine}'. Use 'quadrature' or 'fft'")

    elapsed = (time.time() - start_time) * 1000
    logger.info(f"Coefficients of order-{sym.n} aggregate via {engine} in {elapsed:.1f}ms (abs_tol {vector.abs_tol:.1e})")
    return vector


def psi_coeff(n, alpha, k, tol=PSI_TOL):
    """
    k-th Fourier coefficient of the cutoff remainder psi_{n,alpha}.

    With theta = h u the integral becomes
    (h^3/pi) * int_0^1 u^(2-alpha) (1 - u^alpha) cos(k h u) du,
    whose integrand is nonnegative times a cosine with k h oscillation.
    """
    n = _check_order(n)
    _check_alpha(alpha)
    k = _check_index(k)
    if alpha == 0:
        return 0.0

    h = 1.0 / n
    omega = k * h
    scale = h ** 3 / math.pi

    def integrand(u):
        if u <= 0.0:
            return 0.0
        return -(u ** (2.0 - alpha)) * math.expm1(alpha * math.log(u)) * math.cos(omega * u)

    points = None
    if omega > 1.0:
        zeros = [(i + 0.5) * math.pi / omega for i in range(int(omega / math.pi + 0.5) + 1)]
        points = [z for z in zeros if 0.0 < z < 1.0] or None

    result = integrate.quad(
        integrand, 0.0, 1.0,
        epsabs=tol / scale, epsrel=1e-12, limit=PSI_QUAD_LIMIT,
        points=points, full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3:
        logger.error(f"psi coefficient n={n}, alpha={alpha}, k={k}: {result[3]}")
        raise AccuracyError(f"psi coefficient a_{k} not converged", scale * abserr, tol)
    return scale * value


def psi_coeffs(n, alpha, tol=PSI_TOL):
    n = _check_order(n)
    coeffs = [psi_coeff(n, alpha, k, tol) for k in range(n)]
    return CoeffVector(coeffs, QUADRATURE, tol)


def eval_aggregate(sym, theta):
    """
    Pointwise value of an aggregate symbol.

    Args:
        sym: AggregateSymbol
        theta: Scalar or array with |theta| <= pi

    Returns:
        float for scalar input, array otherwise
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > math.pi):
        raise ValueError("theta must lie in [-pi, pi]")
    values = sym(theta)
    return float(values) if values.ndim == 0 else values
