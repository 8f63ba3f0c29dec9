import json
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .config import DEFAULT_TOL, FIT_THRESHOLD, LOEWNER_RTOL
from .errors import ConfigError
from .spectra import extreme_eigs
from .symbols import (
    AggregateSymbol,
    eta_coeffs,
    fourier_coeffs_aggregate,
    combine_power_coeffs,
    power_coeff_matrix,
    power_coeff_table,
    psi_coeffs,
    table_size,
)
from .toeplitz import SymToeplitz, assemble, loewner_leq

logger = logging.getLogger(__name__)

HEURISTIC_MIN_CONSTANT = math.pi * (math.pi - 1.0) / math.log(math.pi)

# loose ranges for the heuristic diagnostics (scaled lambda_min, scaled lambda_max)
HEURISTIC_MIN_RANGE = (5.0, 5.9)
HEURISTIC_MAX_RANGE = (0.99, 1.02)
ETA_FLOOR_BAND = 0.1
QUANTILE_INTERIOR = (0.1, 0.9)

FIT_MODELS = {
    "h": lambda n, v: v * n,
    "h2": lambda n, v: v * n ** 2,
    "n": lambda n, v: v / n,
    "n_over_logn": lambda n, v: v * math.log(n) / n,
    "n2_over_logn": lambda n, v: v * math.log(math.pi * n) / (math.pi * n) ** 2,
}


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


@dataclass(frozen=True, eq=False)
class BoundReport:
    """
    One checked inequality lhs <= rhs, or lhs < rhs when `strict`.

    Loewner checks report lhs = 0 and rhs = lambda_min(B - A). Soft reports
    are diagnostics: they are printed but never fail a run.
    """

    name: str
    lhs: float
    rhs: float
    tol: float
    params: dict = field(default_factory=dict)
    hard: bool = True
    strict: bool = False

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def passed(self):
        # NaN margins (failed computations) never pass
        if self.strict:
            return bool(self.margin > self.tol)
        return bool(self.margin >= -self.tol)

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "hard": self.hard,
            "params": self.params,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), default=_to_builtin)


def failed_report(name, error, params=None):
    """Report standing in for a check that raised instead of returning."""
    params = dict(params or {})
    params["error"] = f"{type(error).__name__}: {error}"
    return BoundReport(name, math.nan, math.nan, 0.0, params)


def _scalar_report(name, lhs, rhs, rtol, params, hard=True):
    tol = rtol * max(abs(lhs), abs(rhs))
    return BoundReport(name, float(lhs), float(rhs), tol, params, hard)


def _loewner_report(name, A, B, rtol, params):
    tol = rtol * max(A.norm_1(), B.norm_1())
    result = loewner_leq(A, B, tol)
    return BoundReport(name, 0.0, result.margin, result.tol, params)


@dataclass(frozen=True, eq=False)
class SandwichConfig:
    """
    Weights c_j in [c_star, c_upper] and factors d_j in [d_star, d_upper], one per row.

    The general sequence uses f_j = d_j g_j, which satisfies
    d_star g_j <= f_j <= d_upper g_j.
    """

    n: int
    c: tuple
    d: tuple
    c_star: float
    c_upper: float
    d_star: float
    d_upper: float
    seed: object = None

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        object.__setattr__(self, "d", tuple(float(x) for x in self.d))
        _check_bounds("c", self.c_star, self.c_upper)
        _check_bounds("d", self.d_star, self.d_upper)
        if self.n < 1 or len(self.c) != self.n or len(self.d) != self.n:
            raise ConfigError(
                f"Sandwich config of order {self.n} needs {self.n} c and d values, "
                f"got {len(self.c)} and {len(self.d)}"
            )
        if not all(self.c_star <= x <= self.c_upper for x in self.c):
            raise ConfigError(f"c values leave [{self.c_star}, {self.c_upper}]")
        if not all(self.d_star <= x <= self.d_upper for x in self.d):
            raise ConfigError(f"d values leave [{self.d_star}, {self.d_upper}]")

    @classmethod
    def random(cls, n, seed, c_bounds, d_bounds):
        """Uniform draws in the given bounds from a seeded generator."""
        _check_bounds("c", *c_bounds)
        _check_bounds("d", *d_bounds)
        rng = np.random.default_rng(seed)
        c = rng.uniform(c_bounds[0], c_bounds[1], size=n)
        d = rng.uniform(d_bounds[0], d_bounds[1], size=n)
        return cls(n, c, d, c_bounds[0], c_bounds[1], d_bounds[0], d_bounds[1], seed)

    @classmethod
    def uniform(cls, n, c=1.0, d=1.0):
        return cls(n, [c] * n, [d] * n, c, c, d, d)


def _check_order(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"Matrix order must be a positive integer, got {n!r}")
    return int(n)


def _check_bounds(label, lower, upper):
    if not (lower > 0 and upper > 0):
        raise ConfigError(f"{label} bounds must be positive, got ({lower}, {upper})")
    if lower > upper:
        raise ConfigError(f"{label} lower bound {lower} exceeds upper bound {upper}")


def lemma_rnj_check(n, alpha, tol=LOEWNER_RTOL):
    """
    Remainder bounds for one exponent.

    R = T_n(psi_{n,alpha}) must satisfy
    ||R||_2 <= alpha h^2 / (3 pi (3 - alpha)) and h^alpha T_n(g) <= T_n(eta) + R.

    Args:
        n: Matrix order
        alpha: Exponent deficit in [0, 1]
        tol: Relative tolerance of the Loewner test

    Returns:
        Tuple of two BoundReports (norm bound, Loewner bound)
    """
    n = _check_order(n)
    h = 1.0 / n
    params = {"n": n, "alpha": alpha}
    R = assemble(psi_coeffs(n, alpha))
    norm_bound = alpha * h ** 2 / (3.0 * math.pi * (3.0 - alpha))
    norm_report = BoundReport("rnj.norm", R.norm_2(), norm_bound, 1e-12, params)

    table, _ = power_coeff_table(float(alpha), table_size(n), DEFAULT_TOL)
    A = SymToeplitz(h ** alpha * table[:n])
    B = SymToeplitz(assemble(eta_coeffs(n)).first_col + R.first_col)
    loewner = _loewner_report("rnj.loewner", A, B, tol, params)
    return norm_report, loewner


def _interval_reports(prefix, inner, outer, lower, upper, rtol, params):
    """Scalar consequences lower*inner <= outer <= upper*inner of a matrix sandwich."""
    in_min, in_max = inner
    out_min, out_max = outer
    return [
        _scalar_report(f"{prefix}.lambda_min.lower", lower * in_min, out_min, rtol, params),
        _scalar_report(f"{prefix}.lambda_min.upper", out_min, upper * in_min, rtol, params),
        _scalar_report(f"{prefix}.lambda_max.lower", lower * in_max, out_max, rtol, params),
        _scalar_report(f"{prefix}.lambda_max.upper", out_max, upper * in_max, rtol, params),
        _scalar_report(f"{prefix}.mu2.lower", lower / upper * in_max / in_min, out_max / out_min, rtol, params),
        _scalar_report(f"{prefix}.mu2.upper", out_max / out_min, upper / lower * in_max / in_min, rtol, params),
    ]


def sandwich_check(cfg, tol=LOEWNER_RTOL):
    """
    Both reduction sandwiches for one configuration.

    c_star T_hat <= T_tilde <= c_upper T_hat and
    d_star T_tilde <= T_general <= d_upper T_tilde, each with the induced
    two-sided bounds on lambda_min, lambda_max and mu2.

    Returns:
        List of 16 BoundReports
    """
    start_time = time.time()
    n = cfg.n
    canonical = AggregateSymbol.canonical(n)
    weighted = AggregateSymbol.weighted(cfg.c)
    general = AggregateSymbol.general(cfg.c, cfg.d)

    # one coefficient table shared by the three matrices
    coeff_tol = DEFAULT_TOL / max(general.total_weight, weighted.total_weight, canonical.total_weight)
    table, _ = power_coeff_matrix(canonical.exponents, n, coeff_tol)
    T_hat, T_tilde, T_general = (
        SymToeplitz(np.asarray(sym.weights) @ table) for sym in (canonical, weighted, general)
    )
    eigs = {name: extreme_eigs(T) for name, T in (("hat", T_hat), ("tilde", T_tilde), ("general", T_general))}

    params = {"n": n, "seed": cfg.seed, "c_bounds": [cfg.c_star, cfg.c_upper], "d_bounds": [cfg.d_star, cfg.d_upper]}
    reports = [
        _loewner_report("reduction.loewner.lower", T_hat.scaled(cfg.c_star), T_tilde, tol, params),
        _loewner_report("reduction.loewner.upper", T_tilde, T_hat.scaled(cfg.c_upper), tol, params),
        _loewner_report("general.loewner.lower", T_tilde.scaled(cfg.d_star), T_general, tol, params),
        _loewner_report("general.loewner.upper", T_general, T_tilde.scaled(cfg.d_upper), tol, params),
    ]
    reports += _interval_reports("reduction", eigs["hat"], eigs["tilde"], cfg.c_star, cfg.c_upper, tol, params)
    reports += _interval_reports("general", eigs["tilde"], eigs["general"], cfg.d_star, cfg.d_upper, tol, params)

    elapsed = (time.time() - start_time) * 1000
    logger.info(f"Sandwich check n={n} seed={cfg.seed} in {elapsed:.1f}ms")
    return reports


def mnq_bound_check(n, q, alphas, tol=LOEWNER_RTOL):
    """
    Upper bounds on lambda_min(M_{n,q}), M_{n,q} = (1/q) sum_j h^alpha_j T_n(|theta|^(2-alpha_j)).

    Reports the stated bound lambda_0 + (h^2/(pi q)) sum alpha_j/(alpha_j+1) and
    the sharper one the remainder norms give, lambda_0 + (1/q) sum ||R_{n,j}||_2
    bounds. When q = n and alpha_j = j h, M_{n,q} = h T_n(F_hat_n) and the
    final order-n bound is reported as well.

    Args:
        n: Matrix order
        q: Number of terms
        alphas: q exponent deficits in [0, 1]
        tol: Relative tolerance of the scalar comparisons

    Returns:
        List of BoundReports
    """
    n = _check_order(n)
    if q < 1 or len(alphas) != q:
        raise ValueError(f"Need q >= 1 exponents, got q={q} and {len(alphas)} values")
    h = 1.0 / n
    alphas = [float(a) for a in alphas]
    weights = [h ** a / q for a in alphas]
    vector = combine_power_coeffs(weights, alphas, n, DEFAULT_TOL)
    M = assemble(vector)
    eta = assemble(eta_coeffs(n))

    lambda_m = extreme_eigs(M)[0]
    lambda_0 = extreme_eigs(eta)[0]
    # coefficient errors move eigenvalues by at most ||dM||_1
    abs_slack = (2 * n - 1) * vector.abs_tol

    remainders = [a * h ** 2 / (3.0 * math.pi * (3.0 - a)) for a in alphas]
    params = {
        "n": n,
        "q": q,
        "lambda_0": lambda_0,
        "lambda_min_over_h2": lambda_m / h ** 2,
        "dangling_max_rhs": lambda_0 + max(remainders),
    }
    stated = lambda_0 + h ** 2 / (math.pi * q) * math.fsum(a / (a + 1.0) for a in alphas)
    chain = lambda_0 + math.fsum(remainders) / q

    def report(name, rhs):
        return BoundReport(name, lambda_m, rhs, tol * max(abs(lambda_m), abs(rhs)) + abs_slack, params)

    reports = [report("mnq.stated", stated), report("mnq.chain", chain)]
    if q == n and all(math.isclose(a, j * h, rel_tol=0.0, abs_tol=1e-15) for j, a in enumerate(alphas)):
        final = lambda_0 + h ** 3 / math.pi * math.fsum(j * h / (j * h + 1.0) for j in range(n))
        reports.append(report("mnq.final", final))
    return reports


def quantile_prediction(q, x):
    """
    Q_q(x) = F_hat_q(pi x) in closed form.

    The q-term sum is geometric in (q theta)^(-1/q); with L = log(q theta) it
    equals theta^2 * expm1(-L) / expm1(-L/q), and q theta^2 at L = 0.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    theta = math.pi * x
    L = math.log(q * theta)
    if L == 0.0:
        return q * theta ** 2
    return theta ** 2 * math.expm1(-L) / math.expm1(-L / q)


def quantile_asymptotic(q, x):
    """Large-q form pi x (pi x q - 1) / log(pi x q); pi x at the removable point."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    theta = math.pi * x
    L = math.log(q * theta)
    if L == 0.0:
        return theta
    return theta * (q * theta - 1.0) / L


def predicted_spectrum(q, n):
    return np.array([quantile_prediction(q, i / (n + 1)) for i in range(1, n + 1)])


def quantile_spectrum_gap(spectrum, q):
    """Max relative deviation of a sorted spectrum from its quantile prediction, interior indices only."""
    spectrum = np.asarray(spectrum, dtype=float)
    n = len(spectrum)
    predicted = predicted_spectrum(q, n)
    x = np.arange(1, n + 1) / (n + 1)
    interior = (x >= QUANTILE_INTERIOR[0]) & (x <= QUANTILE_INTERIOR[1])
    if not interior.any():
        raise ValueError(f"Spectrum of length {n} has no interior points")
    return float(np.max(np.abs(spectrum[interior] - predicted[interior]) / predicted[interior]))


def heuristic_extremes(n):
    if n < 2:
        raise ValueError(f"Heuristic needs n >= 2, got {n}")
    return HEURISTIC_MIN_CONSTANT / n, math.pi ** 2 * n / math.log(math.pi * n)


def _range_report(name, value, bounds, params):
    lower, upper = bounds
    centre, half_width = (lower + upper) / 2.0, (upper - lower) / 2.0
    params = dict(params, value=value, range=[lower, upper])
    return BoundReport(name, abs(value - centre), half_width, 0.0, params, hard=False)


def heuristic_check(report):
    """
    Soft comparison of a measured SpectrumReport with the heuristic extremes.

    n lambda_min is set against the constant pi(pi-1)/log(pi) and
    lambda_max log(pi n)/(pi^2 n) against 1; both must sit in loose ranges.
    """
    n = report.n
    predicted_min, predicted_max = heuristic_extremes(n)
    scaled_min = n * report.lambda_min
    scaled_max = report.lambda_max / predicted_max
    params = {
        "n": n,
        "constant": HEURISTIC_MIN_CONSTANT,
        "relative_gap_min": abs(scaled_min - HEURISTIC_MIN_CONSTANT) / HEURISTIC_MIN_CONSTANT,
        "predicted_max": predicted_max,
    }
    reports = [
        _range_report("heuristic.lambda_min", scaled_min, HEURISTIC_MIN_RANGE, params),
        _range_report("heuristic.lambda_max", scaled_max, HEURISTIC_MAX_RANGE, params),
    ]
    for r in reports:
        if not r.passed:
            logger.warning(f"{r.name} at n={n}: {r.params['value']:.4f} outside {r.params['range']}")
    return reports


@dataclass(frozen=True)
class FitReport:
    model: str
    n: tuple
    scaled: tuple
    deviation: float
    threshold: float

    @property
    def flat(self):
        return self.deviation <= self.threshold

    def to_dict(self):
        return {
            "model": self.model,
            "n": list(self.n),
            "scaled": list(self.scaled),
            "deviation": self.deviation,
            "threshold": self.threshold,
            "flat": self.flat,
        }


def asymptotic_fit(series, model, threshold=FIT_THRESHOLD):
    """
    Flatness of a scaled series under a growth model.

    Args:
        series: Iterable of (n, value) pairs, n doubling from point to point
        model: One of 'h', 'h2', 'n', 'n_over_logn', 'n2_over_logn'
        threshold: Largest accepted relative change between consecutive scaled values

    Returns:
        FitReport
    """
    if model not in FIT_MODELS:
        raise ValueError(f"Unknown model '{model}'. Use one of {sorted(FIT_MODELS)}")
    points = sorted((int(n), float(v)) for n, v in series)
    if len(points) < 3:
        raise ValueError(f"Asymptotic fit needs at least 3 points, got {len(points)}")
    ns = [n for n, _ in points]
    if any(b != 2 * a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"Orders must double from point to point, got {ns}")

    scale = FIT_MODELS[model]
    scaled = [scale(n, v) for n, v in points]
    deviation = max(abs(b / a - 1.0) for a, b in zip(scaled, scaled[1:]))
    return FitReport(model, tuple(ns), tuple(scaled), deviation, threshold)


def eta_floor_scaling(n_list):
    """lambda_min(T_n(theta^2)) n^2 per order; consecutive ratios must stay within 10% of 1."""
    n_list = sorted(n_list)
    if len(n_list) < 2:
        raise ValueError("eta floor scaling needs at least two orders")
    scaled = [extreme_eigs(assemble(eta_coeffs(n)))[0] * n ** 2 for n in n_list]
    ratios = [b / a for a, b in zip(scaled, scaled[1:])]
    spread = max(abs(r - 1.0) for r in ratios)
    params = {"n": n_list, "scaled": scaled, "ratios": ratios}
    return BoundReport("eta.floor", spread, ETA_FLOOR_BAND, 0.0, params)


def positivity_check(sym, engine="quadrature", tol=DEFAULT_TOL):
    """lambda_min(T_n(F)) > 0 for a nonnegative, not identically zero aggregate symbol F."""
    T = assemble(fourier_coeffs_aggregate(sym, engine, tol))
    lambda_min = extreme_eigs(T)[0]
    return BoundReport("lpo.positivity", 0.0, lambda_min, 0.0, {"n": sym.n, "engine": engine}, strict=True)


def monotonicity_check(F, G, grid=1024, rtol=LOEWNER_RTOL):
    """
    T_n(G) <= T_n(F) for aggregate symbols with G <= F.

    Raises:
        ValueError: If G exceeds F somewhere on the sampling grid
    """
    if F.n != G.n:
        raise ValueError(f"Symbol orders differ: {F.n} vs {G.n}")
    theta = np.linspace(0.0, math.pi, grid)
    if np.any(G(theta) > F(theta)):
        raise ValueError("G exceeds F on the grid, monotonicity does not apply")
    alphas = F.exponents
    if tuple(G.exponents) != tuple(alphas):
        raise ValueError("Monotonicity check needs symbols on the same exponent grid")

    coeff_tol = DEFAULT_TOL / max(F.total_weight, G.total_weight)
    table, _ = power_coeff_matrix(alphas, F.n, coeff_tol)
    T_F = SymToeplitz(np.asarray(F.weights) @ table)
    T_G = SymToeplitz(np.asarray(G.weights) @ table)
    return _loewner_report("lpo.monotonicity", T_G, T_F, rtol, {"n": F.n})


def summarize(reports):
    """One row per report: name, params, lhs, rhs, margin, tol, passed, hard."""
    rows = [
        {
            "name": r.name,
            "params": json.dumps(r.params, default=_to_builtin, sort_keys=True),
            "lhs": r.lhs,
            "rhs": r.rhs,
            "margin": r.margin,
            "tol": r.tol,
            "passed": r.passed,
            "hard": r.hard,
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=["name", "params", "lhs", "rhs", "margin", "tol", "passed", "hard"])


def reports_to_jsonl(reports):
    return "\n".join(r.to_json() for r in reports) + ("\n" if reports else "")


def hard_failures(reports):
    return [r for r in reports if r.hard and not r.passed]
