import logging
import math
from functools import partial

import numpy as np

from core.analysis import (
    BoundReport,
    SandwichConfig,
    asymptotic_fit,
    eta_floor_scaling,
    failed_report,
    hard_failures,
    heuristic_check,
    lemma_rnj_check,
    mnq_bound_check,
    monotonicity_check,
    positivity_check,
    quantile_prediction,
    reports_to_jsonl,
    sandwich_check,
    summarize,
)
from core.config import (
    LEMMA_ALPHA_GRID,
    LEMMA_N_GRID,
    MNQ_N_GRID,
    SANDWICH_N_GRID,
    SERIES_FLOAT_FORMAT,
)
from core.spectra import condition_report
from core.symbols import AggregateSymbol, eval_aggregate
from cli.components import canonical_matrix, map_ordered, output_path, print_table

logger = logging.getLogger(__name__)

QUANTILE_ORDERS = (1, 64, 1024)
QUANTILE_POINTS = (0.1, 0.25, 0.5, 0.9)
QUANTILE_RTOL = 1e-10


def _run_task(task):
    name, check, params = task
    try:
        result = check()
    except Exception as e:
        logger.error(f"Check {name} {params} raised: {e}")
        return [failed_report(name, e, params)]
    return list(result) if isinstance(result, (list, tuple)) else [result]


def quantile_closed_form_check(q, x):
    closed = quantile_prediction(q, x)
    direct = eval_aggregate(AggregateSymbol.canonical(q), math.pi * x)
    return BoundReport("quantile.closed_form", abs(closed - direct), QUANTILE_RTOL * abs(direct), 0.0, {"q": q, "x": x})


def _random_sandwich(n, seed, cfg):
    return sandwich_check(SandwichConfig.random(n, seed, cfg.c_bounds, cfg.d_bounds))


def _uniform_sandwich(n):
    return sandwich_check(SandwichConfig.uniform(n))


def _monotonicity(n, seed, cfg):
    c = np.random.default_rng(seed).uniform(cfg.c_bounds[0], cfg.c_bounds[1], size=n)
    return monotonicity_check(AggregateSymbol.weighted(c), AggregateSymbol.weighted([cfg.c_bounds[0]] * n))


def build_tasks(cfg):
    """Every independent check as (name, callable, params)."""
    tasks = [
        ("rnj", partial(lemma_rnj_check, n, alpha), {"n": n, "alpha": alpha})
        for n in LEMMA_N_GRID
        for alpha in LEMMA_ALPHA_GRID
    ]
    seeds = range(cfg.seed, cfg.seed + cfg.seeds)
    tasks += [
        ("sandwich", partial(_random_sandwich, n, seed, cfg), {"n": n, "seed": seed})
        for seed in seeds
        for n in SANDWICH_N_GRID
    ]
    tasks += [
        ("sandwich", partial(_uniform_sandwich, n), {"n": n, "seed": None})
        for n in SANDWICH_N_GRID[:1]
    ]
    tasks += [
        ("mnq", partial(mnq_bound_check, n, n, [j / n for j in range(n)]), {"n": n, "q": n})
        for n in MNQ_N_GRID
    ]
    tasks.append(("eta.floor", partial(eta_floor_scaling, MNQ_N_GRID), {"n": list(MNQ_N_GRID)}))
    tasks += [
        ("lpo.positivity", partial(positivity_check, AggregateSymbol.canonical(n)), {"n": n})
        for n in SANDWICH_N_GRID
    ]
    tasks += [
        ("lpo.monotonicity", partial(_monotonicity, n, cfg.seed, cfg), {"n": n, "seed": cfg.seed})
        for n in SANDWICH_N_GRID
    ]
    tasks += [
        ("quantile.closed_form", partial(quantile_closed_form_check, q, x), {"q": q, "x": x})
        for q in QUANTILE_ORDERS
        for x in QUANTILE_POINTS
    ]
    return tasks


def diagnostic_reports(cfg):
    """Soft heuristic and growth-rate diagnostics on the table orders."""
    spectra = list(map_ordered(lambda n: condition_report(canonical_matrix(n, cfg)), cfg.n_list))
    reports = []
    for report in spectra:
        if report.n >= 2:
            reports += heuristic_check(report)

    ns = sorted(r.n for r in spectra)
    if len(ns) >= 3 and all(b == 2 * a for a, b in zip(ns, ns[1:])):
        fit = asymptotic_fit([(r.n, r.mu2) for r in spectra], "n2_over_logn")
        reports.append(BoundReport("fit.mu2", fit.deviation, fit.threshold, 0.0, fit.to_dict(), hard=False))
    return reports


def run_checks(cfg):
    """
    Run every bound check and diagnostic, write the summary and print it.

    Returns:
        Exit code: 1 if any hard bound fails, 0 otherwise
    """
    reports = []
    for batch in map_ordered(_run_task, build_tasks(cfg)):
        reports += batch
    reports += _run_task(("diagnostics", partial(diagnostic_reports, cfg), {}))

    path = output_path(cfg, "checks")
    path.parent.mkdir(parents=True, exist_ok=True)
    summary = summarize(reports)
    if cfg.format == "csv":
        summary.to_csv(path, index=False, float_format=SERIES_FLOAT_FORMAT)
    else:
        path.write_text(reports_to_jsonl(reports), encoding="utf-8")
    logger.info(f"Wrote {path}")

    summary["group"] = summary["name"].str.split(".").str[0]
    counts = (
        summary.groupby(["group", "hard"])
        .agg(checks=("passed", "size"), passed=("passed", "sum"), worst_margin=("margin", "min"))
        .reset_index()
    )
    print_table(counts, "Bound checks")

    failures = hard_failures(reports)
    for r in failures:
        print(f"FAILED {r.name} {r.params}: lhs {r.lhs:.6g} rhs {r.rhs:.6g} margin {r.margin:.3e}")
    soft = [r for r in reports if not r.hard and not r.passed]
    for r in soft:
        logger.warning(f"Diagnostic {r.name} outside its range: {r.params}")
    print(f"{len(reports)} reports, {len(failures)} hard failures, {len(soft)} diagnostics outside range", flush=True)
    return 1 if failures else 0
