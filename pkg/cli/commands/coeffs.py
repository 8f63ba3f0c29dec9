import logging

from core.symbols import AggregateSymbol, fourier_coeffs_aggregate, power_coeffs
from cli.components import output_path, print_table

logger = logging.getLogger(__name__)

PREVIEW_ROWS = 8


def run_coeffs(cfg):
    """
    Dump a_0..a_{n-1} of |theta|^(2-alpha) when alpha is set, of F_hat_n otherwise.

    Returns:
        Exit code 0
    """
    n = cfg.n or cfg.n_list[0]
    if cfg.alpha is not None:
        vector = power_coeffs(cfg.alpha, n, cfg.engine, cfg.tol, cfg.oversample)
        stem = f"coeffs_n{n}_alpha{cfg.alpha:g}"
    else:
        vector = fourier_coeffs_aggregate(AggregateSymbol.canonical(n), cfg.engine, cfg.tol, cfg.oversample)
        stem = f"coeffs_n{n}"

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if cfg.format == "csv":
        path = output_path(cfg, stem)
        vector.to_csv(path)
    else:
        path = cfg.output_dir / f"{stem}.json"
        vector.to_json(path)
    logger.info(f"Wrote {path}")

    print_table(
        vector.to_frame().head(PREVIEW_ROWS),
        f"{len(vector)} coefficients ({vector.engine}, abs_tol {vector.abs_tol:.1e}) -> {path}",
    )
    return 0
