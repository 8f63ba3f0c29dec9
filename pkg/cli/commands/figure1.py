import logging

from core.analysis import predicted_spectrum, quantile_spectrum_gap
from core.config import FIGURE_N
from core.spectra import full_spectrum, precond_spectrum
from cli.components import canonical_matrix, eta_matrix, output_path, RowWriter

logger = logging.getLogger(__name__)

GNUPLOT_TEMPLATE = """\
# Sorted eigenvalues of T_n(F_n) and T_n(eta)^-1 T_n(F_n), n = {n}
set datafile separator ","
set key top left
set xlabel "index"
set ylabel "eigenvalue"
set terminal pngcairo size 900,1200
set output "figure1.png"
set multiplot layout 2,1
plot "{plain}" using 1:2 every ::1 with points pt 7 ps 0.3 title "T_n(F_n)", \\
     "{preconditioned}" using 1:2 every ::1 with points pt 7 ps 0.3 title "T_n(eta)^-1 T_n(F_n)"
set logscale y
replot
unset multiplot
"""


def write_plot_script(cfg, n, plain_path, preconditioned_path):
    path = cfg.output_dir / "figure1.gp"
    path.write_text(
        GNUPLOT_TEMPLATE.format(n=n, plain=plain_path.name, preconditioned=preconditioned_path.name),
        encoding="utf-8",
    )
    logger.info(f"Wrote {path}")
    return path


def run_figure1(cfg):
    """
    Both sorted spectra of order n as (index, eigenvalue) series.

    The unpreconditioned series also carries the quantile prediction
    Q_n(i/(n+1)) in a third column.

    Returns:
        Exit code 0
    """
    n = cfg.n or FIGURE_N
    T = canonical_matrix(n, cfg)
    plain = full_spectrum(T)
    preconditioned = precond_spectrum(T, eta_matrix(n))
    quantile = predicted_spectrum(n, n)

    gap = quantile_spectrum_gap(plain, n)
    logger.info(f"Interior deviation from the quantile prediction at n={n}: {gap:.3e}")

    plain_path = output_path(cfg, "figure1_plain")
    with RowWriter(plain_path, ["index", "eigenvalue", "quantile"], cfg.format) as writer:
        for i, (value, predicted) in enumerate(zip(plain, quantile), start=1):
            writer.write({"index": i, "eigenvalue": float(value), "quantile": float(predicted)})

    preconditioned_path = output_path(cfg, "figure1_preconditioned")
    with RowWriter(preconditioned_path, ["index", "eigenvalue"], cfg.format) as writer:
        for i, value in enumerate(preconditioned, start=1):
            writer.write({"index": i, "eigenvalue": float(value)})

    if cfg.plot_script and cfg.format == "csv":
        write_plot_script(cfg, n, plain_path, preconditioned_path)
    elif cfg.plot_script:
        logger.warning("The gnuplot script reads CSV series, skipped for --format json")

    print(f"figure1 n={n}")
    print(f"  T_n(F_n):              min {plain[0]:.6g}  max {plain[-1]:.6g}  -> {plain_path}")
    print(f"  T_n(eta)^-1 T_n(F_n):  min {preconditioned[0]:.6g}  max {preconditioned[-1]:.6g}  -> {preconditioned_path}")
    print(f"  quantile prediction interior gap {gap:.3g}", flush=True)
    return 0
