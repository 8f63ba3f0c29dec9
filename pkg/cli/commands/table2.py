import logging

import pandas as pd

from core.reference import compare_row
from core.spectra import PRECONDITIONED_COLUMNS, condition_report
from cli.components import (
    canonical_matrix,
    diff_summary,
    eta_matrix,
    output_path,
    print_table,
    run_rows,
    RowWriter,
)

logger = logging.getLogger(__name__)


def run_table2(cfg):
    """
    Extreme eigenvalues and conditioning of T_n(eta)^-1 T_n(F_hat_n).

    The published values of this table are not reproduced by the pencil
    (T_n(theta^2), T_n(F_hat_n)); their deviations are listed as GAP and
    leave the exit code alone.

    Returns:
        Exit code: 1 if a reference value is flagged DIFF, 0 otherwise
    """

    def compute_row(n):
        return condition_report(canonical_matrix(n, cfg), preconditioner=eta_matrix(n)).to_row()

    with RowWriter(output_path(cfg, "table2"), PRECONDITIONED_COLUMNS, cfg.format) as writer:
        rows = run_rows("table2", compute_row, cfg.n_list, writer)

    print_table(
        pd.DataFrame(rows, columns=PRECONDITIONED_COLUMNS),
        "Extreme eigenvalues and conditioning of T_n(eta)^-1 T_n(F_n)",
    )
    diffs, flagged = diff_summary(compare_row("table2", row) for row in rows)
    if not diffs.empty:
        print_table(diffs, "Reference diff")
    gaps = int((diffs["flag"] == "GAP").sum()) if not diffs.empty else 0
    if gaps:
        logger.warning(f"{gaps} table2 values differ from the published column (known gap)")
    if flagged:
        logger.warning(f"{flagged} table2 values deviate from the reference")
        return 1
    return 0
