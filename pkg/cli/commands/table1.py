import logging

import pandas as pd

from core.reference import compare_row
from core.spectra import PLAIN_COLUMNS, condition_report
from cli.components import canonical_matrix, diff_summary, output_path, print_table, run_rows, RowWriter

logger = logging.getLogger(__name__)


def run_table1(cfg):
    """
    Extreme eigenvalues and conditioning of T_n(F_hat_n) for every n in the config.

    Writes table1.<csv|jsonl> row by row and prints the reference diff.

    Returns:
        Exit code: 1 if a reference value is flagged, 0 otherwise
    """

    def compute_row(n):
        return condition_report(canonical_matrix(n, cfg)).to_row()

    with RowWriter(output_path(cfg, "table1"), PLAIN_COLUMNS, cfg.format) as writer:
        rows = run_rows("table1", compute_row, cfg.n_list, writer)

    print_table(pd.DataFrame(rows, columns=PLAIN_COLUMNS), "Extreme eigenvalues and conditioning of T_n(F_n)")
    diffs, flagged = diff_summary(compare_row("table1", row) for row in rows)
    if not diffs.empty:
        print_table(diffs, "Reference diff")
    if flagged:
        logger.warning(f"{flagged} table1 values deviate from the reference")
        return 1
    return 0
