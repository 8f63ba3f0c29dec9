import logging

import pandas as pd

from .config import REFERENCE_MAX_N, REFERENCE_RTOL, REFERENCE_TABLES_PATH, UNREPRODUCED_TABLES

logger = logging.getLogger(__name__)

# Published values of the two conditioning tables, one row per (table, quantity, n)
try:
    reference_df = pd.read_csv(REFERENCE_TABLES_PATH)
    logger.info(f"Loaded {len(reference_df)} reference values from {REFERENCE_TABLES_PATH}")
except FileNotFoundError:
    logger.error(f"Reference table file not found: {REFERENCE_TABLES_PATH}")
    raise
except Exception as e:
    logger.error(f"Error loading reference tables: {e}")
    raise

VALID_TABLES = set(reference_df["table"])


def reference_row(table, n):
    """
    Reference values of one table column.

    Returns:
        Dict quantity -> value, empty when n is not tabulated
    """
    if table not in VALID_TABLES:
        raise ValueError(f"Unknown reference table '{table}'. Use one of {sorted(VALID_TABLES)}")
    rows = reference_df[(reference_df["table"] == table) & (reference_df["n"] == n)]
    return dict(zip(rows["quantity"], rows["value"]))


def reference_orders(table):
    return sorted(int(n) for n in reference_df.loc[reference_df["table"] == table, "n"].unique())


def compare_row(table, row, rtol=REFERENCE_RTOL):
    """
    Side-by-side diff of a computed row against the reference values.

    Deviations above rtol are flagged DIFF for n <= REFERENCE_MAX_N; larger orders
    are listed with their deviation but never flagged. Tables in
    UNREPRODUCED_TABLES are marked GAP instead of DIFF.

    Args:
        table: 'table1' or 'table2'
        row: Dict with 'n' and quantity columns
        rtol: Relative tolerance

    Returns:
        DataFrame with columns n, quantity, computed, reference, rel_dev, flag
    """
    n = int(row["n"])
    expected = reference_row(table, n)
    records = []
    for quantity, reference in expected.items():
        if quantity not in row:
            continue
        computed = float(row[quantity])
        rel_dev = abs(computed - reference) / abs(reference)
        flagged = n <= REFERENCE_MAX_N and rel_dev > rtol
        label = "GAP" if table in UNREPRODUCED_TABLES else "DIFF"
        if flagged:
            log = logger.warning if label == "DIFF" else logger.info
            log(f"{table} n={n} {quantity}: {computed:.6g} vs reference {reference:.6g} ({label})")
        records.append(
            {
                "n": n,
                "quantity": quantity,
                "computed": computed,
                "reference": reference,
                "rel_dev": rel_dev,
                "flag": label if flagged else "",
            }
        )
    return pd.DataFrame(records, columns=["n", "quantity", "computed", "reference", "rel_dev", "flag"])
