import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor

import pandas as pd

from core.config import MAX_WORKERS, SERIES_FLOAT_FORMAT, TABLE_FLOAT_FORMAT
from core.symbols import AggregateSymbol, ENGINE_TAGS, eta_coeffs, fourier_coeffs_aggregate
from core.toeplitz import assemble

logger = logging.getLogger(__name__)


def canonical_matrix(n, cfg):
    """T_n(F_hat_n) with the coefficient engine selected in the config."""
    vector = fourier_coeffs_aggregate(AggregateSymbol.canonical(n), cfg.engine, cfg.tol, cfg.oversample)
    logger.debug(f"Order-{n} coefficients tagged {ENGINE_TAGS[cfg.engine]}, abs_tol {vector.abs_tol:.1e}")
    return assemble(vector)


def eta_matrix(n):
    return assemble(eta_coeffs(n))


def map_ordered(func, items):
    """Apply func concurrently; results come back in input order."""
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        yield from executor.map(func, items)


def format_value(value):
    if isinstance(value, float):
        return TABLE_FLOAT_FORMAT % value
    return str(value)


def render_table(df, title=None):
    """Plain-text table with 6 significant digits."""
    text = df.to_string(index=False, formatters={c: format_value for c in df.columns})
    return f"{title}\n{text}" if title else text


def print_table(df, title=None):
    print(render_table(df, title), flush=True)


class RowWriter:
    """
    Writes one row at a time and flushes after each, so partial results survive a failure.

    CSV rows carry 17 significant digits; the json format writes JSON lines.
    """

    def __init__(self, path, columns, fmt="csv"):
        self.path = path
        self.columns = list(columns)
        self.fmt = fmt
        self._wrote_header = False
        path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(path, "w", encoding="utf-8", newline="")

    def write(self, row):
        if self.fmt == "json":
            self._fh.write(json.dumps({c: row[c] for c in self.columns}) + "\n")
        else:
            frame = pd.DataFrame([row], columns=self.columns)
            frame.to_csv(self._fh, header=not self._wrote_header, index=False, float_format=SERIES_FLOAT_FORMAT)
            self._wrote_header = True
        self._fh.flush()

    def close(self):
        self._fh.close()
        logger.info(f"Wrote {self.path}")

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def output_path(cfg, stem):
    return cfg.output_dir / f"{stem}.{cfg.suffix}"


def run_rows(label, compute_row, n_list, writer):
    """
    Compute one row per order concurrently and write them in n-order.

    Returns:
        List of row dicts
    """
    rows = []
    for row in map_ordered(_timed(label, compute_row), n_list):
        writer.write(row)
        rows.append(row)
    return rows


def _timed(label, compute_row):
    def wrapper(n):
        start_time = time.time()
        row = compute_row(n)
        elapsed = (time.time() - start_time) * 1000
        logger.info(f"{label} row n={n} in {elapsed:.1f}ms")
        return row
    return wrapper


def diff_summary(diffs):
    """Concatenated reference diffs plus the number of DIFF entries (GAP entries are not counted)."""
    frames = [d for d in diffs if not d.empty]
    if not frames:
        return pd.DataFrame(), 0
    merged = pd.concat(frames, ignore_index=True)
    return merged, int((merged["flag"] == "DIFF").sum())

