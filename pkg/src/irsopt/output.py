"""Deterministic result files: CSV tables and JSON metadata, written atomically."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import List, Optional, Sequence


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory plus rename.

    Readers never observe a partial file; failures leave the old file intact.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


SWEEP_COLUMNS = ("value", "method", "mean_rate_bps_hz", "stderr",
                 "mean_converged_iter", "mean_wall_ms")


def sweep_csv_text(rows: List[dict]) -> str:
    """One row per (swept value, method)."""
    return _csv_text(SWEEP_COLUMNS,
                     [[r[c] for c in SWEEP_COLUMNS] for r in rows])


def convergence_csv_text(power_dbs: Sequence[float],
                         mean_rates: Sequence[Sequence[float]]) -> str:
    """Long format: (power_db, iteration, mean_rate_bps_hz)."""
    rows = []
    for p, trace in zip(power_dbs, mean_rates):
        for k, rate in enumerate(trace, start=1):
            rows.append([p, k, rate])
    return _csv_text(("power_db", "iteration", "mean_rate_bps_hz"), rows)


def solve_trace_csv_text(rates: Sequence[float], lagrangian: Sequence[float],
                         primal_residual: Sequence[float]) -> str:
    rows = [[k, r, l, pr] for k, (r, l, pr)
            in enumerate(zip(rates, lagrangian, primal_residual), start=1)]
    return _csv_text(("iteration", "rate_bps_hz", "lagrangian", "primal_residual"),
                     rows)


def complexity_csv_text(rows: Sequence[tuple]) -> str:
    """Rows are (method, per_iteration or None, total)."""
    return _csv_text(("method", "per_iteration", "total"), rows)


def json_text(obj) -> str:
    """Stable JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
