"""CSV report writers.

Every writer is atomic (temp file in the target directory, then rename)
and emits full-precision decimal floats (17 significant digits) so that
values round-trip exactly through text.  Each file starts with a
versioned schema comment line of the form ``# polysign-csv v1 <name>``.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile

import numpy as np

SCHEMA_VERSION = "v1"


def format_float(x: float) -> str:
    """Shortest decimal that round-trips a double (up to 17 digits)."""
    return repr(float(x))


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_rows(schema: str, header: list[str],
                 rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# polysign-csv {SCHEMA_VERSION} {schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()


def _coordinate_header(dimension: int) -> list[str]:
    return ["x", "y", "z"][:dimension]


def write_solution_csv(path: str, function) -> None:
    """One row per interior grid point: coordinates then the value."""
    domain = function.domain
    header = _coordinate_header(domain.dimension) + ["value"]
    rows = [[*map(float, point), float(value)]
            for point, value in zip(domain.points, function.values)]
    _atomic_write_text(path, _render_rows("solution", header, rows))


def write_decomposition_csv(path: str, solution) -> None:
    """Coordinates plus u, u_oplus, u_ominus for each grid point."""
    domain = solution.u.domain
    header = _coordinate_header(domain.dimension) + [
        "u", "u_oplus", "u_ominus"]
    rows = [[*map(float, point), float(u), float(up), float(um)]
            for point, u, up, um in zip(domain.points, solution.u.values,
                                        solution.u_oplus.values,
                                        solution.u_ominus.values)]
    _atomic_write_text(path, _render_rows("decomposition", header, rows))


def write_estimate_csv(path: str, domain_spec, m: int,
                       estimate) -> None:
    """Single-row summary of the sandwich-constant estimate."""
    header = ["shape", "m", "cells", "c2_star", "c2_used", "c1_hat",
              "c3_hat", "exclusion_radius"]
    row = [domain_spec.shape, m, domain_spec.cells,
           float(estimate.c2_star), float(estimate.c2_used),
           float(estimate.c1_hat), float(estimate.c3_hat),
           float(estimate.exclusion_radius)]
    for label, pair in (("c2", estimate.c2_pair), ("c1", estimate.c1_pair),
                        ("c3", estimate.c3_pair)):
        for end in ("x", "y"):
            header.append(f"{label}_{end}")
        if pair is None:
            row.extend(["", ""])
        else:
            row.extend(";".join(format_float(c) for c in p) for p in pair)
    _atomic_write_text(path, _render_rows("constants", header, [row]))


def write_histogram_csv(path: str, edges: np.ndarray,
                        counts: np.ndarray) -> None:
    header = ["bin_left", "bin_right", "count"]
    rows = [[float(l), float(r), int(c)]
            for l, r, c in zip(edges[:-1], edges[1:], counts)]
    _atomic_write_text(path, _render_rows("histogram", header, rows))


def write_experiment_csv(path: str, report) -> None:
    """One row per trial plus a final summary row."""
    keys = sorted({key for rec in report.trials for key in rec})
    front = [k for k in ("trial", "cells") if k in keys]
    keys = front + [k for k in keys if k not in front]
    header = ["kind", *keys]
    rows = []
    for rec in report.trials:
        rows.append([report.kind]
                    + [float(rec[k]) if isinstance(rec.get(k), float)
                       else rec.get(k, "") for k in keys])
    summary = {"trial": "summary", "cells": report.cells,
               "ratio": float(report.empirical_constant)}
    if report.refinement_ratio is not None:
        summary["target"] = float(report.coarse_constant)
        summary["bound"] = float(report.refinement_ratio)
    rows.append([report.kind] + [summary.get(k, "") for k in keys])
    _atomic_write_text(path, _render_rows("experiment", header, rows))


def write_verify_csv(path: str, results) -> None:
    """Machine-readable verification summary: one row per check.

    Timings are deliberately excluded so that two seeded runs of the
    suite produce byte-identical files.
    """
    header = ["check", "passed", "detail"]
    rows = [[res.name, "pass" if res.passed else "FAIL", res.detail]
            for res in results]
    _atomic_write_text(path, _render_rows("verify", header, rows))


def load_csv(path: str) -> tuple[str, list[str], list[list[str]]]:
    """Read back a report; returns (schema name, header, rows)."""
    with open(path, newline="") as handle:
        first = handle.readline().strip()
        parts = first.split()
        if len(parts) < 4 or parts[0] != "#" or parts[1] != "polysign-csv":
            raise ValueError(f"{path}: missing polysign-csv schema line")
        schema = parts[3]
        reader = csv.reader(handle)
        header = next(reader)
        rows = [row for row in reader]
    return schema, header, rows


def load_solution_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Round-trip loader for solution files: (points, values)."""
    schema, header, rows = load_csv(path)
    if schema not in ("solution", "decomposition"):
        raise ValueError(f"{path}: unexpected schema {schema}")
    data = np.array([[float(v) for v in row] for row in rows])
    ncoord = sum(1 for name in header if name in ("x", "y", "z"))
    return data[:, :ncoord], data[:, ncoord:]
