"""Per-iteration convergence reports and their CSV serialization.

One row per iterate: index, relative residual, relative increment norm,
wall time of the step that produced the iterate (milliseconds, 0 for the
initial iterate), and cumulative counter snapshots.  Metadata lines are
written as leading ``#`` comments so a report file round-trips through
:func:`read_report_csv` unchanged.

CSV conventions: header row, comma separator, ``.`` decimal separator,
scientific notation for residuals and increments, flop estimates as exact
fraction strings (they are rational by construction).
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List


@dataclass(frozen=True)
class ReportRow:
    k: int
    residual: float
    increment_norm: float
    wall_ms: float
    cum_matmuls: int
    cum_lu: int
    cum_flop_estimate: Fraction


@dataclass
class ConvergenceReport:
    method: str
    p: int
    n: int
    matrix_label: str
    stop_reason: str = "running"
    rows: List[ReportRow] = field(default_factory=list)

    @property
    def iterations(self):
        """Number of steps taken (the initial iterate is row 0)."""
        return max(0, len(self.rows) - 1)

    @property
    def final_residual(self):
        return self.rows[-1].residual if self.rows else math.inf

    @property
    def total_wall_ms(self):
        return sum(row.wall_ms for row in self.rows)

    def append(self, row):
        if self.rows and row.k <= self.rows[-1].k:
            raise ValueError("report rows must be strictly ordered by k")
        self.rows.append(row)


_FIELDS = (
    "k",
    "residual",
    "increment_norm",
    "wall_ms",
    "cum_matmuls",
    "cum_lu",
    "cum_flop_estimate",
)


def write_report_csv(report, path):
    with open(path, "w", newline="") as fh:
        fh.write("# method=%s\n" % report.method)
        fh.write("# p=%d\n" % report.p)
        fh.write("# n=%d\n" % report.n)
        fh.write("# matrix=%s\n" % report.matrix_label)
        fh.write("# stop_reason=%s\n" % report.stop_reason)
        writer = csv.writer(fh)
        writer.writerow(_FIELDS)
        for row in report.rows:
            writer.writerow(
                (
                    row.k,
                    "%.17e" % row.residual,
                    "%.17e" % row.increment_norm,
                    "%.6f" % row.wall_ms,
                    row.cum_matmuls,
                    row.cum_lu,
                    str(row.cum_flop_estimate),
                )
            )


def read_report_csv(path):
    meta = {}
    with open(path, newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.reader(data_lines)
    header = tuple(next(reader))
    if header != _FIELDS:
        raise ValueError("unexpected report header: %s" % (header,))
    report = ConvergenceReport(
        method=meta.get("method", "?"),
        p=int(meta.get("p", 0)),
        n=int(meta.get("n", 0)),
        matrix_label=meta.get("matrix", "?"),
        stop_reason=meta.get("stop_reason", "?"),
    )
    for rec in reader:
        if not rec:
            continue
        report.append(
            ReportRow(
                k=int(rec[0]),
                residual=float(rec[1]),
                increment_norm=float(rec[2]),
                wall_ms=float(rec[3]),
                cum_matmuls=int(rec[4]),
                cum_lu=int(rec[5]),
                cum_flop_estimate=Fraction(rec[6]),
            )
        )
    return report
