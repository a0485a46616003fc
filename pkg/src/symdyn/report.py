"""Task reports: one table of rows plus a summary, rendered as an aligned text
table, CSV or versioned JSON. Field order is fixed by ``columns`` and by the
insertion order of ``summary``, so identical runs give identical bytes."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ArgumentError

SCHEMA = "symdyn.report/1"
FORMATS = ("table", "csv", "json")


def plain(value):
    """Convert to JSON-native values (Fractions and numpy scalars become floats/ints; tuples become lists)."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if value is None or isinstance(value, str):
        return value
    return str(value)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, list):
        return " ".join(_cell(v) for v in value)
    return str(value)


@dataclass
class Report:
    task: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    verdict: str | None = None
    plot: dict | None = None

    def __post_init__(self):
        self.columns = list(self.columns)
        self.rows = [{c: plain(r.get(c)) for c in self.columns} for r in self.rows]
        self.summary = plain(dict(self.summary))
        self.plot = plain(self.plot) if self.plot is not None else None

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "task": self.task,
            "verdict": self.verdict,
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
            "plot": self.plot,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ArgumentError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["task"], d["columns"], d["rows"], d["summary"], d["verdict"], d.get("plot"))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([_cell(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_table(self) -> str:
        cells = [[_cell(r[c]) for c in self.columns] for r in self.rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(self.columns)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(self.columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        if self.summary:
            lines.append("")
            key_w = max(len(k) for k in self.summary)
            lines += [f"{k.ljust(key_w)}  {_cell(v) if not isinstance(v, dict) else json.dumps(v)}"
                      for k, v in self.summary.items()]
        if self.verdict is not None:
            lines.append(f"verdict  {self.verdict}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "table") -> str:
        if fmt == "table":
            return self.to_table()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ArgumentError(f"format must be one of {FORMATS}")


def emit_report(report: Report, fmt: str = "table", path: str | None = None) -> str:
    """Render ``report``; write it to ``path`` when given (raises ``OSError`` if unwritable)."""
    text = report.render(fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
