"""Tabular run reports (markdown for people, CSV for machines)."""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np


@dataclass
class RunReport:
    title: str
    scenario: str = ""
    thresholds: Optional[object] = None
    moments: Dict[str, object] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)
    provenance: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def add_row(self, **values):
        for key in values:
            if key not in self.columns:
                self.columns.append(key)
        self.rows.append(values)

    def check(self):
        for row in self.rows:
            for key, val in row.items():
                if key.startswith(("p_", "ci_")) and isinstance(val, float) and not math.isnan(val):
                    if not 0.0 <= val <= 1.0:
                        raise ValueError(f"{key}={val} is not a probability")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_csv_value(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_markdown(self) -> str:
        out = [f"## {self.title}", ""]
        if self.scenario:
            out += ["```", self.scenario.rstrip(), "```", ""]
        if self.thresholds is not None:
            th = self.thresholds
            out.append(f"- n_max = {th.n_max}")
            out.append(f"- betas = {_fmt_seq(th.betas)}")
            if th.radii is not None:
                out.append(f"- radii (m) = {_fmt_seq(th.radii)}")
        for name, mom in self.moments.items():
            out.append(f"- {name}: m_N = {mom.m:.4f}, v_N = {mom.v:.4f}")
        if self.thresholds is not None or self.moments:
            out.append("")
        if self.rows:
            out.append("| " + " | ".join(self.columns) + " |")
            out.append("|" + "---|" * len(self.columns))
            for row in self.rows:
                out.append("| " + " | ".join(_md_value(row.get(c)) for c in self.columns) + " |")
            out.append("")
        for note in self.notes:
            out.append(f"> {note}")
        if self.notes:
            out.append("")
        if self.provenance:
            out.append("provenance: " + ", ".join(f"{k}={v}" for k, v in self.provenance.items()))
            out.append("")
        return "\n".join(out)


def _fmt_seq(seq):
    return "(" + ", ".join(f"{x:.6g}" for x in np.asarray(seq, dtype=float)) + ")"


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _md_value(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "-"
        if v != 0 and (abs(v) < 1e-3 or abs(v) >= 1e5):
            return f"{v:.3e}"
        return f"{v:.4f}"
    return str(v)


def read_csv(text: str) -> List[dict]:
    """Parse a report CSV back; numeric cells become int or float."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
                continue
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        rows.append(row)
    return rows
