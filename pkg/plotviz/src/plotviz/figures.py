"""Build and save figures from simulator CSV files.

The CSV is the single source of truth: nothing here recomputes statistics,
and the renderers are deterministic (pinned hash salt, no timestamps), so the
same input produces the same image bytes.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REGRET_COLUMNS = ("policy", "checkpoint", "mean_regret", "q05", "q95", "std", "replications")
KINF_COLUMNS = ("n", "mean_log_kinf", "stderr")
COLOR_CYCLE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class SchemaError(ValueError):
    """The input CSV is missing, empty, or shaped wrong."""


@dataclass(frozen=True)
class PlotSpec:
    source: Path
    out: Path
    title: str | None = None
    y_label: str = "cumulative regret"
    colors: tuple[str, ...] = COLOR_CYCLE
    log_y: bool = False
    reference: float | None = None


@dataclass(frozen=True)
class RegretSeries:
    policy: str
    checkpoints: np.ndarray
    mean: np.ndarray
    q05: np.ndarray
    q95: np.ndarray


def _read_table(path: Path, expected: tuple[str, ...]) -> list[dict[str, str]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError("input file is empty")
        missing = [c for c in expected if c not in header]
        if missing:
            raise SchemaError(f"input is missing column(s): {', '.join(missing)}")
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError("input has no data rows")
    return rows


def _number(row: dict[str, str], column: str, line: int) -> float:
    try:
        return float(row[column])
    except (KeyError, ValueError):
        raise SchemaError(f"line {line}: bad value for {column}") from None


def load_regret(path: Path) -> list[RegretSeries]:
    """One series per policy, in first-appearance order."""
    grouped: dict[str, list[tuple[float, float, float, float]]] = {}
    for line, row in enumerate(_read_table(path, REGRET_COLUMNS), start=2):
        grouped.setdefault(row.get("policy", ""), []).append(
            tuple(_number(row, c, line) for c in ("checkpoint", "mean_regret", "q05", "q95"))
        )
    series = []
    for policy, values in grouped.items():
        cols = np.array(values, dtype=float).T
        series.append(RegretSeries(policy, cols[0], cols[1], cols[2], cols[3]))
    return series


def load_kinf(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = _read_table(path, KINF_COLUMNS)
    table = np.array(
        [
            [_number(row, c, line) for c in KINF_COLUMNS]
            for line, row in enumerate(rows, start=2)
        ]
    )
    n = table[:, 0]
    if np.any(n <= 1.0):
        raise SchemaError("sample sizes must exceed 1 for a log-log axis")
    if np.any(np.diff(n) <= 0.0):
        raise SchemaError("sample sizes must be strictly increasing")
    return n, table[:, 1], table[:, 2]


def regret_figure(spec: PlotSpec) -> plt.Figure:
    """Solid mean curve per policy plus dashed 5/95 quantile curves."""
    series = load_regret(spec.source)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, s in enumerate(series):
        color = spec.colors[i % len(spec.colors)]
        ax.plot(s.checkpoints, s.mean, color=color, label=s.policy)
        ax.plot(s.checkpoints, s.q05, color=color, linestyle="--", linewidth=0.9)
        ax.plot(s.checkpoints, s.q95, color=color, linestyle="--", linewidth=0.9)
    ax.set_xlabel("pulls")
    ax.set_ylabel(spec.y_label)
    if spec.log_y:
        ax.set_yscale("log")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    return fig


def kinf_figure(spec: PlotSpec) -> plt.Figure:
    """Scatter with a dashed least-squares fit and the slope written out."""
    n, y, err = load_kinf(spec.source)
    if n.size < 2:
        raise SchemaError("need at least two sample sizes to fit a slope")
    if n.size == 2:
        warnings.warn("fit through two points has no residual degrees of freedom")
    x = np.log(np.log(n))
    slope, intercept = np.polyfit(x, y, 1)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(x, y, yerr=err, fmt="o", color=spec.colors[0], capsize=3,
                label="measured")
    grid = np.array([x.min(), x.max()])
    ax.plot(grid, slope * grid + intercept, linestyle="--", color=spec.colors[1],
            label="least-squares fit")
    ax.annotate(f"slope {slope:.3f}", xy=(0.04, 0.06), xycoords="axes fraction")
    if spec.reference is not None:
        ax.axhline(math.log(spec.reference), linestyle=":", color="#555555",
                   label="in-family value")
    ax.set_xlabel("log log n")
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    return fig


def save_figure(fig: plt.Figure, out: Path) -> None:
    """Suffix picks the format; svg when there is none. Output is timestamp-free."""
    out = Path(out)
    fmt = out.suffix.lstrip(".").lower() or "svg"
    with matplotlib.rc_context({"svg.hashsalt": "plotviz"}):
        fig.savefig(out, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
