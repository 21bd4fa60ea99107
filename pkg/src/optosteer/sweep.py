"""Squeezing-parameter sweeps, steering windows, CSV and plot-script output."""

from __future__ import annotations

import csv
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .constants import EPS_ZERO, PHYSICALITY_TOL
from .errors import NotStable, NumericalError, UnknownColumn, UnknownPredicate, Unphysical
from .linalg import physicality_margin
from .model import NoiseConvention, PhysicalParams, steady_state_cm
from .steering import (
    SteeringClass,
    classify_values,
    genuine_from_values,
    residuals_from_values,
    steering_matrix,
)

STEERING_COLUMNS = ["g_a_b", "g_b_a", "g_a_c", "g_c_a", "g_b_c", "g_c_b",
                    "g_ab_c", "g_c_ab", "g_ac_b", "g_b_ac", "g_bc_a", "g_a_bc"]
RESIDUAL_COLUMNS = ["res_col_a", "res_col_b", "res_col_c",
                    "res_dist_a", "res_dist_b", "res_dist_c"]
# class column -> (forward, backward) steering columns
CLASS_COLUMNS = {
    "class_ab": ("g_a_b", "g_b_a"),
    "class_ab_c": ("g_ab_c", "g_c_ab"),
    "class_ac_b": ("g_ac_b", "g_b_ac"),
    "class_bc_a": ("g_bc_a", "g_a_bc"),
}
NOT_AVAILABLE = "NA"


@dataclass(frozen=True)
class SweepRow:
    """One grid point. Steering values and residuals are in nats."""

    r: float
    g_a_b: float
    g_b_a: float
    g_a_c: float
    g_c_a: float
    g_b_c: float
    g_c_b: float
    g_ab_c: float
    g_c_ab: float
    g_ac_b: float
    g_b_ac: float
    g_bc_a: float
    g_a_bc: float
    res_col_a: float
    res_col_b: float
    res_col_c: float
    res_dist_a: float
    res_dist_b: float
    res_dist_c: float
    genuine: int
    class_ab: str
    class_ab_c: str
    class_ac_b: str
    class_bc_a: str
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


COLUMNS = [f.name for f in fields(SweepRow)]
_FLOAT_COLUMNS = ["r"] + STEERING_COLUMNS + RESIDUAL_COLUMNS


@dataclass(frozen=True)
class SweepConfig:
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    r_min: float = 0.0
    r_max: float = 2.0
    steps: int = 401
    noise_convention: NoiseConvention = NoiseConvention.PHYSICAL
    output_path: str = "sweep.csv"

    def __post_init__(self):
        if not (self.r_min >= 0 and self.r_max > self.r_min):
            raise ValueError("need 0 <= r_min < r_max")
        if self.steps < 2:
            raise ValueError("steps must be at least 2")

    def grid(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.steps)


@dataclass(frozen=True)
class Window:
    quantity: str
    intervals: list


def row_from_values(r: float, g: dict, status: str = "ok") -> SweepRow:
    """Assemble a row from the twelve steering values keyed ``a_b``, ``ab_c``..."""
    col, dist = residuals_from_values(g)
    data = {"r": float(r)}
    data.update({f"g_{k}": float(v) for k, v in g.items()})
    data.update({f"res_col_{k}": v for k, v in col.items()})
    data.update({f"res_dist_{k}": v for k, v in dist.items()})
    data["genuine"] = int(genuine_from_values(g))
    for name, (fwd, back) in CLASS_COLUMNS.items():
        data[name] = classify_values(data[fwd], data[back]).value
    data["status"] = status
    return SweepRow(**data)


def failed_row(r: float, status: str) -> SweepRow:
    data = {c: math.nan for c in _FLOAT_COLUMNS}
    data.update(r=float(r), genuine=0, status=status)
    data.update({c: NOT_AVAILABLE for c in CLASS_COLUMNS})
    return SweepRow(**data)


def compute_row(params: PhysicalParams, r: float,
                convention: NoiseConvention = NoiseConvention.PHYSICAL) -> SweepRow:
    """Evaluate one grid point; numerical failures become flagged rows."""
    status = "ok"
    try:
        cm = steady_state_cm(params.with_r(r), convention, check_physical=False)
        if physicality_margin(cm) < -PHYSICALITY_TOL:
            if convention is NoiseConvention.PHYSICAL:
                raise Unphysical("steady state violates the uncertainty relation")
            status = "unphysical"
        return row_from_values(r, steering_matrix(cm, check_physical=False), status)
    except NotStable:
        return failed_row(r, "not_stable")
    except Unphysical:
        return failed_row(r, "unphysical")
    except NumericalError:
        # an unphysical state may not even be positive semidefinite
        return failed_row(r, "unphysical" if status == "unphysical" else "numerical_error")


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list:
    """Rows on the uniform ``r`` grid, in ascending order.

    With ``workers > 1`` rows are evaluated on a thread pool; the result is
    identical to the sequential run.
    """
    grid = [float(r) for r in cfg.grid()]

    def one(r):
        return compute_row(cfg.physical, r, cfg.noise_convention)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, grid))
    return [one(r) for r in grid]


# --------------------------------------------------------------------------
# windows
# --------------------------------------------------------------------------

_PREDICATE_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([a-z_]*)\s*\))?\s*$")


def _class_column(arg: str) -> str:
    key = "class_ab" if arg == "a_b" else "class_" + arg
    if key not in CLASS_COLUMNS:
        raise UnknownColumn(f"no classification for partition {arg!r}; "
                            f"choose from {[c[6:] for c in CLASS_COLUMNS]}")
    return key


def make_predicate(text: str):
    """Turn ``genuine_tripartite``, ``one_way(ab_c)``, ``two_way(ab)``,
    ``no_way(bc_a)`` or ``positive(g_a_b)`` into a row predicate."""
    m = _PREDICATE_RE.match(text)
    if not m:
        raise UnknownPredicate(f"cannot parse predicate {text!r}")
    name, arg = m.group(1), m.group(2)
    if name == "genuine_tripartite" and not arg:
        return lambda row: row.ok and row.genuine == 1
    if name == "positive" and arg:
        if arg not in _FLOAT_COLUMNS:
            raise UnknownColumn(f"unknown column {arg!r}")
        return lambda row: row.ok and getattr(row, arg) > EPS_ZERO
    if name in ("one_way", "two_way", "no_way") and arg:
        col = _class_column(arg)
        if name == "one_way":
            return lambda row: row.ok and SteeringClass(getattr(row, col)).is_one_way
        wanted = SteeringClass.TWO_WAY if name == "two_way" else SteeringClass.NO_WAY
        return lambda row: row.ok and SteeringClass(getattr(row, col)) is wanted
    raise UnknownPredicate(f"unknown predicate {text!r}")


def find_windows(rows, predicate: str) -> Window:
    """Maximal runs of consecutive grid points where ``predicate`` holds.

    Endpoints are grid values; nothing is interpolated between points.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows")
    test = make_predicate(predicate)
    intervals = []
    start = prev = None
    for row in rows:
        if test(row):
            if start is None:
                start = row.r
            prev = row.r
        elif start is not None:
            intervals.append((start, prev))
            start = None
    if start is not None:
        intervals.append((start, prev))
    return Window(predicate.strip(), intervals)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def format_csv(rows) -> str:
    lines = [",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, c)) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path):
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(format_csv(rows))


def parse_csv(text: str) -> list:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != COLUMNS:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    rows = []
    for rec in reader:
        data = {c: float(rec[c]) for c in _FLOAT_COLUMNS}
        data["genuine"] = int(rec["genuine"])
        data.update({c: rec[c] for c in CLASS_COLUMNS})
        data["status"] = rec["status"]
        rows.append(SweepRow(**data))
    return rows


def read_csv(path) -> list:
    return parse_csv(Path(path).read_text(encoding="ascii"))


# --------------------------------------------------------------------------
# plot script
# --------------------------------------------------------------------------

PLOT_FILES = ("steering_to_k.png", "steering_from_k.png",
              "monogamy.png", "one_way.png")

_PLOT_TEMPLATE = '''\
"""Render steering-vs-squeezing figures from {csv_name}.

Run from any directory: python {script_name}
Writes {files} next to this script.
"""
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {csv_rel!r})
R_LIMITS = {r_limits!r}
CLASS_COLOURS = {{"TwoWay": "red", "OneWayXtoY": "green",
                 "OneWayYtoX": "green", "NoWay": "blue"}}

with open(CSV_PATH, newline="") as fh:
    rows = [rec for rec in csv.DictReader(fh) if rec["status"] == "ok"]
r = [float(rec["r"]) for rec in rows]


def col(name):
    return [float(rec[name]) for rec in rows]


def finish(fig, axes, name):
    for ax in axes:
        ax.set_xlabel("squeezing r")
        if R_LIMITS is not None:
            ax.set_xlim(*R_LIMITS)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, name), dpi=120)
    plt.close(fig)


def shade(ax, cls_col):
    labels = [rec[cls_col] for rec in rows]
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            lo = r[start]
            hi = r[i] if i < len(labels) else r[-1]
            ax.axvspan(lo, hi, color=CLASS_COLOURS.get(labels[start], "grey"),
                       alpha=0.15, lw=0)
            start = i


TARGETS = [("a", "b", "c"), ("b", "a", "c"), ("c", "a", "b")]

# collective vs. individual steering of each single mode
fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
for ax, (k, i, j) in zip(axes, TARGETS):
    pair = "".join(sorted(i + j))
    ax.plot(r, col("g_%s_%s" % (pair, k)), "k-", label="G(%s->%s)" % (pair.upper(), k.upper()))
    ax.plot(r, col("g_%s_%s" % (i, k)), "r--", label="G(%s->%s)" % (i.upper(), k.upper()))
    ax.plot(r, col("g_%s_%s" % (j, k)), "b:", label="G(%s->%s)" % (j.upper(), k.upper()))
    ax.set_ylabel("steering (nats)")
finish(fig, axes, {f0!r})

# single mode steering the other two, collectively and individually
fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
for ax, (k, i, j) in zip(axes, TARGETS):
    pair = "".join(sorted(i + j))
    ax.plot(r, col("g_%s_%s" % (k, pair)), "k-", label="G(%s->%s)" % (k.upper(), pair.upper()))
    ax.plot(r, col("g_%s_%s" % (k, i)), "r--", label="G(%s->%s)" % (k.upper(), i.upper()))
    ax.plot(r, col("g_%s_%s" % (k, j)), "b:", label="G(%s->%s)" % (k.upper(), j.upper()))
    ax.set_ylabel("steering (nats)")
finish(fig, axes, {f1!r})

# both monogamy residual families
fig, axes = plt.subplots(1, 2, figsize=(10, 3.6))
for k, style in zip("abc", ["k-", "r--", "b:"]):
    axes[0].plot(r, col("res_col_" + k), style, label="(ij)->%s residual" % k.upper())
    axes[1].plot(r, col("res_dist_" + k), style, label="%s->(ij) residual" % k.upper())
for ax in axes:
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.set_ylabel("residual (nats)")
finish(fig, axes, {f2!r})

# directional pairs with two-way / one-way / no-way shading
PAIRS = [("class_bc_a", "g_bc_a", "g_a_bc"), ("class_ac_b", "g_ac_b", "g_b_ac"),
         ("class_ab_c", "g_ab_c", "g_c_ab"), ("class_ab", "g_a_b", "g_b_a")]
fig, axes = plt.subplots(2, 2, figsize=(10, 7))
for ax, (cls_col, fwd, back) in zip(axes.ravel(), PAIRS):
    shade(ax, cls_col)
    ax.plot(r, col(fwd), "k-", label=fwd)
    ax.plot(r, col(back), "k--", label=back)
    ax.set_ylabel("steering (nats)")
finish(fig, axes.ravel(), {f3!r})
'''


def format_plot_script(rows, csv_rel: str, script_name: str = "plot.py") -> str:
    rows = list(rows)
    r_limits = None
    if rows:
        r_limits = (float(min(row.r for row in rows)), float(max(row.r for row in rows)))
    return _PLOT_TEMPLATE.format(
        csv_name=os.path.basename(csv_rel), script_name=script_name,
        files=", ".join(PLOT_FILES), csv_rel=csv_rel, r_limits=r_limits,
        f0=PLOT_FILES[0], f1=PLOT_FILES[1], f2=PLOT_FILES[2], f3=PLOT_FILES[3],
    )


def emit_plot_script(rows, path, csv_path):
    """Write a matplotlib script that renders the four figure files.

    The CSV is referenced relative to the script's own directory.
    """
    path = Path(path)
    csv_rel = os.path.relpath(Path(csv_path).resolve(), path.resolve().parent)
    text = format_plot_script(rows, csv_rel, path.name)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(text)
