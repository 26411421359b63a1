"""The five figure styles, each a function from CSV rows to a PNG.

Fit overlays reuse the exponent and intercept recorded by the simulator;
nothing is re-fitted here. Each render function returns a small metadata
dict (plotted point count, overlay parameters) for callers and tests.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import (
    HISTOGRAM_COLUMNS,
    PHASE_COLUMNS,
    SchemaError,
    parse_bool,
    parse_float,
    read_fit,
    read_rows,
)

KINDS = ("dist_semilog", "dist_loglog", "beta_scan", "phase_map", "gini_scan")

BETA_GATE = 0.96  # simulator's fit-acceptance threshold, drawn as a guide line


def render(kind: str, input_csv: str | Path, output_png: str | Path, *,
           fits: str | Path | None = None, column: str | None = None) -> dict:
    if kind == "dist_semilog":
        return _render_dist(input_csv, output_png, fits, family="boltzmann_gibbs")
    if kind == "dist_loglog":
        return _render_dist(input_csv, output_png, fits, family="pareto")
    if kind == "beta_scan":
        return _render_beta_scan(input_csv, output_png)
    if kind == "phase_map":
        return _render_phase_map(input_csv, output_png, column or "mu")
    if kind == "gini_scan":
        return _render_gini_scan(input_csv, output_png, column or "gini_snapshot")
    raise SchemaError(f"unknown figure kind {kind!r}; expected one of {', '.join(KINDS)}")


def _save(fig, output_png) -> None:
    fig.savefig(output_png, dpi=150)
    plt.close(fig)


def _render_dist(input_csv, output_png, fits_csv, family: str) -> dict:
    rows = read_rows(input_csv, HISTOGRAM_COLUMNS)
    x = np.array([float(r["bin_center"]) for r in rows])
    y = np.array([float(r["density"]) for r in rows])

    fig, ax = plt.subplots(figsize=(5, 4))
    pos = y > 0
    ax.plot(x[pos], y[pos], "o", ms=4, mfc="none", color="tab:blue", label="data")

    if fits_csv is None:
        sibling = Path(input_csv).parent / "fits.csv"
        fits_csv = sibling if sibling.exists() else None
    fit = read_fit(fits_csv, family) if fits_csv is not None else None

    meta = {"points": int(pos.sum()), "fit_exponent": None, "fit_intercept": None}
    if fit is not None and fit["exponent"] is not None and pos.any():
        e, c = fit["exponent"], fit["intercept"]
        xs = x[pos]
        if family == "boltzmann_gibbs":
            ys = np.exp(c - e * xs)        # ln P = c - e x, straight on semilog axes
            label = f"fit: exponent {e:.3g}"
        else:
            ys = np.exp(c) * xs ** (-e)    # ln P = c - e ln x, straight on log-log axes
            label = f"fit: exponent {e:.3g}"
        ax.plot(xs, ys, "-", color="tab:red", label=label)
        meta["fit_exponent"] = e
        meta["fit_intercept"] = c

    ax.set_yscale("log")
    if family == "pareto":
        ax.set_xscale("log")
    ax.set_xlabel("wealth x")
    ax.set_ylabel("P(x)")
    if pos.any():
        ax.legend(frameon=False)
    _save(fig, output_png)
    return meta


def _free_axis(rows) -> str:
    a_vals = {r["a"] for r in rows}
    r_vals = {r["r"] for r in rows}
    return "a" if len(a_vals) >= len(r_vals) else "r"


def _render_beta_scan(input_csv, output_png) -> dict:
    rows = read_rows(input_csv, PHASE_COLUMNS)
    axis = _free_axis(rows) if rows else "a"
    fig, ax = plt.subplots(figsize=(5, 4))
    n = 0
    for col, style, label in (("beta_bg", "o-", "|beta| BG"),
                              ("beta_pareto", "s-", "|beta| Pareto")):
        pts = [(float(r[axis]), abs(v)) for r in rows
               if (v := parse_float(r[col])) is not None]
        if pts:
            xs, ys = zip(*sorted(pts))
            ax.plot(xs, ys, style, ms=4, label=label)
            n += len(pts)
    ax.axhline(BETA_GATE, color="gray", ls="--", lw=1)
    ax.set_xlabel(axis)
    ax.set_ylabel("|correlation coefficient|")
    if n:
        ax.legend(frameon=False)
    _save(fig, output_png)
    return {"points": n, "axis": axis}


def _render_gini_scan(input_csv, output_png, column: str) -> dict:
    rows = read_rows(input_csv, PHASE_COLUMNS)
    if rows and column not in rows[0]:
        raise SchemaError(f"{Path(input_csv).name}: missing required column '{column}'")
    axis = _free_axis(rows) if rows else "a"
    pts = sorted((float(r[axis]), v) for r in rows
                 if (v := parse_float(r[column])) is not None)
    fig, ax = plt.subplots(figsize=(5, 4))
    if pts:
        xs, ys = zip(*pts)
        ax.plot(xs, ys, "o-", ms=4, color="tab:green")
    ax.set_xlabel(axis)
    ax.set_ylabel("Gini coefficient")
    ax.set_ylim(0, 1)
    _save(fig, output_png)
    return {"points": len(pts), "axis": axis}


# which acceptance flag gates the color for each plottable phase column
_COLUMN_GATE = {"mu": "bg_accepted", "temperature": "bg_accepted",
                "alpha": "pareto_accepted"}


def _render_phase_map(input_csv, output_png, column: str) -> dict:
    rows = read_rows(input_csv, PHASE_COLUMNS)
    if rows and column not in rows[0]:
        raise SchemaError(f"{Path(input_csv).name}: missing required column '{column}'")
    a_vals = sorted({float(r["a"]) for r in rows})
    r_vals = sorted({float(r["r"]) for r in rows})
    grid = np.full((len(r_vals), len(a_vals)), np.nan)
    ai = {v: i for i, v in enumerate(a_vals)}
    ri = {v: i for i, v in enumerate(r_vals)}
    gate = _COLUMN_GATE.get(column)
    bg_cells, p_cells = [], []
    n = 0
    for row in rows:
        if parse_bool(row["divergent"]):
            continue
        if parse_bool(row["bg_accepted"]):
            bg_cells.append((float(row["a"]), float(row["r"])))
        if parse_bool(row["pareto_accepted"]):
            p_cells.append((float(row["a"]), float(row["r"])))
        if gate is not None and not parse_bool(row[gate]):
            continue
        v = parse_float(row[column])
        if v is None:
            continue
        grid[ri[float(row["r"])], ai[float(row["a"])]] = v
        n += 1

    fig, ax = plt.subplots(figsize=(6, 4.5))
    if n:
        mesh = ax.pcolormesh(a_vals, r_vals, np.ma.masked_invalid(grid),
                             cmap="viridis", shading="nearest")
        fig.colorbar(mesh, ax=ax, label=column)
    for cells, tag in ((bg_cells, "BG"), (p_cells, "P")):
        if cells:
            ca = float(np.mean([c[0] for c in cells]))
            cr = float(np.mean([c[1] for c in cells]))
            ax.text(ca, cr, tag, ha="center", va="center",
                    fontsize=14, fontweight="bold", color="white",
                    path_effects=None)
    ax.set_xlabel("a")
    ax.set_ylabel("r")
    _save(fig, output_png)
    return {"points": n, "column": column}
