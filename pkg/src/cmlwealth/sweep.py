"""Per-cell measurement protocol and (a, r) parameter-plane sweeps.

One cell = one (a, r) pair: seed, transient, then a measurement window
during which wealth snapshots are pooled and the scalar observables are
sampled every step. Cells are independent; a sweep may evaluate them in
any order or across processes and always assembles the same table.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from multiprocessing import get_context

import numpy as np

from . import fitting
from .errors import (
    CMLWealthError,
    ConfigurationError,
)
from .fitting import FitResult, build_histogram, classify, fit_loglog, fit_semilog
from .lattice import InitSpec, LatticeState, ModelParams, init_state, step
from .measures import gini, mean_field, sigma

FIT_PROTOCOLS = ("pooled", "snapshot", "per_iteration")

PHASE_CSV_HEADER = [
    "a", "r", "divergent", "h_snapshot", "h_mean", "sigma_mean",
    "gini_snapshot", "gini_mean", "mu", "beta_bg", "bg_accepted",
    "alpha", "beta_pareto", "pareto_accepted", "classification", "temperature",
]


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce a sweep bit for bit."""

    a_range: tuple[float, float] = (0.0, 2.0)
    r_range: tuple[float, float] = (1.0, 10.0)
    grid_step: float = 0.02
    n: int = 100_000
    transient: int = 10_000
    window: int = 100
    realizations: int = 1
    master_seed: int = 0
    beta_threshold: float = fitting.BETA_THRESHOLD
    init_lo: float = 1.0
    init_hi: float = 100.0
    fit_protocol: str = "pooled"
    bg_bins: int = fitting.BG_BINS
    pareto_bins: int = fitting.PARETO_BINS
    pareto_fit_lo: float = fitting.PARETO_FIT_LO
    min_count: int = fitting.MIN_BIN_COUNT

    def __post_init__(self):
        if self.grid_step <= 0:
            raise ConfigurationError("grid_step must be positive")
        if self.a_range[0] > self.a_range[1] or self.r_range[0] > self.r_range[1]:
            raise ConfigurationError("parameter ranges must be nonempty")
        if self.window < 1:
            raise ConfigurationError("window must be >= 1")
        if self.transient < 0 or self.realizations < 1:
            raise ConfigurationError("transient >= 0 and realizations >= 1 required")
        if self.fit_protocol not in FIT_PROTOCOLS:
            raise ConfigurationError(f"unknown fit protocol {self.fit_protocol!r}")


#: CI-speed profile; tolerances for paper comparisons widen accordingly.
DESK_PROFILE = dict(n=10_000, transient=2_000, window=100, grid_step=0.1)


def apply_profile(cfg: SweepConfig, profile: str) -> SweepConfig:
    if profile == "full":
        return cfg
    if profile == "desk":
        return replace(cfg, **DESK_PROFILE)
    raise ConfigurationError(f"unknown profile {profile!r}")


def apply_preset(cfg: SweepConfig, preset: str) -> SweepConfig:
    """Per-figure measurement protocols.

    fig3/fig5: pooled window fits, single realization (the default).
    fig2: per-iteration fits with exponents and correlations averaged
    over the window. fig4: 100-realization ensemble averaging.
    """
    if preset in ("fig3", "fig5"):
        return replace(cfg, fit_protocol="pooled", realizations=1)
    if preset == "fig2":
        return replace(cfg, fit_protocol="per_iteration", realizations=1)
    if preset == "fig4":
        return replace(cfg, realizations=100)
    raise ConfigurationError(f"unknown preset {preset!r}")


@dataclass(frozen=True)
class CellSummary:
    """Everything recorded for one (a, r) grid cell."""

    a: float
    r: float
    divergent: bool
    h_snapshot: float | None = None
    h_mean: float | None = None
    sigma_mean: float | None = None
    gini_snapshot: float | None = None
    gini_mean: float | None = None
    bg: FitResult | None = None
    pareto: FitResult | None = None
    classification: str = "neither"
    temperature: float | None = None


def _seed_key(value: float) -> int:
    # Stable integer key for a parameter value; grid values are exact to
    # well below 1e-9 so cells keep their seed regardless of grid layout.
    return int(round(value * 1_000_000_000))


def cell_seed_sequence(master_seed: int, a: float, r: float,
                       realization: int) -> np.random.SeedSequence:
    """Derived substream for one cell and realization.

    Decouples cells from each other and from the execution schedule:
    the stream depends only on (master_seed, a, r, realization).
    """
    return np.random.SeedSequence((master_seed, _seed_key(a), _seed_key(r), realization))


def _divergent_summary(a: float, r: float) -> CellSummary:
    return CellSummary(a=a, r=r, divergent=True)


def _safe_gini(state: LatticeState) -> float:
    try:
        return gini(state)
    except CMLWealthError:
        return float("nan")


def _fit_pair(samples, cfg: SweepConfig):
    """Both family fits on one sample vector; failures become None."""
    bg = pareto = None
    try:
        h_lin = build_histogram(samples, "linear", cfg.bg_bins)
        bg = fit_semilog(h_lin, min_count=cfg.min_count,
                         beta_threshold=cfg.beta_threshold)
    except CMLWealthError:
        pass
    try:
        mx = float(np.max(samples))
        if mx > cfg.pareto_fit_lo:
            h_log = build_histogram(samples, "logarithmic", cfg.pareto_bins,
                                    range=(cfg.pareto_fit_lo, mx))
            pareto = fit_loglog(h_log, min_count=cfg.min_count,
                                beta_threshold=cfg.beta_threshold)
    except CMLWealthError:
        pass
    return bg, pareto


def _average_fits(fits: list[FitResult], family: str,
                  threshold: float) -> FitResult | None:
    fits = [f for f in fits if f is not None]
    if not fits:
        return None
    beta = float(np.mean([f.beta for f in fits]))
    points = int(round(np.mean([f.points_used for f in fits])))
    return FitResult(
        family=family,
        exponent=float(np.mean([f.exponent for f in fits])),
        intercept=float(np.mean([f.intercept for f in fits])),
        beta=beta,
        accepted=abs(beta) > threshold and points >= fitting.MIN_FIT_POINTS,
        points_used=points,
    )


def _classify_optional(bg: FitResult | None, pareto: FitResult | None) -> str:
    acc_bg = bg is not None and bg.accepted
    acc_p = pareto is not None and pareto.accepted
    if acc_bg and acc_p:
        return "both"
    if acc_bg:
        return "boltzmann_gibbs"
    if acc_p:
        return "pareto"
    return "neither"


def run_cell(a: float, r: float, cfg: SweepConfig, realization: int = 0) -> CellSummary:
    """Full measurement protocol for one (a, r) pair and one realization."""
    params = ModelParams(n=cfg.n, r=r, a=a)
    seq = cell_seed_sequence(cfg.master_seed, a, r, realization)
    state = init_state(cfg.n, InitSpec(lo=cfg.init_lo, hi=cfg.init_hi, seed=seq))

    for _ in range(cfg.transient):
        state = step(state, params)
        if state.divergent:
            return _divergent_summary(a, r)
    post_transient = state

    h_series, s_series, g_series = [], [], []
    snapshots = []
    for _ in range(cfg.window):
        state = step(state, params)
        if state.divergent:
            return _divergent_summary(a, r)
        h_series.append(mean_field(state))
        s_series.append(sigma(state))
        g_series.append(_safe_gini(state))
        if cfg.fit_protocol != "snapshot":
            snapshots.append(state.x)

    if cfg.fit_protocol == "snapshot":
        bg, pareto = _fit_pair(post_transient.x, cfg)
    elif cfg.fit_protocol == "per_iteration":
        pairs = [_fit_pair(x, cfg) for x in snapshots]
        bg = _average_fits([p[0] for p in pairs], "boltzmann_gibbs", cfg.beta_threshold)
        pareto = _average_fits([p[1] for p in pairs], "pareto", cfg.beta_threshold)
    else:
        bg, pareto = _fit_pair(np.concatenate(snapshots), cfg)

    gini_mean = float(np.nanmean(g_series)) if not np.all(np.isnan(g_series)) else None
    g_last = g_series[-1]
    temperature = None
    if bg is not None and bg.accepted and bg.exponent > 0:
        temperature = 1.0 / bg.exponent
    return CellSummary(
        a=a, r=r, divergent=False,
        h_snapshot=h_series[-1],
        h_mean=float(np.mean(h_series)),
        sigma_mean=float(np.mean(s_series)),
        gini_snapshot=None if np.isnan(g_last) else float(g_last),
        gini_mean=gini_mean,
        bg=bg, pareto=pareto,
        classification=_classify_optional(bg, pareto),
        temperature=temperature,
    )


def ensemble_cell(a: float, r: float, cfg: SweepConfig) -> CellSummary:
    """Average run_cell over cfg.realizations independent initial conditions."""
    if cfg.realizations == 1:
        return run_cell(a, r, cfg, realization=0)
    cells = [run_cell(a, r, cfg, realization=k) for k in range(cfg.realizations)]
    alive = [c for c in cells if not c.divergent]
    if not alive:
        return _divergent_summary(a, r)

    def avg(attr):
        vals = [getattr(c, attr) for c in alive if getattr(c, attr) is not None]
        return float(np.mean(vals)) if vals else None

    bg = _average_fits([c.bg for c in alive], "boltzmann_gibbs", cfg.beta_threshold)
    pareto = _average_fits([c.pareto for c in alive], "pareto", cfg.beta_threshold)
    temperature = None
    if bg is not None and bg.accepted and bg.exponent > 0:
        temperature = 1.0 / bg.exponent
    return CellSummary(
        a=a, r=r, divergent=False,
        h_snapshot=avg("h_snapshot"), h_mean=avg("h_mean"),
        sigma_mean=avg("sigma_mean"), gini_snapshot=avg("gini_snapshot"),
        gini_mean=avg("gini_mean"), bg=bg, pareto=pareto,
        classification=_classify_optional(bg, pareto),
        temperature=temperature,
    )


def grid_values(lo: float, hi: float, step_size: float) -> list[float]:
    """Inclusive arithmetic grid lo, lo+step, ..., <= hi (+ tiny slack)."""
    count = int(np.floor((hi - lo) / step_size + 1e-9)) + 1
    return [round(lo + i * step_size, 10) for i in range(count)]


def _cell_task(args):
    a, r, cfg = args
    return ensemble_cell(a, r, cfg)


def sweep(cfg: SweepConfig, threads: int = 1) -> list[CellSummary]:
    """Evaluate every grid cell; output sorted by (r, a) and independent
    of the execution schedule."""
    tasks = [(a, r, cfg)
             for r in grid_values(*cfg.r_range, cfg.grid_step)
             for a in grid_values(*cfg.a_range, cfg.grid_step)]
    if threads > 1 and len(tasks) > 1:
        with get_context("spawn").Pool(processes=threads) as pool:
            cells = pool.map(_cell_task, tasks)
    else:
        cells = [_cell_task(t) for t in tasks]
    return sorted(cells, key=lambda c: (c.r, c.a))


def scan_line(fixed: str, value: float, cfg: SweepConfig, threads: int = 1) -> list[CellSummary]:
    """1D sweep with one parameter pinned; fixed is 'a' or 'r'."""
    if fixed == "a":
        cfg = replace(cfg, a_range=(value, value))
    elif fixed == "r":
        cfg = replace(cfg, r_range=(value, value))
    else:
        raise ConfigurationError("fixed parameter must be 'a' or 'r'")
    return sweep(cfg, threads=threads)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _row(c: CellSummary) -> list[str]:
    return [
        _fmt(float(c.a)), _fmt(float(c.r)), _fmt(c.divergent),
        _fmt(c.h_snapshot), _fmt(c.h_mean), _fmt(c.sigma_mean),
        _fmt(c.gini_snapshot), _fmt(c.gini_mean),
        _fmt(c.bg.exponent if c.bg else None),
        _fmt(c.bg.beta if c.bg else None),
        _fmt(c.bg.accepted if c.bg else None),
        _fmt(c.pareto.exponent if c.pareto else None),
        _fmt(c.pareto.beta if c.pareto else None),
        _fmt(c.pareto.accepted if c.pareto else None),
        c.classification,
        _fmt(c.temperature),
    ]


def phase_table_to_csv(cells: list[CellSummary]) -> str:
    """Serialize a sweep table to the documented CSV schema (LF, UTF-8)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PHASE_CSV_HEADER)
    for c in cells:
        w.writerow(_row(c))
    return buf.getvalue()


def write_phase_csv(cells: list[CellSummary], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(phase_table_to_csv(cells))


def _parse_opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def read_phase_csv(path) -> list[CellSummary]:
    """Parse a phase-map CSV back into CellSummary records.

    Fit intercepts and point counts are not stored in the CSV; parsed
    records carry zero for those fields.
    """
    cells = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != PHASE_CSV_HEADER:
            raise ConfigurationError(f"unexpected phase CSV header: {reader.fieldnames}")
        for row in reader:
            bg = pareto = None
            if row["mu"] != "":
                bg = FitResult("boltzmann_gibbs", float(row["mu"]), 0.0,
                               float(row["beta_bg"]), row["bg_accepted"] == "true", 0)
            if row["alpha"] != "":
                pareto = FitResult("pareto", float(row["alpha"]), 0.0,
                                   float(row["beta_pareto"]),
                                   row["pareto_accepted"] == "true", 0)
            cells.append(CellSummary(
                a=float(row["a"]), r=float(row["r"]),
                divergent=row["divergent"] == "true",
                h_snapshot=_parse_opt_float(row["h_snapshot"]),
                h_mean=_parse_opt_float(row["h_mean"]),
                sigma_mean=_parse_opt_float(row["sigma_mean"]),
                gini_snapshot=_parse_opt_float(row["gini_snapshot"]),
                gini_mean=_parse_opt_float(row["gini_mean"]),
                bg=bg, pareto=pareto,
                classification=row["classification"],
                temperature=_parse_opt_float(row["temperature"]),
            ))
    return cells
