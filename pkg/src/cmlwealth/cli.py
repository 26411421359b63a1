"""Command-line surface: simulate one cell, sweep the plane, scan a line.

All randomness flows from a single --seed; when omitted a seed is drawn
from the OS entropy pool, printed, and recorded in the run manifest so
the run stays reproducible after the fact.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import secrets
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import RNG_IDENTITY, __version__
from .errors import CMLWealthError, ConfigurationError
from .fitting import build_histogram, write_histogram_csv
from .sweep import (
    SweepConfig,
    apply_preset,
    apply_profile,
    run_cell,
    cell_seed_sequence,
    scan_line,
    sweep,
    write_phase_csv,
)
from .lattice import InitSpec, ModelParams, init_state, step
from .measures import gini, mean_field, sigma

THREADS_ENV_VAR = "CML_ECONO_THREADS"


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, cfg: SweepConfig, files: list[Path],
                    started: str, extra: dict | None = None) -> Path:
    manifest = {
        "code_version": __version__,
        "rng_identity": RNG_IDENTITY,
        "config": dataclasses.asdict(cfg),
        "started": started,
        "finished": _now(),
        "output_files": [
            {"path": f.name, "sha256": _sha256(f)} for f in sorted(files)
        ],
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(63)
    print(f"seed not given; using randomly drawn seed {seed}")
    return seed


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(THREADS_ENV_VAR)
    return int(env) if env else 1


def _fit_json(f) -> dict | None:
    return None if f is None else dataclasses.asdict(f)


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    cfg = SweepConfig(
        a_range=(args.a, args.a), r_range=(args.r, args.r),
        n=args.n, transient=args.transient, window=args.window,
        master_seed=seed,
        fit_protocol="snapshot" if args.snapshot_only else "pooled",
    )

    if args.init_const is not None:
        summary = _simulate_const_init(args, cfg)
    else:
        summary = run_cell(args.a, args.r, cfg)

    files = []
    if summary.divergent:
        print(f"a={args.a} r={args.r}: divergent")
    else:
        files += _write_simulate_outputs(args, cfg, out_dir)
        exp = _describe_fit(summary)
        print(f"a={args.a} r={args.r}: classification={summary.classification} {exp}")

    fits_path = out_dir / "fits.json"
    with open(fits_path, "w", encoding="utf-8") as f:
        json.dump({
            "a": args.a, "r": args.r, "divergent": summary.divergent,
            "classification": summary.classification,
            "boltzmann_gibbs": _fit_json(summary.bg),
            "pareto": _fit_json(summary.pareto),
            "h_snapshot": summary.h_snapshot,
            "h_mean": summary.h_mean,
            "sigma_mean": summary.sigma_mean,
            "gini_snapshot": summary.gini_snapshot,
            "gini_mean": summary.gini_mean,
            "temperature": summary.temperature,
        }, f, indent=2)
        f.write("\n")
    files.append(fits_path)
    files.append(_write_fits_csv(summary, out_dir))
    _write_manifest(out_dir, cfg, files, started)
    return 0


def _write_fits_csv(summary, out_dir: Path) -> Path:
    """Tabular twin of fits.json, for plotting tools that only read CSV."""
    path = out_dir / "fits.csv"
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("family,exponent,intercept,beta,accepted,points_used\n")
        for family, fit in (("boltzmann_gibbs", summary.bg), ("pareto", summary.pareto)):
            if fit is None:
                continue
            acc = "true" if fit.accepted else "false"
            f.write(f"{family},{fit.exponent!r},{fit.intercept!r},"
                    f"{fit.beta!r},{acc},{fit.points_used}\n")
    return path


def _describe_fit(summary) -> str:
    parts = []
    if summary.bg is not None:
        parts.append(f"mu={summary.bg.exponent:.4f} beta_bg={summary.bg.beta:.4f}")
    if summary.pareto is not None:
        parts.append(f"alpha={summary.pareto.exponent:.4f} beta_pareto={summary.pareto.beta:.4f}")
    return " ".join(parts) if parts else "no usable fits"


def _simulate_const_init(args, cfg: SweepConfig):
    """Constant initial profile, used to exercise divergence paths."""
    from .sweep import CellSummary, _fit_pair, _divergent_summary

    params = ModelParams(n=args.n, r=args.r, a=args.a)
    x = np.full(args.n, float(args.init_const))
    state = init_state(args.n, InitSpec(lo=0, hi=1, seed=cfg.master_seed))
    state = dataclasses.replace(state, x=x)
    for _ in range(args.transient + args.window):
        state = step(state, params)
        if state.divergent:
            return _divergent_summary(args.a, args.r)
    bg, pareto = _fit_pair(state.x, cfg)
    from .sweep import _classify_optional
    return CellSummary(a=args.a, r=args.r, divergent=False,
                       h_snapshot=mean_field(state), h_mean=mean_field(state),
                       sigma_mean=sigma(state), bg=bg, pareto=pareto,
                       classification=_classify_optional(bg, pareto))


def _write_simulate_outputs(args, cfg: SweepConfig, out_dir: Path) -> list[Path]:
    """Re-run the trajectory to dump histograms and the observable series.

    Deterministic seeding makes the re-run identical to the fit run.
    """
    params = ModelParams(n=cfg.n, r=args.r, a=args.a)
    seq = cell_seed_sequence(cfg.master_seed, args.a, args.r, 0)
    state = init_state(cfg.n, InitSpec(lo=cfg.init_lo, hi=cfg.init_hi, seed=seq))
    for _ in range(cfg.transient):
        state = step(state, params)
    post = state
    rows = []
    snaps = []
    for _ in range(cfg.window):
        state = step(state, params)
        try:
            g = gini(state)
        except CMLWealthError:
            g = float("nan")
        rows.append((state.t, mean_field(state), sigma(state), g))
        snaps.append(state.x)
    samples = post.x if args.snapshot_only else np.concatenate(snaps)

    files = []
    h_lin = build_histogram(samples, "linear", cfg.bg_bins)
    p = out_dir / "histogram_bg.csv"
    write_histogram_csv(h_lin, p)
    files.append(p)
    mx = float(np.max(samples))
    if mx > cfg.pareto_fit_lo:
        h_log = build_histogram(samples, "logarithmic", cfg.pareto_bins,
                                range=(cfg.pareto_fit_lo, mx))
        p = out_dir / "histogram_pareto.csv"
        write_histogram_csv(h_log, p)
        files.append(p)
    p = out_dir / "series.csv"
    with open(p, "w", encoding="utf-8", newline="") as f:
        f.write("t,mean_field,sigma,gini\n")
        for t, h, s, g in rows:
            gtxt = "" if np.isnan(g) else repr(g)
            f.write(f"{t},{h!r},{s!r},{gtxt}\n")
    files.append(p)
    return files


def _sweep_config_from_args(args, seed: int) -> SweepConfig:
    cfg = SweepConfig(
        a_range=tuple(args.a), r_range=tuple(args.r),
        n=args.n, transient=args.transient,
        window=args.window, master_seed=seed,
    )
    cfg = apply_profile(cfg, args.profile)
    if args.step is not None:
        cfg = dataclasses.replace(cfg, grid_step=args.step)
    if args.preset:
        cfg = apply_preset(cfg, args.preset)
    return cfg


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    threads = _resolve_threads(args.threads)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    cfg = _sweep_config_from_args(args, seed)
    cells = sweep(cfg, threads=threads)
    path = out_dir / "phase_map.csv"
    write_phase_csv(cells, path)
    _write_manifest(out_dir, cfg, [path], started)
    n_div = sum(c.divergent for c in cells)
    print(f"wrote {path} ({len(cells)} cells, {n_div} divergent)")
    return 0


def cmd_scan(args) -> int:
    seed = _resolve_seed(args)
    threads = _resolve_threads(args.threads)
    try:
        name, _, raw = args.fix.partition("=")
        fixed_value = float(raw)
    except ValueError:
        raise ConfigurationError(f"--fix expects a=VALUE or r=VALUE, got {args.fix!r}")
    if name not in ("a", "r"):
        raise ConfigurationError(f"--fix expects a=VALUE or r=VALUE, got {args.fix!r}")
    if args.range[0] > args.range[1]:
        raise ConfigurationError("scan range is empty")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    free_range = tuple(args.range)
    cfg = SweepConfig(
        a_range=free_range if name == "r" else (0.0, 0.0),
        r_range=free_range if name == "a" else (1.0, 1.0),
        n=args.n, transient=args.transient, window=args.window,
        master_seed=seed,
    )
    cfg = apply_profile(cfg, args.profile)
    if args.step is not None:
        cfg = dataclasses.replace(cfg, grid_step=args.step)
    if args.preset:
        cfg = apply_preset(cfg, args.preset)
    cells = scan_line(name, fixed_value, cfg, threads=threads)
    path = out_dir / "scan.csv"
    write_phase_csv(cells, path)
    _write_manifest(out_dir, cfg, [path], started)
    print(f"wrote {path} ({len(cells)} cells)")
    return 0


def _add_common_sim_flags(p, n_default=100_000, transient_default=10_000):
    p.add_argument("--n", type=int, default=n_default, help="lattice size")
    p.add_argument("--transient", type=int, default=transient_default,
                   help="discarded iterations before measuring")
    p.add_argument("--window", type=int, default=100,
                   help="measurement iterations after the transient")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--out-dir", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmlwealth",
        description="Deterministic wealth-lattice simulations and phase maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one (a, r) cell and dump its outputs")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--snapshot-only", action="store_true",
                   help="fit the single post-transient snapshot instead of pooled window samples")
    p.add_argument("--init-const", type=float, default=None,
                   help="start every agent at this constant wealth")
    _add_common_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="evaluate an (a, r) grid into a phase-map CSV")
    p.add_argument("--a", type=float, nargs=2, default=[0.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--r", type=float, nargs=2, default=[1.0, 10.0], metavar=("LO", "HI"))
    p.add_argument("--step", type=float, default=None, help="grid step (default 0.02, desk 0.1)")
    p.add_argument("--preset", choices=["fig2", "fig3", "fig4", "fig5"], default=None)
    p.add_argument("--profile", choices=["full", "desk"], default="full")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default ${THREADS_ENV_VAR} or 1)")
    _add_common_sim_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scan", help="1D scan with one parameter fixed")
    p.add_argument("--fix", required=True, help="a=VALUE or r=VALUE")
    p.add_argument("--range", type=float, nargs=2, default=[0.0, 2.0], metavar=("LO", "HI"),
                   help="range of the free parameter")
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--preset", choices=["fig2", "fig3", "fig4", "fig5"], default=None)
    p.add_argument("--profile", choices=["full", "desk"], default="full")
    p.add_argument("--threads", type=int, default=None)
    _add_common_sim_flags(p)
    p.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
