"""Empirical wealth histograms and the two least-squares distribution fits.

The exponential family is fit as a straight line in semilog coordinates
(ln density vs. bin center), the power-law family in log-log coordinates
(ln density vs. ln bin center). A fit is accepted when the Pearson
correlation of the linearized points satisfies |beta| > threshold and
enough bins contributed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    InsufficientDataError,
    UndefinedCorrelationError,
)

BETA_THRESHOLD = 0.96
MIN_FIT_POINTS = 5
MIN_BIN_COUNT = 5
BG_BINS = 60
PARETO_BINS = 25
# Power-law fits only make sense above a lower wealth cutoff: the stationary
# states pile up astronomically close to zero (down to ~1e-70) and a fit over
# that whole range measures the near-zero pileup, not the tail. 1.5 was
# calibrated so the exponential phase stays below the acceptance gate while
# the power-law phase reproduces tail exponents near 2.8.
PARETO_FIT_LO = 1.5

HISTOGRAM_CSV_HEADER = ["bin_lo", "bin_hi", "bin_center", "count", "density"]


@dataclass(frozen=True)
class Histogram:
    """Binned, normalized density estimate of the wealth distribution.

    For the logarithmic scheme bin centers are geometric midpoints;
    samples at or below zero (or below the range) are dropped and counted
    in `dropped`.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    scheme: str
    dropped: int = 0

    @property
    def centers(self) -> np.ndarray:
        if self.scheme == "logarithmic":
            return np.sqrt(self.edges[:-1] * self.edges[1:])
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


@dataclass(frozen=True)
class FitResult:
    """Outcome of one linearized least-squares fit.

    `exponent` is the decay rate mu for the exponential family or the
    power-law index alpha, both reported positive for decaying densities.
    `beta` is the Pearson correlation of the linearized points, kept with
    its sign; acceptance uses |beta|.
    """

    family: str
    exponent: float
    intercept: float
    beta: float
    accepted: bool
    points_used: int


def build_histogram(samples, scheme: str, bins: int,
                    range: tuple[float, float] | None = None) -> Histogram:
    """Bin samples with equal-width (linear) or equal-log-width bins.

    Density is normalized so that it integrates to one over the retained
    samples. Linear default range is [0, max]; logarithmic default range
    is [min positive sample, max], and samples below the lower edge are
    dropped (reported in Histogram.dropped).
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ConfigurationError("cannot histogram an empty sample")
    if bins < 2:
        raise ConfigurationError("need at least 2 bins")
    if scheme not in ("linear", "logarithmic"):
        raise ConfigurationError(f"unknown binning scheme {scheme!r}")
    if range is not None and not (range[0] < range[1]):
        raise ConfigurationError(f"invalid histogram range {range}")

    if scheme == "linear":
        lo, hi = range if range is not None else (0.0, float(x.max()))
        if hi <= lo:
            raise ConfigurationError("degenerate histogram range")
        edges = np.linspace(lo, hi, bins + 1)
    else:
        if range is not None:
            lo, hi = range
        else:
            pos = x[x > 0]
            if pos.size == 0:
                raise ConfigurationError("no positive samples for logarithmic binning")
            lo, hi = float(pos.min()), float(pos.max())
        if lo <= 0:
            raise ConfigurationError("logarithmic binning requires a positive lower edge")
        if hi <= lo:
            raise ConfigurationError("degenerate histogram range")
        edges = np.geomspace(lo, hi, bins + 1)

    kept = x[(x >= edges[0]) & (x <= edges[-1])]
    counts, _ = np.histogram(kept, bins=edges)
    total = counts.sum()
    widths = np.diff(edges)
    density = counts / (total * widths) if total > 0 else np.zeros_like(widths)
    return Histogram(edges=edges, counts=counts, density=density,
                     scheme=scheme, dropped=int(x.size - kept.size))


def pearson(xs, ys) -> float:
    """Product-moment correlation of two equal-length vectors."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise ConfigurationError("pearson needs two equal-length vectors of size >= 2")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    vx = np.dot(dx, dx)
    vy = np.dot(dy, dy)
    if vx == 0 or vy == 0:
        raise UndefinedCorrelationError("correlation undefined: zero variance")
    return float(np.dot(dx, dy) / np.sqrt(vx * vy))


def _fit_points(h: Histogram, fit_range, min_count: int, log_x: bool):
    centers = h.centers
    mask = h.counts >= max(min_count, 1)
    if fit_range is not None:
        mask &= (centers >= fit_range[0]) & (centers <= fit_range[1])
    if log_x:
        mask &= centers > 0
    return centers[mask], h.density[mask]


def _linear_fit(X, Y, family: str, min_points: int, threshold: float) -> FitResult:
    if len(X) < min_points:
        raise InsufficientDataError(
            f"{family} fit needs >= {min_points} usable bins, got {len(X)}")
    slope, intercept = np.polyfit(X, Y, 1)
    beta = pearson(X, Y)
    return FitResult(
        family=family,
        exponent=float(-slope),
        intercept=float(intercept),
        beta=beta,
        accepted=abs(beta) > threshold and len(X) >= min_points,
        points_used=int(len(X)),
    )


def fit_semilog(h: Histogram, fit_range: tuple[float, float] | None = None, *,
                min_count: int = MIN_BIN_COUNT, min_points: int = MIN_FIT_POINTS,
                beta_threshold: float = BETA_THRESHOLD) -> FitResult:
    """Least squares of ln(density) against bin center.

    A density ~ exp(-mu x) yields exponent mu (positive for decay).
    """
    c, d = _fit_points(h, fit_range, min_count, log_x=False)
    keep = d > 0
    return _linear_fit(c[keep], np.log(d[keep]), "boltzmann_gibbs",
                       min_points, beta_threshold)


def fit_loglog(h: Histogram, fit_range: tuple[float, float] | None = None, *,
               min_count: int = MIN_BIN_COUNT, min_points: int = MIN_FIT_POINTS,
               beta_threshold: float = BETA_THRESHOLD) -> FitResult:
    """Least squares of ln(density) against ln(bin center).

    A density ~ x**(-alpha) yields exponent alpha.
    """
    c, d = _fit_points(h, fit_range, min_count, log_x=True)
    keep = d > 0
    return _linear_fit(np.log(c[keep]), np.log(d[keep]), "pareto",
                       min_points, beta_threshold)


def classify(bg: FitResult, p: FitResult) -> str:
    """Which fit families pass the acceptance gate for one pooled sample."""
    if bg.accepted and p.accepted:
        return "both"
    if bg.accepted:
        return "boltzmann_gibbs"
    if p.accepted:
        return "pareto"
    return "neither"


def histogram_to_csv(h: Histogram) -> str:
    """Serialize a histogram to the documented CSV schema (LF, UTF-8)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HISTOGRAM_CSV_HEADER)
    centers = h.centers
    for i in range(len(h.counts)):
        w.writerow([repr(float(h.edges[i])), repr(float(h.edges[i + 1])),
                    repr(float(centers[i])), int(h.counts[i]),
                    repr(float(h.density[i]))])
    return buf.getvalue()


def write_histogram_csv(h: Histogram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(histogram_to_csv(h))
