"""Scalar observables of a lattice state: mean wealth, dispersion, Gini."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergentStateError, UndefinedGiniError
from .lattice import LatticeState

OBSERVABLE_LABELS = ("mean_field", "sigma", "gini")


@dataclass(frozen=True)
class ObservableSeries:
    """One observable sampled at successive measurement steps."""

    values: np.ndarray
    label: str

    def __post_init__(self):
        if self.label not in OBSERVABLE_LABELS:
            raise ConfigurationError(f"unknown observable label {self.label!r}")


def _check(state: LatticeState) -> np.ndarray:
    if state.divergent:
        raise DivergentStateError("observable requested on a divergent state")
    return state.x


def mean_field(state: LatticeState) -> float:
    """Average wealth per agent."""
    return float(np.mean(_check(state)))


def sigma(state: LatticeState) -> float:
    """Population standard deviation (divide-by-N) of the wealths."""
    return float(np.std(_check(state)))


def gini(state: LatticeState) -> float:
    """Gini coefficient via the sorted-rank formula, O(N log N).

    Equals the normalized mean absolute pairwise difference
    sum_ij |x_i - x_j| / (2 N^2 H).
    """
    x = _check(state)
    total = x.sum()
    if total <= 0:
        raise UndefinedGiniError("Gini undefined: total wealth is zero")
    n = len(x)
    s = np.sort(x)
    ranks = 2.0 * np.arange(1, n + 1) - n - 1
    return float(np.dot(ranks, s) / (n * total))


def gini_bruteforce(state: LatticeState) -> float:
    """Literal O(N^2) double-sum Gini; test oracle for `gini`."""
    x = _check(state)
    total = x.sum()
    if total <= 0:
        raise UndefinedGiniError("Gini undefined: total wealth is zero")
    n = len(x)
    pair = np.abs(x[:, None] - x[None, :]).sum()
    h = total / n
    return float(pair / (2.0 * n * n * h))


def time_average(series: ObservableSeries) -> float:
    """Arithmetic mean of the sampled values."""
    if len(series.values) == 0:
        raise ConfigurationError("cannot average an empty series")
    return float(np.mean(series.values))
