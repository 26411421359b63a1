"""Synchronous growth dynamics on a 1D periodic lattice of agents.

Each agent i holds a nonnegative wealth x[i]. One update is

    x'[i] = r[i] * x[i] * exp(-|x[i] - a[i] * psi[i]|)
    psi[i] = (x[i-1] + x[i+1]) / 2      (periodic indices)

applied to all sites simultaneously from the same time-t snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

# Any site above this (or any non-finite site) marks the whole state divergent.
DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class ModelParams:
    """Lattice size and the two dynamical parameters.

    r and a may be scalars (homogeneous system, the default and the only
    configuration exercised by the test suite) or per-agent vectors of
    length n.
    """

    n: int
    r: float | np.ndarray
    a: float | np.ndarray

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 3:
            raise ConfigurationError(f"lattice size must be an integer >= 3, got {self.n}")
        r = np.asarray(self.r, dtype=float)
        a = np.asarray(self.a, dtype=float)
        for name, v in (("r", r), ("a", a)):
            if v.ndim not in (0, 1):
                raise ConfigurationError(f"{name} must be a scalar or 1-D vector")
            if v.ndim == 1 and len(v) != self.n:
                raise ConfigurationError(f"vector {name} must have length n={self.n}, got {len(v)}")
        if np.any(r <= 0):
            raise ConfigurationError("r must be positive")
        if np.any(a < 0):
            raise ConfigurationError("a must be nonnegative")

    def r_array(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.r, dtype=float), (self.n,))

    def a_array(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.a, dtype=float), (self.n,))


@dataclass(frozen=True)
class InitSpec:
    """Uniform initial-condition range [lo, hi) and the RNG seed."""

    lo: float = 1.0
    hi: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ConfigurationError(f"require 0 <= lo < hi, got [{self.lo}, {self.hi})")


@dataclass(frozen=True)
class LatticeState:
    """Wealth vector at a given step. Instances are never mutated in place."""

    x: np.ndarray
    t: int = 0
    divergent: bool = False

    @property
    def n(self) -> int:
        return len(self.x)


def init_state(n: int, spec: InitSpec) -> LatticeState:
    """Draw n i.i.d. wealths uniform on [lo, hi) from a seeded PCG64 stream.

    Identical (n, spec) arguments yield bit-identical states.
    """
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise ConfigurationError(f"lattice size must be an integer >= 3, got {n}")
    seq = spec.seed if isinstance(spec.seed, np.random.SeedSequence) else np.random.SeedSequence(spec.seed)
    rng = np.random.Generator(np.random.PCG64(seq))
    x = rng.uniform(spec.lo, spec.hi, int(n))
    return LatticeState(x=x, t=0)


def local_field(state: LatticeState, i: int) -> float:
    """Average wealth of site i's two ring neighbors."""
    x = state.x
    n = len(x)
    return 0.5 * (x[(i - 1) % n] + x[(i + 1) % n])


def _neighbor_mean(x: np.ndarray) -> np.ndarray:
    return 0.5 * (np.roll(x, 1) + np.roll(x, -1))


def step(state: LatticeState, params: ModelParams) -> LatticeState:
    """One fully synchronous update; all neighbor fields are read from
    the input state before any site is written.

    If any updated site is non-finite or exceeds DIVERGENCE_THRESHOLD the
    returned state carries divergent=True.
    """
    if len(state.x) != params.n:
        raise ConfigurationError(f"state has {len(state.x)} sites, params expect {params.n}")
    x = state.x
    psi = _neighbor_mean(x)
    r = np.asarray(params.r, dtype=float)
    a = np.asarray(params.a, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        nxt = r * x * np.exp(-np.abs(x - a * psi))
    bad = not np.all(np.isfinite(nxt)) or bool(np.any(nxt > DIVERGENCE_THRESHOLD))
    return LatticeState(x=nxt, t=state.t + 1, divergent=bad)


def run(state: LatticeState, params: ModelParams, steps: int) -> LatticeState:
    """Apply `step` exactly `steps` times, returning early on divergence."""
    if steps < 0:
        raise ConfigurationError("step count must be nonnegative")
    cur = state
    for _ in range(steps):
        cur = step(cur, params)
        if cur.divergent:
            return cur
    return cur
