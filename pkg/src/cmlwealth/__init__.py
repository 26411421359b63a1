"""Deterministic wealth-exchange lattice simulator and analysis toolkit.

A ring of agents evolves under a growth map moderated by the average
wealth of each agent's two neighbors. Depending on the growth capacity r
and the environmental-pressure coupling a, the stationary wealth
distribution is exponential (Boltzmann-Gibbs-like) or a power law
(Pareto-like). This package simulates the lattice, measures mean wealth,
dispersion and the Gini coefficient, fits both distribution families,
and sweeps the (a, r) parameter plane into phase-map tables.
"""

__version__ = "0.1.0"

RNG_IDENTITY = "numpy.random.PCG64 seeded via numpy.random.SeedSequence"

from .errors import (
    CMLWealthError,
    ConfigurationError,
    DivergentStateError,
    InsufficientDataError,
    UndefinedGiniError,
    UndefinedCorrelationError,
)
from .lattice import ModelParams, InitSpec, LatticeState, init_state, local_field, step, run
from .measures import (
    ObservableSeries,
    mean_field,
    sigma,
    gini,
    gini_bruteforce,
    time_average,
)
from .fitting import (
    Histogram,
    FitResult,
    build_histogram,
    fit_semilog,
    fit_loglog,
    classify,
    pearson,
)
from .sweep import SweepConfig, CellSummary, run_cell, ensemble_cell, sweep, scan_line
