"""Figure rendering for wealth-lattice CSV outputs."""

from .figures import KINDS, render
from .schemas import (
    FITS_COLUMNS,
    HISTOGRAM_COLUMNS,
    PHASE_COLUMNS,
    SchemaError,
    read_fit,
    read_rows,
)

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "render",
    "SchemaError",
    "HISTOGRAM_COLUMNS",
    "FITS_COLUMNS",
    "PHASE_COLUMNS",
    "read_rows",
    "read_fit",
    "__version__",
]
