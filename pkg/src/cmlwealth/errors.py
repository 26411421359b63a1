"""Exception types shared across the package."""


class CMLWealthError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CMLWealthError, ValueError):
    """Invalid parameters, ranges, or CLI configuration."""


class DivergentStateError(CMLWealthError):
    """An observable was requested on a state flagged divergent."""


class UndefinedGiniError(CMLWealthError):
    """Gini coefficient requested on a state with zero total wealth."""


class InsufficientDataError(CMLWealthError):
    """Too few usable histogram bins to perform a fit."""


class UndefinedCorrelationError(CMLWealthError):
    """Pearson correlation requested on data with zero variance."""
