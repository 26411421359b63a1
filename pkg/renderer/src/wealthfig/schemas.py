"""CSV schema definitions and strict readers.

The renderer is a pure view over the simulator's CSV outputs; these
readers validate headers up front so a malformed file fails with a
message naming the offending column instead of a plot of garbage.
"""

from __future__ import annotations

import csv
from pathlib import Path

HISTOGRAM_COLUMNS = ("bin_lo", "bin_hi", "bin_center", "count", "density")
FITS_COLUMNS = ("family", "exponent", "intercept", "beta", "accepted", "points_used")
PHASE_COLUMNS = (
    "a", "r", "divergent", "h_snapshot", "h_mean", "sigma_mean",
    "gini_snapshot", "gini_mean", "mu", "beta_bg", "bg_accepted",
    "alpha", "beta_pareto", "pareto_accepted", "classification", "temperature",
)


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


def parse_float(text: str) -> float | None:
    # empty field means "not computed" (divergent or rejected cell)
    return float(text) if text else None


def parse_bool(text: str) -> bool | None:
    if text == "true":
        return True
    if text == "false":
        return False
    return None


def read_rows(path: str | Path, required: tuple[str, ...]) -> list[dict[str, str]]:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(
                    f"{path.name}: missing required column '{col}' "
                    f"(expected header: {','.join(required)})"
                )
        return list(reader)


def read_fit(path: str | Path, family: str) -> dict | None:
    """Return the fit row for one family, with numeric fields parsed."""
    for row in read_rows(path, FITS_COLUMNS):
        if row["family"] == family:
            return {
                "family": family,
                "exponent": parse_float(row["exponent"]),
                "intercept": parse_float(row["intercept"]),
                "beta": parse_float(row["beta"]),
                "accepted": parse_bool(row["accepted"]),
            }
    return None
