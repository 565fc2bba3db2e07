"""Invariants of holomorphic and antiholomorphic parabolic germs."""
from germforge.series import (
    ANTIHOLOMORPHIC,
    HOLOMORPHIC,
    SeriesError,
    TruncatedSeries,
    compose,
    conjugate_by,
    invert,
    residue_iteratif,
    series_arith,
)

__all__ = [
    "ANTIHOLOMORPHIC",
    "HOLOMORPHIC",
    "SeriesError",
    "TruncatedSeries",
    "compose",
    "conjugate_by",
    "invert",
    "residue_iteratif",
    "series_arith",
]

__version__ = "0.1.0"
