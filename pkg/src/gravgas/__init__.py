"""Exact evolution of self-gravitating pressureless gas in spherical and planar symmetry,
with independent Lagrangian oracles for cross-checking."""

from gravgas.errors import (
    BreakdownEvent,
    CollapseSingularity,
    ConfigError,
    DegenerateCrossing,
    DerivativeUnavailable,
    GravGasError,
    GridMismatch,
    NegativeDensity,
    NegativeRadicand,
    NoBracket,
    NonIntegrable,
    OutOfRange,
    SheetCrossing,
    ShellCrossing,
    StepFailure,
)
from gravgas.fields import FieldSnapshot, SlabState, SphericalState
from gravgas.lagrange_series import convergence_estimate, invert_series
from gravgas.profiles import CumulativeProfile, ProfileFunction, cumulative_mass, planar_g
from gravgas.slab import slab_state
from gravgas.spherical import cold_collapse_state, homogeneous_state, kepler_solve

__version__ = "0.1.0"

__all__ = [
    "BreakdownEvent", "CollapseSingularity", "ConfigError", "DegenerateCrossing",
    "DerivativeUnavailable", "GravGasError", "GridMismatch", "NegativeDensity", "NegativeRadicand",
    "NoBracket", "NonIntegrable", "OutOfRange", "SheetCrossing", "ShellCrossing", "StepFailure",
    "FieldSnapshot", "SlabState", "SphericalState", "CumulativeProfile", "ProfileFunction",
    "cumulative_mass", "planar_g", "slab_state", "cold_collapse_state", "homogeneous_state",
    "kepler_solve", "invert_series", "convergence_estimate",
]
