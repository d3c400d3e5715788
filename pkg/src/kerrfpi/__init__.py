"""Stationary states, spectra and bistability of a few-photon Kerr cavity."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    InvalidParameterError,
    KerrFPIError,
    MonochromaticInputError,
    QuadratureError,
    SolverError,
)
from .feasibility import KerrMediumSpec, bistability_feasible, min_tilde_n2
from .params import NormalizedParams, PhysicalParams, derive_rates, normalize
from .stationary import (
    BistabilityBoundary,
    StationaryState,
    bistability_boundary,
    onset_power,
    stationary_photon_numbers,
)
from .sweep import sweep

__all__ = [
    "__version__",
    "BistabilityBoundary",
    "ConfigurationError",
    "InvalidParameterError",
    "KerrFPIError",
    "KerrMediumSpec",
    "MonochromaticInputError",
    "NormalizedParams",
    "PhysicalParams",
    "QuadratureError",
    "SolverError",
    "StationaryState",
    "bistability_boundary",
    "bistability_feasible",
    "derive_rates",
    "min_tilde_n2",
    "normalize",
    "onset_power",
    "stationary_photon_numbers",
    "sweep",
]
