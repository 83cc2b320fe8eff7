"""Consistent k-sample test for equality of medians and other quantiles."""

from quantest.core import (
    DispersionRule,
    Kernel,
    QuantileSpec,
    Sample,
    TestConfig,
    TestOutcome,
    validate_samples,
)
from quantest.errors import DegenerateDensity, InputError, NumericalError, QuantestError
from quantest.inference import (
    ErrorBoundTerms,
    GroupTruth,
    SigmaHat,
    error_bound_terms,
    estimate_sigma_hat,
    median_test,
)
from quantest.montecarlo import Family, PowerConfig, PowerPoint, power_curve

__all__ = [
    "DegenerateDensity",
    "DispersionRule",
    "ErrorBoundTerms",
    "Family",
    "GroupTruth",
    "InputError",
    "Kernel",
    "NumericalError",
    "PowerConfig",
    "PowerPoint",
    "QuantestError",
    "QuantileSpec",
    "Sample",
    "SigmaHat",
    "TestConfig",
    "TestOutcome",
    "error_bound_terms",
    "estimate_sigma_hat",
    "median_test",
    "power_curve",
    "validate_samples",
]

__version__ = "0.1.0"
