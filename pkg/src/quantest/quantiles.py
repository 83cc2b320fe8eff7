"""Sample quantiles, the empirical CDF and the Bahadur decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from quantest.core import QuantileSpec, Sample
from quantest.errors import NonpositiveDensity


def _level(spec) -> float:
    return spec.p if isinstance(spec, QuantileSpec) else QuantileSpec(float(spec)).p


def sample_quantile(sample: Sample, spec: QuantileSpec | float = 0.5) -> float:
    """Linear-interpolation quantile at 0-indexed position ``(n - 1) * p``.

    At p = 1/2 this is the middle order statistic for odd n and the midpoint
    of the two middle ones for even n.
    """
    p = _level(spec)
    x = sample.values
    pos = (x.size - 1) * p
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0.0:
        return float(x[lo])
    return float(x[lo] + frac * (x[lo + 1] - x[lo]))


def empirical_cdf(sample: Sample, x: float) -> float:
    """Fraction of observations ``<= x``."""
    return int(np.searchsorted(sample.values, x, side="right")) / sample.n


def bahadur_envelope(n: int) -> float:
    """``n**-3/4 * sqrt(log n) * (log log n)**(1/4)``, the a.s. order of the remainder.

    NaN for ``n < 3``, where ``log log n`` is not positive.
    """
    if n < 3:
        return math.nan
    log_n = math.log(n)
    return n ** -0.75 * math.sqrt(log_n) * math.log(log_n) ** 0.25


@dataclass(frozen=True)
class BahadurParts:
    linear_term: float
    remainder: float
    envelope: float
    estimate: float


def bahadur_decompose(
    sample: Sample,
    true_median: float,
    true_density_at_median: float,
    p: float = 0.5,
) -> BahadurParts:
    """Split ``estimate - truth`` into its linear ECDF term and the remainder.

    ``remainder`` is defined by subtraction, so
    ``truth + linear_term + remainder`` reproduces the estimate.
    """
    if not true_density_at_median > 0:
        raise NonpositiveDensity(
            f"density at the true quantile must be positive, got {true_density_at_median}"
        )
    estimate = sample_quantile(sample, p)
    linear = (p - empirical_cdf(sample, true_median)) / true_density_at_median
    remainder = estimate - true_median - linear
    return BahadurParts(
        linear_term=linear,
        remainder=remainder,
        envelope=bahadur_envelope(sample.n),
        estimate=estimate,
    )
