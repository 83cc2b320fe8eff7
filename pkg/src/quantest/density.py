"""Kernel density estimation with an ``n**(-1/3)`` bandwidth schedule.

Both kernels are bounded, Lipschitz probability densities with a finite
first absolute moment:

============  =======================  ==================
kernel        Lipschitz constant       E|U|
============  =======================  ==================
gaussian      1/sqrt(2*pi*e) ~ 0.242   sqrt(2/pi) ~ 0.798
epanechnikov  1.5                      3/8
============  =======================  ==================
"""

from __future__ import annotations

import math

import numpy as np

from quantest.core import DispersionRule, Kernel, Sample, TestConfig
from quantest.errors import ZeroDispersion
from quantest.quantiles import sample_quantile

BANDWIDTH_EXPONENT = -1.0 / 3.0
IQR_TO_SD = 1.349

LIPSCHITZ = {
    Kernel.GAUSSIAN: 1.0 / math.sqrt(2.0 * math.pi * math.e),
    Kernel.EPANECHNIKOV: 1.5,
}

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def kernel_eval(kernel: Kernel | str, u):
    """Evaluate the kernel at ``u`` (scalar or array)."""
    kernel = Kernel(kernel)
    u = np.asarray(u, dtype=float)
    if kernel is Kernel.GAUSSIAN:
        out = _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    else:
        out = np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)
    return float(out) if out.ndim == 0 else out


def dispersion_estimate(sample: Sample, rule: DispersionRule | str = DispersionRule.ROBUST) -> float:
    """Scale used to size the bandwidth.

    ``robust`` is ``min(sd, IQR / 1.349)``; when the IQR collapses to zero
    because of ties, the standard deviation is used alone.
    """
    rule = DispersionRule(rule)
    sd = float(np.std(sample.values, ddof=1))
    if not sd > 0:
        raise ZeroDispersion(f"group {sample.label!r} has all values equal")
    if rule is DispersionRule.STDDEV:
        return sd
    iqr = sample_quantile(sample, 0.75) - sample_quantile(sample, 0.25)
    if iqr > 0:
        return min(sd, iqr / IQR_TO_SD)
    return sd


def select_bandwidth(n: int, config: TestConfig, dispersion: float) -> float:
    """``bandwidth_const * dispersion * n**(-1/3)``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not dispersion > 0:
        raise ZeroDispersion(f"dispersion must be positive, got {dispersion}")
    return config.bandwidth_const * dispersion * n ** BANDWIDTH_EXPONENT


def kde_evaluate(sample: Sample | np.ndarray, b: float, kernel: Kernel | str, x):
    """Kernel density estimate ``(1/(n b)) * sum K((x - X_j) / b)``.

    ``x`` may be a scalar or an array of query points. ``sample`` may be a
    :class:`Sample` or any 1-D array of observations.
    """
    values = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float).ravel()
    if not b > 0:
        raise ValueError(f"bandwidth must be positive, got {b}")
    xq = np.asarray(x, dtype=float)
    u = (xq[..., None] - values) / b
    dens = np.sum(kernel_eval(kernel, u), axis=-1) / (values.size * b)
    return float(dens) if dens.ndim == 0 else dens


def sup_error_rate(n: int, b: float) -> float:
    """``sqrt(log n / (n b))``, the almost-sure sup-norm rate of the KDE on compacts."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.sqrt(math.log(n) / (n * b))
