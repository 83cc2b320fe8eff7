"""Domain types shared by the rest of the package."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from quantest.errors import (
    InputError,
    InvalidProbability,
    NonFiniteValue,
    TooFewGroups,
    TooFewObservations,
)


class Kernel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"


class DispersionRule(str, enum.Enum):
    STDDEV = "stddev"
    ROBUST = "robust"


@dataclass(frozen=True, eq=False)
class Sample:
    """One group's observations, stored sorted ascending and read-only.

    Ties are kept. Construction fails on fewer than two observations or on
    any non-finite value.
    """

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 2:
            raise TooFewObservations(
                f"group {self.label!r} has {values.size} observation(s); at least 2 are required"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue(f"group {self.label!r} contains NaN or infinite values")
        values.sort()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.label, self.values.tobytes()))


@dataclass(frozen=True)
class QuantileSpec:
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise InvalidProbability(f"quantile level must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class TestConfig:
    """Settings for one run of the test.

    ``bandwidth_const`` multiplies ``dispersion * n**(-1/3)``; the exponent
    itself is fixed.
    """

    __test__ = False  # not a pytest class

    quantile: QuantileSpec = field(default_factory=QuantileSpec)
    alpha: float = 0.05
    kernel: Kernel = Kernel.GAUSSIAN
    bandwidth_const: float = 1.0
    dispersion_rule: DispersionRule = DispersionRule.ROBUST

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidProbability(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (math.isfinite(self.bandwidth_const) and self.bandwidth_const > 0):
            raise InputError(f"bandwidth_const must be positive, got {self.bandwidth_const}")
        object.__setattr__(self, "kernel", Kernel(self.kernel))
        object.__setattr__(self, "dispersion_rule", DispersionRule(self.dispersion_rule))
        if not isinstance(self.quantile, QuantileSpec):
            object.__setattr__(self, "quantile", QuantileSpec(float(self.quantile)))


@dataclass(frozen=True)
class TestOutcome:
    """Result of :func:`quantest.inference.median_test`.

    ``medians`` holds the sample p-quantiles; for the default p = 1/2 these
    are the sample medians.
    """

    __test__ = False

    statistic: float
    df: int
    p_value: float
    reject: bool
    critical_value: float
    medians: tuple[float, ...]
    density_at_median: tuple[float, ...]
    bandwidths: tuple[float, ...]
    lambda_hat: tuple[float, ...]


def validate_samples(samples: Sequence[Sample]) -> list[Sample]:
    """Check that ``samples`` can enter the test and return them as a list.

    Raw arrays are accepted and wrapped into :class:`Sample` objects labelled
    by position.
    """
    checked = []
    for i, s in enumerate(samples):
        if not isinstance(s, Sample):
            s = Sample(s, label=f"group{i + 1}")
        checked.append(s)
    if len(checked) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(checked)}")
    return checked
