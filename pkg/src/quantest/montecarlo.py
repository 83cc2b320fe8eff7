"""Seeded variate generation and level/power simulations.

Every replication draws from its own generator, seeded by
``SeedSequence(seed, spawn_key=(delta_index, rep_index))``. Results depend
only on the configuration, never on how replications are split across
worker processes.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from quantest.core import Sample, TestConfig
from quantest.errors import DegenerateDensity, InputError, NonpositiveScale
from quantest.inference import median_test

THREADS_ENV = "QUANTEST_THREADS"

DEFAULT_DELTAS = tuple(round(0.025 * i, 10) for i in range(21))

_TWO53 = float(2**53)


class Family(str, enum.Enum):
    NORMAL = "normal"
    CAUCHY = "cauchy"


def polar_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` standard normal draws by Marsaglia's polar method.

    Pairs ``(u, v)`` uniform on the square ``(-1, 1)**2`` are kept when
    ``0 < s = u**2 + v**2 < 1`` and each yields two normals
    ``u * sqrt(-2 log s / s)`` and ``v * sqrt(-2 log s / s)``.
    """
    out = np.empty(n)
    filled = 0
    while filled < n:
        need_pairs = (n - filled + 1) // 2
        # acceptance rate is pi/4; oversample so one pass usually suffices
        m = int(need_pairs / 0.785) + 16
        u = 2.0 * rng.random(m) - 1.0
        v = 2.0 * rng.random(m) - 1.0
        s = u * u + v * v
        keep = (s > 0.0) & (s < 1.0)
        u, v, s = u[keep], v[keep], s[keep]
        factor = np.sqrt(-2.0 * np.log(s) / s)
        z = np.empty(2 * s.size)
        z[0::2] = u * factor
        z[1::2] = v * factor
        take = min(z.size, n - filled)
        out[filled : filled + take] = z[:take]
        filled += take
    return out


def open_uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms on the grid ``(j + 1/2) / 2**53``, so never exactly 0 or 1."""
    return (rng.integers(0, 2**53, size=n, dtype=np.int64) + 0.5) / _TWO53


def cauchy_inverse_cdf(u, x0: float = 0.0, gamma: float = 1.0):
    return x0 + gamma * np.tan(np.pi * (np.asarray(u, dtype=float) - 0.5))


def sample_normal(rng: np.random.Generator, mu: float, sigma: float, n: int, label: str = "") -> Sample:
    if not sigma > 0:
        raise NonpositiveScale(f"sigma must be positive, got {sigma}")
    return Sample(mu + sigma * polar_normals(rng, n), label=label or f"N({mu:g},{sigma:g})")


def sample_cauchy(rng: np.random.Generator, x0: float, gamma: float, n: int, label: str = "") -> Sample:
    if not gamma > 0:
        raise NonpositiveScale(f"gamma must be positive, got {gamma}")
    return Sample(
        cauchy_inverse_cdf(open_uniforms(rng, n), x0, gamma),
        label=label or f"C({x0:g},{gamma:g})",
    )


_SAMPLERS = {Family.NORMAL: sample_normal, Family.CAUCHY: sample_cauchy}


@dataclass(frozen=True)
class PowerConfig:
    family: Family = Family.NORMAL
    k: int = 2
    n: int = 1000
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    reps: int = 1000
    alpha: float = 0.05
    seed: int = 0
    test: TestConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if self.k < 2:
            raise InputError(f"k must be >= 2, got {self.k}")
        if self.n < 2:
            raise InputError(f"n must be >= 2, got {self.n}")
        if self.reps < 1:
            raise InputError(f"reps must be >= 1, got {self.reps}")
        if not self.deltas:
            raise InputError("deltas must not be empty")
        if any(b < a for a, b in zip(self.deltas, self.deltas[1:])):
            raise InputError("deltas must be nondecreasing")
        if not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.test is None:
            object.__setattr__(self, "test", TestConfig(alpha=self.alpha))
        elif self.test.alpha != self.alpha:
            raise InputError("alpha differs between PowerConfig and its TestConfig")


@dataclass(frozen=True)
class PowerPoint:
    """One point of a power curve.

    ``power`` is the rejection fraction among replications that completed;
    replications that failed with a degenerate density are counted in
    ``errors`` and excluded from both numerator and denominator.
    """

    delta: float
    power: float
    mc_stderr: float
    errors: int = 0
    reps: int = 0


def replication_rng(seed: int, delta_index: int, rep_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(delta_index, rep_index))
    return np.random.Generator(np.random.PCG64(ss))


def simulate_groups(config: PowerConfig, delta: float, rng: np.random.Generator) -> list[Sample]:
    """Group 1 centred at 0, groups 2..k centred at ``delta``, unit scale."""
    draw = _SAMPLERS[config.family]
    groups = [draw(rng, 0.0, 1.0, config.n, label="group1")]
    for g in range(2, config.k + 1):
        groups.append(draw(rng, delta, 1.0, config.n, label=f"group{g}"))
    return groups


def run_replication(config: PowerConfig, delta_index: int, rep_index: int):
    """Rejection decision for one replication, or ``None`` when degenerate."""
    rng = replication_rng(config.seed, delta_index, rep_index)
    groups = simulate_groups(config, config.deltas[delta_index], rng)
    try:
        return median_test(groups, config.test).reject
    except DegenerateDensity:
        return None


def _run_block(config: PowerConfig, delta_index: int, start: int, stop: int) -> list:
    return [run_replication(config, delta_index, r) for r in range(start, stop)]


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise InputError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise InputError(f"worker count must be >= 1, got {workers}")
    return workers


def _summarize(delta: float, outcomes: list) -> PowerPoint:
    errors = sum(o is None for o in outcomes)
    valid = len(outcomes) - errors
    if valid == 0:
        return PowerPoint(delta, math.nan, math.nan, errors, len(outcomes))
    power = sum(o is True for o in outcomes) / valid
    return PowerPoint(delta, power, math.sqrt(power * (1.0 - power) / valid), errors, len(outcomes))


def power_curve(config: PowerConfig, workers: int | None = None, block_size: int = 250) -> list[PowerPoint]:
    """Rejection rate of the test at each shift in ``config.deltas``.

    ``workers`` defaults to ``$QUANTEST_THREADS`` or the CPU count. Output
    is identical for any worker count.
    """
    workers = resolve_workers(workers)
    blocks = [
        (di, start, min(start + block_size, config.reps))
        for di in range(len(config.deltas))
        for start in range(0, config.reps, block_size)
    ]
    if workers == 1 or len(blocks) == 1:
        results = [_run_block(config, *b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, config, *b) for b in blocks]
            results = [f.result() for f in futures]

    per_delta: list[list] = [[] for _ in config.deltas]
    for (di, _, _), res in zip(blocks, results):
        per_delta[di].extend(res)
    return [_summarize(d, outs) for d, outs in zip(config.deltas, per_delta)]
