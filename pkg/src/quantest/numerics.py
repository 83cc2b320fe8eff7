"""Chi-square distribution functions and SPD tridiagonal algebra.

The incomplete gamma routines follow the usual split: power series below
``x = a + 1`` and a modified-Lentz continued fraction above it.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from quantest.errors import (
    ConvergenceError,
    InputError,
    InvalidProbability,
    NegativeInput,
    NonpositiveVariance,
    NotPositiveDefinite,
)

MAX_ITER = 300
TERM_TOL = 1e-14
PIVOT_FLOOR = 1e-300
_TINY = sys.float_info.min / sys.float_info.epsilon


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _gamma_series(a: float, x: float) -> float:
    # lower regularized P(a, x), valid for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * TERM_TOL:
            return total * math.exp(_log_prefactor(a, x))
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_contfrac(a: float, x: float) -> float:
    # upper regularized Q(a, x), valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < TERM_TOL:
            return math.exp(_log_prefactor(a, x)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _check_args(x: float, df: int) -> None:
    if df < 1 or int(df) != df:
        raise InputError(f"degrees of freedom must be a positive integer, got {df}")
    if x < 0 or math.isnan(x):
        raise NegativeInput(f"chi-square argument must be >= 0, got {x}")


def chi2_cdf(x: float, df: int) -> float:
    """P(X <= x) for X ~ chi-square(df)."""
    _check_args(x, df)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    a, h = 0.5 * df, 0.5 * x
    if h < a + 1.0:
        return _gamma_series(a, h)
    return 1.0 - _gamma_contfrac(a, h)


def chi2_sf(x: float, df: int) -> float:
    """P(X > x), computed directly so the upper tail keeps relative precision."""
    _check_args(x, df)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a, h = 0.5 * df, 0.5 * x
    if h < a + 1.0:
        return 1.0 - _gamma_series(a, h)
    return _gamma_contfrac(a, h)


def chi2_pdf(x: float, df: int) -> float:
    _check_args(x, df)
    a = 0.5 * df
    if x == 0.0:
        return math.inf if df == 1 else (0.5 if df == 2 else 0.0)
    return math.exp((a - 1.0) * math.log(x) - 0.5 * x - a * math.log(2.0) - math.lgamma(a))


def chi2_quantile(q: float, df: int, tol: float = 1e-10) -> float:
    """Inverse of :func:`chi2_cdf` by safeguarded Newton iteration."""
    if not 0.0 <= q < 1.0:
        raise InvalidProbability(f"q must lie in [0, 1), got {q}")
    _check_args(0.0, df)
    if q == 0.0:
        return 0.0

    lo, hi = 0.0, float(max(df, 1))
    while chi2_cdf(hi, df) < q:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        f = chi2_cdf(x, df) - q
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        pdf = chi2_pdf(x, df)
        step = f / pdf if pdf > 0 else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol * 1e-2 or hi - lo < tol * 1e-2:
            return x_new
        x = x_new
    raise ConvergenceError(f"chi2_quantile did not converge (q={q}, df={df})")


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float).ravel()
        off = np.asarray(self.off, dtype=float).ravel()
        if diag.size < 1 or off.size != diag.size - 1:
            raise InputError(
                f"need m >= 1 diagonal and m - 1 off-diagonal entries, got {diag.size} and {off.size}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def size(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        m = self.size
        out = np.diag(self.diag)
        if m > 1:
            idx = np.arange(m - 1)
            out[idx, idx + 1] = self.off
            out[idx + 1, idx] = self.off
        return out


def contrast_covariance(sigma_diag: Sequence[float]) -> SymTridiag:
    """``A diag(s) A^T`` for the successive-difference contrast matrix ``A``.

    Entry ``i`` of the diagonal is ``s[i] + s[i+1]``; the off-diagonal is
    ``-s[i+1]``. ``A`` itself is never formed.
    """
    s = np.asarray(sigma_diag, dtype=float).ravel()
    if s.size < 2:
        raise InputError(f"need at least 2 variances, got {s.size}")
    if not np.all(s > 0) or not np.all(np.isfinite(s)):
        raise NonpositiveVariance(f"variances must be finite and positive, got {s.tolist()}")
    return SymTridiag(diag=s[:-1] + s[1:], off=-s[1:-1])


def _ldl_forward(T: SymTridiag, b: np.ndarray):
    # returns pivots D, multipliers L and y = L^{-1} b
    m = T.size
    if b.size != m:
        raise InputError(f"rhs has length {b.size}, matrix is {m}x{m}")
    diag, off = T.diag.tolist(), T.off.tolist()
    piv = [0.0] * m
    mult = [0.0] * (m - 1)
    y = [0.0] * m

    piv[0] = diag[0]
    if not piv[0] > PIVOT_FLOOR:
        raise NotPositiveDefinite(f"pivot 0 is {piv[0]}")
    y[0] = float(b[0])
    for i in range(1, m):
        mult[i - 1] = off[i - 1] / piv[i - 1]
        piv[i] = diag[i] - mult[i - 1] * off[i - 1]
        if not piv[i] > PIVOT_FLOOR:
            raise NotPositiveDefinite(f"pivot {i} is {piv[i]}")
        y[i] = float(b[i]) - mult[i - 1] * y[i - 1]
    return piv, mult, y


def spd_tridiag_solve(T: SymTridiag, rhs) -> np.ndarray:
    """Solve ``T x = rhs`` through an LDL^T factorization in O(m).

    Raises :class:`NotPositiveDefinite` on the first pivot that is not
    positive.
    """
    piv, mult, y = _ldl_forward(T, np.asarray(rhs, dtype=float).ravel())
    m = len(piv)
    x = [0.0] * m
    x[m - 1] = y[m - 1] / piv[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = y[i] / piv[i] - mult[i] * x[i + 1]
    return np.array(x)


def quadratic_form(d, T: SymTridiag) -> float:
    """``d^T T^{-1} d``, evaluated as ``sum(y_i**2 / D_i)`` with ``y = L^{-1} d``.

    Equal to ``d @ spd_tridiag_solve(T, d)`` but never negative.
    """
    piv, _, y = _ldl_forward(T, np.asarray(d, dtype=float).ravel())
    return math.fsum(yi * yi / pi for yi, pi in zip(y, piv))
