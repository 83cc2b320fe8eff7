import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantest.core import QuantileSpec, Sample
from quantest.errors import NonpositiveDensity
from quantest.quantiles import bahadur_decompose, bahadur_envelope, empirical_cdf, sample_quantile

from conftest import NORMAL_F0

# Calibrated once: at n = 10^4 the 95th percentile of |R_n| / envelope over
# 500 normal samples is about 0.86, comfortably under this constant.
REMAINDER_CONST = 3.0

values_st = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=60)
level_st = st.floats(0.001, 0.999)


def _normal(seed, n):
    return Sample(np.random.default_rng(seed).standard_normal(n))


class TestSampleQuantile:
    def test_odd_median(self):
        assert sample_quantile(Sample([3.0, 1.0, 2.0]), 0.5) == 2.0

    def test_even_median_is_midpoint(self):
        assert sample_quantile(Sample([1.0, 2.0, 3.0, 4.0])) == 2.5

    def test_exact_position(self):
        assert sample_quantile(Sample([10.0, 20.0, 30.0, 40.0, 50.0]), QuantileSpec(0.25)) == 20.0

    @given(values_st, level_st)
    def test_matches_numpy_linear(self, values, p):
        s = Sample(values)
        assert sample_quantile(s, p) == pytest.approx(float(np.quantile(s.values, p)), rel=1e-12, abs=1e-9)

    @given(values_st, level_st, level_st)
    def test_monotone_in_p(self, values, p1, p2):
        s = Sample(values)
        lo, hi = sorted((p1, p2))
        assert sample_quantile(s, lo) <= sample_quantile(s, hi) + 1e-12

    @given(values_st, level_st, st.floats(-1e3, 1e3))
    def test_shift_equivariant(self, values, p, c):
        s = Sample(values)
        shifted = Sample(np.asarray(values) + c)
        assert sample_quantile(shifted, p) == pytest.approx(sample_quantile(s, p) + c, abs=1e-8)

    @given(values_st, level_st, st.floats(1e-3, 1e3))
    def test_scale_equivariant(self, values, p, a):
        s = Sample(values)
        scaled = Sample(np.asarray(values) * a)
        assert sample_quantile(scaled, p) == pytest.approx(a * sample_quantile(s, p), rel=1e-9, abs=1e-9)


class TestEmpiricalCDF:
    def test_examples(self):
        s = Sample([1.0, 2.0, 3.0])
        assert empirical_cdf(s, 0.5) == 0.0
        assert empirical_cdf(s, 3.0) == 1.0
        assert empirical_cdf(s, 7.0) == 1.0
        assert empirical_cdf(s, 2.0) == pytest.approx(2 / 3)

    def test_right_closed_with_ties(self):
        s = Sample([1.0, 2.0, 2.0, 3.0])
        assert empirical_cdf(s, 2.0) == 0.75
        assert empirical_cdf(s, np.nextafter(2.0, 0)) == 0.25

    @given(values_st, st.lists(st.floats(-2e3, 2e3), min_size=2, max_size=40))
    def test_nondecreasing(self, values, grid):
        s = Sample(values)
        vals = [empirical_cdf(s, x) for x in sorted(grid)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= v <= 1.0 for v in vals)


class TestBahadur:
    def test_zero_linear_term(self):
        s = Sample([1.0, 2.0, 3.0, 4.0])
        parts = bahadur_decompose(s, 2.2, 0.3)
        assert empirical_cdf(s, 2.2) == 0.5
        assert parts.linear_term == 0.0
        assert parts.remainder == pytest.approx(2.5 - 2.2, abs=1e-15)

    @given(values_st, st.floats(-1e3, 1e3), st.floats(1e-3, 10))
    def test_identity(self, values, m, f):
        s = Sample(values)
        parts = bahadur_decompose(s, m, f)
        recon = m + parts.linear_term + parts.remainder
        assert abs(recon - sample_quantile(s, 0.5)) <= 1e-12 * max(1.0, abs(recon), abs(parts.linear_term))

    def test_nonpositive_density(self):
        with pytest.raises(NonpositiveDensity):
            bahadur_decompose(Sample([1.0, 2.0]), 0.0, 0.0)

    def test_envelope_undefined_below_three(self):
        assert np.isnan(bahadur_envelope(2))

    def test_envelope_value(self):
        n = 10_000
        ln = np.log(n)
        assert bahadur_envelope(n) == pytest.approx(n**-0.75 * ln**0.5 * np.log(ln) ** 0.25, rel=1e-14)

    def test_remainder_within_envelope(self):
        n = 10_000
        hits = 0
        for seed in range(500):
            parts = bahadur_decompose(_normal(seed, n), 0.0, NORMAL_F0)
            hits += abs(parts.remainder) <= REMAINDER_CONST * parts.envelope
        assert hits / 500 >= 0.95

    def test_remainder_shrinks(self):
        def med_rem(n):
            return np.median([abs(bahadur_decompose(_normal(s, n), 0.0, NORMAL_F0).remainder) for s in range(500)])

        assert med_rem(10_000) < med_rem(100)


def test_asymptotic_normality_of_median():
    n = 4000
    z = np.array([np.sqrt(n) * sample_quantile(_normal(seed, n)) * 2 * NORMAL_F0 for seed in range(2000)])
    assert abs(z.mean()) <= 0.05
    assert abs(z.var() - 1.0) <= 0.1


def test_general_level_bahadur():
    # p = 0.25 of the uniform(0, 1): quantile 0.25, density 1
    r = np.random.default_rng(3)
    s = Sample(r.random(2001))
    parts = bahadur_decompose(s, 0.25, 1.0, p=0.25)
    assert parts.estimate == sample_quantile(s, 0.25)
    assert parts.linear_term == pytest.approx(0.25 - empirical_cdf(s, 0.25))
    assert abs(parts.remainder) <= REMAINDER_CONST * parts.envelope
