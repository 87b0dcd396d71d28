import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opint.errors import NonEvaluable
from opint.measures import (
    AtomicComplexMeasure,
    DensityComplexMeasure,
    Monomial,
    QuadraturePolicy,
    SeriesPolicy,
    Status,
    classify_divergence,
    default_horizons,
    integrability_test,
    integrate,
    total_variation,
)

ZETA3 = float(mpmath.zeta(3))
PI2_6 = math.pi**2 / 6


def powers(p):
    return AtomicComplexMeasure.sequence(lambda j: (np.asarray(j) + 1.0) ** -p,
                                         lambda j: np.asarray(j) + 1.0, positive=True)


class TestAtomic:
    def test_finite_integral_is_weighted_sum(self):
        mu = AtomicComplexMeasure.finite([0.0, 1.0, 2.0], [1.0, 2j, -0.5])
        v = integrate(lambda x: x**2 + 1, mu)
        assert v.status is Status.CONVERGED
        assert v.value == pytest.approx(1.0 + 4j - 2.5)

    def test_empty_measure(self):
        mu = AtomicComplexMeasure.finite([], [])
        assert integrate(np.exp, mu).value == 0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            AtomicComplexMeasure.finite([0.0, 1.0], [1.0])

    def test_positive_rejects_complex_weight(self):
        with pytest.raises(ValueError):
            AtomicComplexMeasure.finite([0.0], [1j], positive=True)

    def test_total_variation_and_restrict(self):
        mu = AtomicComplexMeasure.finite([-1.0, 0.5, 3.0], [-2.0, 1j, 3 + 4j])
        tv = total_variation(mu)
        assert tv.weights.real.tolist() == [2.0, 1.0, 5.0]
        assert tv.restrict(lambda x: x > 0).total_mass() == pytest.approx(6.0)

    def test_combine_merges_locations(self):
        a = AtomicComplexMeasure.finite([0.0, 1.0], [1.0, 1.0])
        b = AtomicComplexMeasure.finite([1.0, 2.0], [1.0, 1.0])
        c = AtomicComplexMeasure.combine([1.0, -2.0], [a, b])
        assert c.locations.tolist() == [0.0, 1.0, 2.0]
        assert c.weights.tolist() == [1.0, -1.0, -2.0]

    def test_combine_rejects_mixed(self):
        with pytest.raises(ValueError):
            AtomicComplexMeasure.combine([1, 1], [AtomicComplexMeasure.finite([0.0], [1.0]), powers(2)])

    def test_nonevaluable(self):
        mu = AtomicComplexMeasure.finite([0.0, 1.0], [1.0, 1.0])
        with pytest.raises(NonEvaluable):
            integrate(lambda x: 1.0 / x, mu)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=12),
           st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
    def test_linearity_in_the_measure(self, atoms, c):
        locs = np.array([a[0] for a in atoms])
        w = np.array([complex(a[1], a[2]) for a in atoms])
        mu = AtomicComplexMeasure.finite(locs, w)
        f = lambda x: np.cos(x) + 1j * x
        lhs = integrate(f, mu.scaled(c)).value
        assert lhs == pytest.approx(c * integrate(f, mu).value, abs=1e-9)
        assert abs(integrate(f, mu).value) <= integrate(lambda x: np.abs(f(x)), total_variation(mu)).value.real + 1e-9


class TestSeries:
    def test_zeta3(self):
        v = integrate(Monomial(2), powers(5))
        assert v.status is Status.CONVERGED
        assert v.value.real == pytest.approx(ZETA3, abs=1e-8)

    def test_harmonic_is_divergent(self):
        v = integrate(Monomial(4), powers(5))
        assert v.status is Status.DIVERGENT
        assert v.fit.slope == pytest.approx(1.0, rel=1e-3)

    def test_slow_series_needs_loose_tolerance(self):
        # sum 1/n**2 converges too slowly for the default relative tolerance
        v = integrate(Monomial(0), powers(2), SeriesPolicy(tol=1e-5))
        assert v.status is Status.CONVERGED
        assert v.value.real == pytest.approx(PI2_6, abs=1e-3)

    def test_integrability_test_uses_absolute_values(self):
        alt = AtomicComplexMeasure.sequence(lambda j: (-1.0) ** np.asarray(j) / (np.asarray(j) + 1.0))
        assert integrability_test(Monomial(0), alt).status is not Status.CONVERGED

    def test_evidence_csv(self):
        v = integrate(Monomial(2), powers(5))
        buf = io.StringIO()
        text = v.to_csv(buf)
        assert text.splitlines()[0] == "horizon,partial_real,partial_imag"
        assert len(text.splitlines()) == len(v.horizons) + 1


class TestClassifier:
    def test_log_growth(self):
        h = 100.0 * 2.0 ** np.arange(8)
        status, fit = classify_divergence(h, 0.3 * np.log(h) + 1.0)
        assert status is Status.DIVERGENT
        assert fit.slope == pytest.approx(0.3)

    def test_power_growth(self):
        h = 100.0 * 2.0 ** np.arange(8)
        status, fit = classify_divergence(h, h**0.5)
        assert status is Status.DIVERGENT

    def test_decaying_increments_are_not_divergent(self):
        h = 100.0 * 2.0 ** np.arange(8)
        status, _ = classify_divergence(h, 1.0 - 1.0 / h)
        assert status is Status.INCONCLUSIVE

    def test_too_few_doublings(self):
        h = np.array([100.0, 200.0, 400.0])
        assert classify_divergence(h, np.log(h))[0] is Status.INCONCLUSIVE

    def test_horizons_align_to_period(self):
        hs = default_horizons(100.0, 4, period=2.0)
        assert len(hs) == 5 and hs[-1] >= 100.0
        assert all(abs(h / 2.0 - round(h / 2.0)) < 1e-12 for h in hs)
        assert np.allclose(np.diff(np.log2(hs)), 1.0)


class TestDensity:
    def test_gaussian_on_line(self):
        mu = DensityComplexMeasure(lambda x: np.exp(-x**2), x_max=10.0, positive=True,
                                   policy=QuadraturePolicy(tail_model=False))
        v = integrate(Monomial(2), mu)
        assert v.status is Status.CONVERGED
        assert v.value.real == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)

    def test_bounded_support(self):
        mu = DensityComplexMeasure(np.cos, support=(0.0, math.pi / 2))
        assert integrate(lambda x: np.ones_like(x), mu).value.real == pytest.approx(1.0, rel=1e-12)

    def test_cauchy_first_moment_is_divergent(self):
        mu = DensityComplexMeasure(lambda x: 1.0 / (math.pi * (1 + x**2)), support=(0.0, math.inf),
                                   x_max=100.0, positive=True)
        v = integrability_test(Monomial(1), mu)
        assert v.status is Status.DIVERGENT
        assert v.fit.slope == pytest.approx(1.0 / math.pi, rel=0.05)

    def test_power_law_tail_fallback(self):
        # int_1^inf x**-3 dx = 1/2; the fitted tail recovers the part beyond x_max
        mu = DensityComplexMeasure(lambda x: np.asarray(x, dtype=float) ** -3, support=(1.0, math.inf),
                                   x_max=20.0, positive=True)
        v = integrate(Monomial(0), mu)
        assert v.status is Status.CONVERGED
        assert v.value.real == pytest.approx(0.5, rel=1e-4)

    def test_empty_support_rejected(self):
        with pytest.raises(ValueError):
            DensityComplexMeasure(np.cos, support=(1.0, 1.0))
