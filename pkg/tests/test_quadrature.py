import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from record_laws.distributions import Exponential, Pareto, Uniform
from record_laws.errors import NumericError
from record_laws.joint_density import density_z2_continuous
from record_laws.marginals import numeric_marginal
from record_laws.quadrature import SectionRegion, integrate_1d, integrate_section


def test_constant():
    r = integrate_1d(lambda x: np.ones_like(x), 0.0, 1.0)
    assert r.converged and r.value == 1.0


def test_log_singularity():
    r = integrate_1d(lambda x: -np.log(x), 0.0, 1.0)
    assert r.converged
    assert r.value == pytest.approx(1.0, abs=1e-8)


def test_pair_ingredient():
    # integral of the (2,2) bracket over (0.25, 0.75) at unit density
    fn = lambda u: np.log(u / 0.25) + np.log(0.75 / (1 - u))
    r = integrate_1d(fn, 0.25, 0.75)
    # the interval is symmetric about 1/2, so the two logarithms' antiderivatives cancel
    exact = 0.5 * math.log(3)
    assert r.value == pytest.approx(exact, rel=1e-10)


def test_scalar_integrand_and_validation():
    assert integrate_1d(math.cos, 0.0, 1.0).value == pytest.approx(math.sin(1.0), rel=1e-12)
    with pytest.raises(ValueError):
        integrate_1d(math.cos, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate_1d(math.cos, 1.0, 0.0)


def test_cap_reports_non_convergence():
    r = integrate_1d(lambda x: np.sin(1.0 / x) / x, 1e-6, 1.0, rel_tol=1e-14, max_panels=8)
    assert not r.converged and math.isfinite(r.value)
    with pytest.raises(NumericError):
        r.require()


@pytest.mark.parametrize("k", range(0, 21))
def test_polynomial_exactness(k):
    r = integrate_1d(lambda x: x ** k, 0.0, 1.0)
    assert r.value == pytest.approx(1.0 / (k + 1), rel=1e-14)


def test_tolerance_monotonicity():
    fn = lambda x: 1.0 / np.sqrt(x) + np.cos(20 * x)
    exact = 2.0 + math.sin(20.0) / 20.0
    errs = [abs(integrate_1d(fn, 0.0, 1.0, rel_tol=t, abs_tol=0.0).value - exact) for t in (1e-4, 1e-7, 1e-10)]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] <= 1e-9


def test_simplex_volume():
    region = SectionRegion(("a", "b", "c"), {}, lower=0.0, upper=1.0)
    r = integrate_section(lambda c: np.ones_like(c["a"]), region)
    assert r.value == pytest.approx(1 / 6, rel=1e-12)


def test_lower_records_numerator():
    region = SectionRegion(("y2", "y1", "x"), {"x": 0.5})
    r = integrate_section(lambda c: 1.0 / c["y1"], region, dist=Uniform(0, 1))
    assert r.value == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("d", [Uniform(-1, 3), Exponential(2.0), Pareto(1.5, 1.0)], ids=str)
def test_cdf_substitution_invariance(d):
    x = float(d.quantile(0.3))
    region = SectionRegion(("y2", "y1", "x"), {"x": x})
    r = integrate_section(lambda c: 1.0 / d.cdf(c["y1"]), region, dist=d)
    assert r.value == pytest.approx(0.3, rel=1e-10)


def test_constant_in_matches_quadrature():
    region = SectionRegion(("a", "b", "c"), {}, lower=0.0, upper=1.0)
    fn = lambda c: np.broadcast_to(np.asarray(c["b"]) ** 2, np.broadcast(c["a"], c["b"], c["c"]).shape)
    full = integrate_section(fn, region).value
    fast = integrate_section(fn, region, constant_in=("a", "c")).value
    assert full == pytest.approx(fast, rel=1e-12)


def test_unordered_fixed_section_is_zero():
    region = SectionRegion(("a", "b", "c"), {"a": 0.7, "c": 0.2}, lower=0.0, upper=1.0)
    assert integrate_section(lambda c: np.ones_like(c["b"]), region).value == 0.0


def test_z2_normalisation_exponential():
    total = numeric_marginal(density_z2_continuous, Exponential(1.0), {}, n=2)
    assert total == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3), w=st.floats(0.01, 5))
def test_linear_functions(a, w):
    b = a + w
    r = integrate_1d(lambda x: 3 * x + 1, a, b)
    assert r.value == pytest.approx(1.5 * (b * b - a * a) + w, rel=1e-12, abs=1e-12)
