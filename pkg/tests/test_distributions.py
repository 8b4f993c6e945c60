import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from record_laws.distributions import (
    Exponential,
    Pareto,
    Uniform,
    finite_uniform,
    load_tabulated,
    parse_descriptor,
    reflect,
)
from record_laws.errors import DomainError, TableFormatError

DATA = Path(__file__).parent / "data"


def test_cdf_examples():
    assert Uniform(0, 1).cdf(0.5) == 0.5
    assert finite_uniform(5).cdf(3) == pytest.approx(0.6, abs=1e-15)
    assert Exponential(1).cdf(0.0) == 0.0


def test_strict_cdf_examples():
    f5 = finite_uniform(5)
    assert f5.strict_cdf(3) == pytest.approx(0.4, abs=1e-15)
    assert Uniform(0, 1).strict_cdf(0.5) == 0.5
    assert f5.strict_cdf(0.5) == 0.0


def test_mass_or_density_examples():
    assert Exponential(1).mass_or_density(1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert finite_uniform(5).mass_or_density(3) == pytest.approx(0.2)
    assert finite_uniform(5).mass_or_density(3.5) == 0.0


def test_hazard_examples():
    assert Exponential(1).hazard(2.7) == pytest.approx(1.0, rel=1e-14)
    assert Uniform(0, 1).hazard(0.5) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        Uniform(0, 1).hazard(1.0)


def test_quantile_examples():
    assert Uniform(0, 1).quantile(0.25) == 0.25
    assert finite_uniform(5).quantile(0.41) == 3
    assert Exponential(1).quantile(1 - math.exp(-1)) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        Uniform(0, 1).quantile(1.5)


def test_boundary_values():
    for d in (Uniform(0, 1), Exponential(2), Pareto(2, 1), finite_uniform(4)):
        assert d.cdf(d.lep - 1.0) == 0.0
        if math.isfinite(d.uep):
            assert d.cdf(d.uep) == 1.0


def test_load_tabulated_uniform():
    d = load_tabulated(DATA / "u5.csv")
    f5 = finite_uniform(5)
    assert np.array_equal(d.support, f5.support)
    assert np.allclose(d.mass_array, f5.mass_array, rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "text, match",
    [
        ("1,0.2\n2,0.2\n3,0.2\n4,0.2\n", "sum"),
        ("1,0.5\n1,0.5\n", "duplicate"),
        ("1,0.5\n2,-0.5\n", "non-positive"),
        ("1,0.5\nabc,0.5\n", None),
        ("2,0.5\n1,0.5\n", "increasing"),
        ("1;0.5\n", "value,probability"),
    ],
)
def test_load_tabulated_errors(tmp_path, text, match):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(TableFormatError, match=match):
        load_tabulated(p)


def test_load_tabulated_comments_and_renormalisation(tmp_path):
    p = tmp_path / "ok.csv"
    p.write_text("# comment\n\n1,0.3333333333\n2,0.3333333333\n3,0.3333333334\n")
    d = load_tabulated(p)
    assert math.fsum(d.mass_array) == pytest.approx(1.0, abs=1e-15)


def test_parse_descriptor_roundtrip():
    for text in ("exp:1", "uniform:0,1", "pareto:2,1", "duniform:5"):
        assert parse_descriptor(text).descriptor == text
    assert parse_descriptor(f"table:{DATA / 'asym.csv'}").kind == "discrete"
    with pytest.raises(ValueError):
        parse_descriptor("normal:0,1")


MODELS = [Uniform(0, 1), Uniform(-2, 3), Exponential(1), Exponential(0.5), Pareto(2, 1), Pareto(3.5, 2),
          finite_uniform(5), load_tabulated(DATA / "asym.csv")]


@pytest.mark.parametrize("d", MODELS, ids=lambda d: d.descriptor)
def test_cdf_strict_cdf_mass_invariants(d):
    rng = np.random.default_rng(7)
    lo = d.lep if math.isfinite(d.lep) else -5.0
    hi = d.uep if math.isfinite(d.uep) else lo + 20.0
    y = rng.uniform(lo - 1, hi + 1, size=1000)
    if d.kind == "discrete":
        y = np.concatenate([y, d.support])
    F, Fs, f = d.cdf(y), d.strict_cdf(y), d.mass_or_density(y)
    assert np.all((0 <= Fs) & (Fs <= F) & (F <= 1))
    if d.kind == "discrete":
        assert np.allclose(F - Fs, f, rtol=0, atol=1e-12)
    else:
        assert np.array_equal(F, Fs)
    ys = np.sort(y)
    assert np.all(np.diff(d.cdf(ys)) >= 0)


@pytest.mark.parametrize("d", [m for m in MODELS if m.kind == "continuous"], ids=lambda d: d.descriptor)
def test_finite_difference_consistency(d):
    h = 1e-5
    u = np.linspace(0.05, 0.95, 19)
    y = d.quantile(u)
    fd = (d.cdf(y + h) - d.cdf(y)) / h
    assert np.allclose(fd, d.mass_or_density(y), rtol=1e-3)


@settings(max_examples=200, deadline=None)
@given(p=st.floats(0.0, 1.0), which=st.sampled_from(range(len(MODELS))))
def test_quantile_generalised_inverse(p, which):
    d = MODELS[which]
    q = d.quantile(p)
    if d.kind == "discrete" or 0 < p < 1:
        assert d.cdf(q) >= p - 1e-12


@settings(max_examples=200, deadline=None)
@given(y=st.floats(-10, 10), which=st.sampled_from(range(len(MODELS))))
def test_reflection_of_laws(y, which):
    d = MODELS[which]
    r = reflect(d)
    assert r.cdf(-y) == pytest.approx(d.strict_sf(y) if d.kind == "discrete" else d.sf(y), abs=1e-12)
    assert r.strict_cdf(-y) == pytest.approx(d.sf(y), abs=1e-12)
    assert reflect(r).descriptor == d.descriptor
