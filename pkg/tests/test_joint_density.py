import math
from pathlib import Path

import numpy as np
import pytest

from record_laws.distributions import Exponential, Pareto, Uniform, finite_uniform, load_tabulated
from record_laws.errors import DomainError
from record_laws.interleaving import evaluate_general_density
from record_laws.joint_density import (
    closed_form_density,
    density_z2_continuous,
    density_z2_discrete,
    density_z3_continuous,
    density_z3_discrete,
    l_terms,
)
from record_laws.marginals import numeric_marginal
from record_laws.oracle import dp_probability_discrete
from record_laws.point import JointPoint
from record_laws.verification import random_points, relative_error

DATA = Path(__file__).parent / "data"


def test_z2_uniform_example():
    assert density_z2_continuous(Uniform(0, 1), JointPoint(0.5, (0.2,), (0.9,))) == pytest.approx(4.0, rel=1e-15)


def test_z2_off_domain():
    assert density_z2_continuous(Uniform(0, 1), JointPoint(0.5, (0.7,), (0.9,))) == 0.0


def test_z2_exponential_value():
    # f(y2) f(y3) f(x) (1/F(x) + 1/(1-F(x))) with F(ln 2) = 1/2 collapses to 2 e^{-2.1}
    value = density_z2_continuous(Exponential(1.0), JointPoint(math.log(2), (0.1,), (2.0,)))
    assert value == pytest.approx(2 * math.exp(-2.1), rel=1e-14)
    assert value == pytest.approx(0.2449128565059638, rel=1e-14)


def test_z3_uniform_matches_generator():
    pt = JointPoint(0.5, (0.3, 0.1), (0.7, 0.9))
    assert relative_error(density_z3_continuous(Uniform(0, 1), pt),
                          evaluate_general_density(Uniform(0, 1), pt)) <= 1e-12


def test_z3_off_domain():
    assert density_z3_continuous(Exponential(1.0), JointPoint(1.0, (0.2, 0.5), (1.5, 2.0))) == 0.0


def test_l_terms_uniform():
    terms = l_terms(Uniform(0, 1), 0.5, 0.2, 0.8)
    assert len(terms) == 6
    # O1: 1 / ((1 - (F(z1) - F(x))) F(x) F(y1))
    assert terms[0] == pytest.approx(1 / (0.7 * 0.5 * 0.2), rel=1e-14)
    with pytest.raises(ValueError):
        l_terms(Uniform(0, 1), 0.5, 0.6, 0.8)


def test_z2_discrete_examples():
    f5 = finite_uniform(5)
    assert density_z2_discrete(f5, JointPoint(3.0, (2.0,), (5.0,))) == pytest.approx(0.05, rel=1e-14)
    assert density_z2_discrete(f5, JointPoint(1.0, (0.0,), (2.0,))) == 0.0
    b = dp_probability_discrete(f5, JointPoint(3.0, (2.0,), (5.0,)), horizon=200)
    assert b.tail_bound <= 1e-12 and b.contains(0.05, 1e-15)


def test_z3_discrete_dp_agreement():
    f5 = finite_uniform(5)
    pt = JointPoint(3.0, (2.0, 1.0), (4.0, 5.0))
    b = dp_probability_discrete(f5, pt, horizon=400)
    assert b.contains(density_z3_discrete(f5, pt), 1e-15)
    assert density_z3_discrete(f5, JointPoint(3.0, (1.0, 2.0), (4.0, 5.0))) == 0.0


def test_kind_guards():
    with pytest.raises(ValueError):
        density_z2_continuous(finite_uniform(5), JointPoint(3.0, (2.0,), (5.0,)))
    with pytest.raises(ValueError):
        density_z3_discrete(Uniform(0, 1), JointPoint(0.5, (0.3, 0.1), (0.7, 0.9)))
    with pytest.raises(ValueError):
        closed_form_density(Uniform(0, 1), JointPoint(0.5, (0.3, 0.2, 0.1), (0.7, 0.8, 0.9)))


def test_zero_denominator_in_l_terms():
    with pytest.raises(DomainError):
        l_terms(Uniform(0, 1), 0.5, -0.1, 0.9)


MODELS = [Uniform(0, 1), Exponential(1.0), Pareto(2.5, 1.0), finite_uniform(6), load_tabulated(DATA / "asym.csv")]


@pytest.mark.parametrize("d", MODELS, ids=lambda d: d.descriptor)
@pytest.mark.parametrize("n", [2, 3])
def test_generator_equivalence(d, n):
    rng = np.random.default_rng(10 * n)
    pts = random_points(d, n, 200, rng)
    for pt in pts:
        assert relative_error(evaluate_general_density(d, pt), closed_form_density(d, pt)) <= 1e-12


@pytest.mark.parametrize("d", [finite_uniform(5), load_tabulated(DATA / "asym.csv")], ids=lambda d: d.descriptor)
def test_discrete_z2_total_mass(d):
    m = d.mass_array
    total = numeric_marginal(density_z2_discrete, d, {}, n=2)
    assert total == pytest.approx(1.0 - m[0] - m[-1], abs=1e-12)


def test_vectorised_closed_forms():
    d = Exponential(1.0)
    pts = random_points(d, 3, 20, np.random.default_rng(2))
    flat = np.array([p.flat() for p in pts])
    vals = density_z3_continuous(d, JointPoint.from_flat(list(flat.T), 3))
    assert np.allclose(vals, [density_z3_continuous(d, p) for p in pts], rtol=1e-15)
