import math

import numpy as np
import pytest

from record_laws.distributions import Exponential, Uniform, finite_uniform, reflect
from record_laws.errors import DomainError
from record_laws.interleaving import (
    StayState,
    enumerate_interleavings,
    evaluate_general_density,
    generate_density_terms,
    stay_region,
    term_dump,
)
from record_laws.joint_density import density_z3_discrete, l_terms_discrete
from record_laws.oracle import dp_probability_discrete
from record_laws.point import JointPoint
from record_laws.verification import random_points, relative_error


@pytest.mark.parametrize("n", range(2, 8))
def test_interleaving_counts(n):
    inters = enumerate_interleavings(n)
    assert len(inters) == math.comb(2 * (n - 1), n - 1)
    assert len({i.events for i in inters}) == len(inters)


def test_canonical_order_and_labels():
    labels = [i.label for i in enumerate_interleavings(3)]
    assert labels == ["O6", "O4", "O5", "O2", "O3", "O1"]
    assert [i.sides for i in enumerate_interleavings(2)] == ["LU", "UL"]
    with pytest.raises(ValueError):
        enumerate_interleavings(1)


def test_stay_region_examples():
    d = Uniform(0, 1)
    s = stay_region(StayState("x", "z1", 1, 2), 3, "continuous")
    assert (s.lower, s.upper, s.lower_open, s.upper_open) == ("x", "z1", True, True)
    assert s.probability(d, {"x": 0.3, "z1": 0.8}) == pytest.approx(0.5)

    s = stay_region(StayState("y1", "z2", 2, 3), 3, "continuous")
    assert s.lower == "y1" and s.upper is None
    assert s.probability(d, {"y1": 0.3}) == pytest.approx(0.7)

    s = stay_region(StayState("x", "x", 1, 1), 3, "discrete")
    f5 = finite_uniform(5)
    assert str(s) == "[x, x]"
    assert s.probability(f5, {"x": 3.0}) == pytest.approx(0.2)


def test_stay_region_rejects_bad_counts():
    with pytest.raises(ValueError):
        stay_region(StayState("x", "x", 0, 1), 3, "continuous")
    with pytest.raises(ValueError):
        stay_region(StayState("x", "x", 1, 1), 3, "lattice")


def test_n2_terms():
    d = Exponential(1.0)
    terms = generate_density_terms(2, "continuous")
    c = {"x": 1.0, "y1": 0.4, "z1": 2.0}
    vals = sorted(t.evaluate(d, c) for t in terms)
    expected = sorted([1 / d.cdf(1.0), 1 / d.sf(1.0)])
    assert vals == pytest.approx(expected, rel=1e-15)


def test_o1_term_matches_first_l_summand():
    d = Exponential(1.0)
    term = next(t for t in generate_density_terms(3, "continuous") if t.interleaving.label == "O1")
    c = {"x": 1.0, "y1": 0.3, "z1": 1.7}
    F = d.cdf
    expected = 1.0 / ((1 - (F(1.7) - F(1.0))) * F(1.0) * F(0.3))
    assert term.evaluate(d, c) == pytest.approx(expected, rel=1e-14)


def test_denominator_counts():
    assert all(len(t.denominators) == 3 for t in generate_density_terms(3, "continuous"))
    assert all(len(t.denominators) == 4 for t in generate_density_terms(3, "discrete"))
    dump = term_dump(3, "discrete")
    assert dump[0]["label"] == "O6" and dump[0]["denominators"][0]["lower"] == "x"


def test_discrete_terms_match_printed_summands():
    d = finite_uniform(9)
    terms = {t.interleaving.label: t for t in generate_density_terms(3, "discrete")}
    for x, y1, z1 in [(5.0, 3.0, 7.0), (3.0, 2.0, 4.0), (7.0, 2.0, 8.0)]:
        printed = l_terms_discrete(d, x, y1, z1)
        c = {"x": x, "y1": y1, "z1": z1}
        for k, value in enumerate(printed, start=1):
            assert terms[f"O{k}"].evaluate(d, c) == pytest.approx(value, rel=1e-12)


def test_uniform_n2_example():
    assert evaluate_general_density(Uniform(0, 1), JointPoint(0.5, (0.2,), (0.9,))) == pytest.approx(4.0)


def test_off_domain_is_zero():
    assert evaluate_general_density(Uniform(0, 1), JointPoint(0.5, (0.6,), (0.9,))) == 0.0
    assert evaluate_general_density(finite_uniform(5), JointPoint(3.0, (2.5,), (5.0,))) == 0.0


class _FlatDensity(Uniform):
    """Uniform(0, 1) whose density is left positive below the support."""

    def mass_or_density(self, y):
        return np.ones_like(np.asarray(y, dtype=float))


def test_zero_denominator_raises():
    # a pending lower record below the support minimum: F(y1) = 0
    with pytest.raises(DomainError):
        evaluate_general_density(_FlatDensity(0, 1), JointPoint(0.5, (-0.1, -0.2), (0.7, 0.9)))


def test_n4_discrete_matches_dp_oracle():
    d = finite_uniform(9)
    pt = JointPoint(5.0, (4.0, 2.0, 1.0), (6.0, 7.0, 9.0))
    b = dp_probability_discrete(d, pt, horizon=400)
    assert b.tail_bound <= 1e-12
    assert b.contains(evaluate_general_density(d, pt), 1e-15)


@pytest.mark.parametrize("kind_model", [Uniform(0, 1), Exponential(1.0), finite_uniform(7)], ids=str)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_terms_positive_and_reflection(kind_model, n):
    d = kind_model
    rng = np.random.default_rng(n)
    for pt in random_points(d, n, 30, rng):
        v = evaluate_general_density(d, pt)
        assert v > 0
        assert relative_error(evaluate_general_density(reflect(d), pt.reflected()), v) <= 1e-12


def test_vectorised_evaluation():
    d = Exponential(1.0)
    pts = random_points(d, 3, 50, np.random.default_rng(0))
    flat = np.array([p.flat() for p in pts])
    batch = JointPoint.from_flat(list(flat.T), 3)
    vals = evaluate_general_density(d, batch)
    assert np.allclose(vals, [evaluate_general_density(d, p) for p in pts], rtol=1e-15)


def test_discrete_mass_matches_closed_form_on_support():
    d = finite_uniform(5)
    pt = JointPoint(3.0, (2.0, 1.0), (4.0, 5.0))
    assert evaluate_general_density(d, pt) == pytest.approx(density_z3_discrete(d, pt), rel=1e-12)
