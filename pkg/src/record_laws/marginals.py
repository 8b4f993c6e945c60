"""Pair marginals (Y_(p), Y^(q)) for p, q in {2, 3}, upper-record marginals and numeric marginalisation."""

from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

from .errors import NumericError
from .point import JointPoint, coordinate_names
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, SectionRegion, integrate_1d, integrate_section

__all__ = [
    "pair_density_continuous",
    "pair_density_discrete",
    "upper_records_density",
    "numeric_marginal",
    "PAIRS",
]

PAIRS = ((2, 2), (2, 3), (3, 2), (3, 3))


def _check_pair(p, q):
    if (p, q) not in PAIRS:
        raise ValueError(f"pair (p, q) must have p, q in {{2, 3}}, got ({p}, {q})")


def pair_density_continuous(d, p: int, q: int, y: float, z: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Joint density of the p-th lower and q-th upper record values at (y, z).

    The (2, 2) law is closed form; the others keep one integral over the
    first observation, computed in u = F(x) where the integrand weight is
    1 / (u (1 - u)).
    """
    _check_pair(p, q)
    if d.kind != "continuous":
        raise ValueError("pair_density_continuous needs a continuous model")
    y, z = float(y), float(z)
    if not y < z:
        return 0.0
    pre = float(d.mass_or_density(y)) * float(d.mass_or_density(z))
    if pre == 0.0:
        return 0.0
    Fy, Fz = float(d.cdf(y)), float(d.cdf(z))
    Sy, Sz = float(d.sf(y)), float(d.sf(z))
    if (p, q) == (2, 2):
        return pre * (math.log(Fz / Fy) + math.log(Sy / Sz))

    def integrand(u):
        w = 1.0 / (u * (1.0 - u))
        lower = np.log(Fy / u)          # log(F(y)/F(x)) < 0
        upper = np.log(Sz / (1.0 - u))  # log((1-F(z))/(1-F(x))) < 0
        if (p, q) == (2, 3):
            return -w * upper
        if (p, q) == (3, 2):
            return -w * lower
        return w * lower * upper

    res = integrate_1d(integrand, Fy, Fz, rel_tol=rel_tol)
    return pre * res.require(f"pair ({p},{q}) inner integral")


def _support_between(d, lo, hi):
    s = d.support
    return s[(s > lo) & (s < hi)]


def pair_density_discrete(d, p: int, q: int, y: float, z: float) -> float:
    """Probability that the p-th lower record is y and the q-th upper record is z.

    Finite sums over support points strictly between the bounds, nested as
    the formulas state: the inner sums run over the records between the
    first observation x and the outer record value.
    """
    _check_pair(p, q)
    if d.kind != "discrete":
        raise ValueError("pair_density_discrete needs a discrete model")
    y, z = float(y), float(z)
    pre = float(d.mass_or_density(y)) * float(d.mass_or_density(z))
    if not y < z or pre == 0.0:
        return 0.0
    total = 0.0
    for x in _support_between(d, y, z):
        term = float(d.mass_or_density(x)) / (float(d.strict_cdf(x)) * float(d.sf(x)))
        if q == 3:
            z1 = _support_between(d, x, z)
            term *= math.fsum(d.mass_or_density(z1) / d.sf(z1))
        if p == 3:
            y1 = _support_between(d, y, x)
            term *= math.fsum(d.mass_or_density(y1) / d.strict_cdf(y1))
        total += term
    return pre * total


def upper_records_density(d, values) -> float:
    """Density of the first k upper record values: hazards times the last density."""
    values = [float(v) for v in values]
    if len(values) < 1:
        raise ValueError("need at least one value")
    if any(not a < b for a, b in zip(values, values[1:])):
        raise ValueError("upper record values must be strictly increasing")
    out = float(d.mass_or_density(values[-1]))
    for v in values[:-1]:
        out *= float(d.hazard(v))
    return out


def numeric_marginal(density: Callable, d, keep: Mapping[str, float], n: int = 3,
                     rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Integrate (or sum) ``density`` over the coordinates not in ``keep``.

    Coordinates are named ``x``, ``y1..y{n-1}`` (lower) and ``z1..z{n-1}``
    (upper).  Continuous models are integrated in u = F space; discrete
    models are summed exhaustively over the support.
    """
    names = coordinate_names(n)
    unknown = set(keep) - set(names)
    if unknown:
        raise ValueError(f"unknown coordinates {sorted(unknown)}; expected a subset of {names}")
    keep = {k: float(v) for k, v in keep.items()}
    free = [c for c in names if c not in keep]

    def point_from(coords):
        return JointPoint(coords["x"], tuple(coords[f"y{k}"] for k in range(1, n)),
                          tuple(coords[f"z{k}"] for k in range(1, n)))

    if d.kind == "discrete":
        if not free:
            return float(density(d, point_from(keep)))
        grids = np.meshgrid(*([d.support] * len(free)), indexing="ij")
        coords = dict(keep)
        coords.update({c: g.ravel() for c, g in zip(free, grids)})
        vals = np.asarray(density(d, point_from(coords)), dtype=float)
        return math.fsum(vals)

    def fn(coords):
        weight = 1.0
        for c in free:
            weight = weight * d.mass_or_density(coords[c])
        shape = np.broadcast(*[np.asarray(v) for v in coords.values()]).shape
        coords = {k: np.broadcast_to(np.asarray(v, dtype=float), shape) for k, v in coords.items()}
        val = np.asarray(density(d, point_from(coords)), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(weight > 0, val / weight, 0.0)

    res = integrate_section(fn, SectionRegion(tuple(names), keep), dist=d, rel_tol=rel_tol, abs_tol=abs_tol)
    if not res.converged:
        raise NumericError(
            f"marginal over {free} did not converge (level {res.level})",
            estimate=res.value, error_estimate=res.error_estimate, level=res.level,
        )
    return res.value
