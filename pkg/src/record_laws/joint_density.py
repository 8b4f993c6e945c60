"""Hand-written closed forms for the joint law of (x, lower records, upper records), n = 2, 3.

These are deliberately independent of the term generator in
:mod:`record_laws.interleaving`; agreement between the two is tested.
All evaluators accept scalars or equally shaped arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .point import JointPoint

__all__ = [
    "JointPoint",
    "density_z2_continuous",
    "density_z3_continuous",
    "density_z2_discrete",
    "density_z3_discrete",
    "l_terms",
    "l_terms_discrete",
    "closed_form_density",
]


def _require_kind(d, kind):
    if d.kind != kind:
        raise ValueError(f"{d.descriptor} is {d.kind}; this evaluator needs a {kind} model")


def _prepare(point: JointPoint, n: int):
    if point.n != n:
        raise ValueError(f"expected an n={n} point, got n={point.n}")
    coords = {k: np.asarray(v, dtype=float) for k, v in point.coords().items()}
    shape = np.broadcast(*coords.values()).shape
    coords = {k: np.broadcast_to(v, shape) for k, v in coords.items()}
    return coords, np.asarray(point.is_ordered()), shape


def _finish(value, scalar_shape):
    return float(value) if scalar_shape == () else value


def _evaluate(d, point, n, factor_fn, check_zero: bool):
    coords, ordered, shape = _prepare(point, n)
    main = np.ones(shape)
    for v in coords.values():
        main = main * d.mass_or_density(v)
    live = ordered & (main > 0)
    out = np.zeros(shape)
    if np.any(live):
        sub = {k: v[live] for k, v in coords.items()}
        terms = factor_fn(d, sub)
        dens = [t for t in terms]
        if check_zero and any(np.any(t <= 0) for t in dens):
            raise DomainError("a denominator of the closed form vanishes at an in-domain point")
        out[live] = main[live] * np.sum([1.0 / t for t in dens], axis=0)
    return _finish(out, shape)


# each helper returns the denominators of the summands (product form)

def _z2_cont(d, c):
    Fx = d.cdf(c["x"])
    return [1.0 - Fx, Fx]


def _z2_disc(d, c):
    return [d.strict_cdf(c["x"]) * d.sf(c["x"])]


def _z3_cont(d, c):
    Fx, Fy1, Fz1 = d.cdf(c["x"]), d.cdf(c["y1"]), d.cdf(c["z1"])
    a = 1.0 - (Fz1 - Fx)
    b = 1.0 - (Fz1 - Fy1)
    e = 1.0 - (Fx - Fy1)
    sz1, sx = d.sf(c["z1"]), d.sf(c["x"])
    return [
        a * Fx * Fy1,       # O1: u2 < u3 < l2 < l3
        a * b * sz1,        # O2: u2 < l2 < l3 < u3
        a * b * Fy1,        # O3: u2 < l2 < u3 < l3
        e * b * sz1,        # O4: l2 < u2 < l3 < u3
        e * b * Fy1,        # O5: l2 < u2 < u3 < l3
        e * sx * sz1,       # O6: l2 < l3 < u2 < u3
    ]


def _z3_disc(d, c):
    fx = d.mass_or_density(c["x"])
    Fx, Fz1 = d.cdf(c["x"]), d.cdf(c["z1"])
    Fsx, Fsy1 = d.strict_cdf(c["x"]), d.strict_cdf(c["y1"])
    tie = 1.0 - fx
    a = 1.0 - (Fz1 - Fsx)
    b = 1.0 - (Fz1 - Fsy1)
    e = 1.0 - (Fx - Fsy1)
    sz1, sx = d.sf(c["z1"]), d.sf(c["x"])
    return [
        tie * a * Fsx * Fsy1,
        tie * a * b * sz1,
        tie * a * b * Fsy1,
        tie * e * b * sz1,
        tie * e * b * Fsy1,
        tie * e * sx * sz1,
    ]


def density_z2_continuous(d, p: JointPoint):
    """f(x) f(y1) f(z1) (1/(1 - F(x)) + 1/F(x)) on y1 < x < z1."""
    _require_kind(d, "continuous")
    return _evaluate(d, p, 2, _z2_cont, check_zero=True)


def density_z3_continuous(d, p: JointPoint):
    """Product of the five densities times the six-term sum L(x, y1, z1)."""
    _require_kind(d, "continuous")
    return _evaluate(d, p, 3, _z3_cont, check_zero=True)


def density_z2_discrete(d, p: JointPoint):
    """f(x) f(y1) f(z1) / (F*(x) (1 - F(x))) on ordered support triples."""
    _require_kind(d, "discrete")
    return _evaluate(d, p, 2, _z2_disc, check_zero=False)


def density_z3_discrete(d, p: JointPoint):
    """Discrete analogue of the n = 3 law; every summand carries 1 - f(x)."""
    _require_kind(d, "discrete")
    return _evaluate(d, p, 3, _z3_disc, check_zero=False)


def _terms(d, x, y1, z1, fn):
    x, y1, z1 = (np.asarray(v, dtype=float) for v in (x, y1, z1))
    if not np.all((y1 < x) & (x < z1)):
        raise ValueError("l_terms needs y1 < x < z1")
    dens = fn(d, {"x": x, "y1": y1, "z1": z1})
    if any(np.any(t <= 0) for t in dens):
        raise DomainError("zero denominator in L(x, y1, z1)")
    out = [1.0 / t for t in dens]
    return [float(t) for t in out] if np.ndim(out[0]) == 0 else out


def l_terms(d, x, y1, z1):
    """The six summands of L(x, y1, z1), ordered O1..O6."""
    _require_kind(d, "continuous")
    return _terms(d, x, y1, z1, _z3_cont)


def l_terms_discrete(d, x, y1, z1):
    """Discrete summands (including 1 - f(x)), ordered O1..O6."""
    _require_kind(d, "discrete")
    return _terms(d, x, y1, z1, _z3_disc)


def closed_form_density(d, p: JointPoint):
    table = {
        (2, "continuous"): density_z2_continuous,
        (3, "continuous"): density_z3_continuous,
        (2, "discrete"): density_z2_discrete,
        (3, "discrete"): density_z3_discrete,
    }
    try:
        fn = table[(p.n, d.kind)]
    except KeyError:
        raise ValueError(f"closed form only for n <= 3 (got n={p.n})") from None
    return fn(d, p)
