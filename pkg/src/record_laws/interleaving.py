"""Record-time interleavings and the stay-region term generator.

Between two consecutive record events an observation must avoid creating a
record that is not due yet.  For a state with ``lower_count`` lower and
``upper_count`` upper records seen, the admissible values ("stay region")
are bounded below by the current minimum while more lower records are
pending and above by the current maximum while more upper records are
pending.  Each gap contributes a geometric series, i.e. a factor
``1 / (1 - P(stay))``, and summing the products over all interleavings
gives the joint law.  Atomless models use open bounds and skip the gap
before the first record event (it is empty almost surely); atomic models
use closed bounds and keep it, which yields the ``1 - f(x)`` factor.

Terms for n >= 4 follow the same pattern but are an extrapolation, so
results for those n are flagged experimental.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .point import JointPoint
from .records import Interleaving

__all__ = [
    "StayState",
    "StayInterval",
    "DensityTerm",
    "enumerate_interleavings",
    "stay_region",
    "generate_density_terms",
    "evaluate_general_density",
    "term_dump",
    "is_experimental",
]

KINDS = ("continuous", "discrete")


def _check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def is_experimental(n: int) -> bool:
    return n >= 4


@lru_cache(maxsize=None)
def enumerate_interleavings(n: int) -> tuple[Interleaving, ...]:
    """All admissible interleavings, lexicographic in the side string with L < U.

    For n = 3 this yields LLUU, LULU, LUUL, ULLU, ULUL, UULL, which carry
    the labels O6, O4, O5, O2, O3, O1 respectively.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    m = n - 1
    out = []
    for lower_slots in itertools.combinations(range(2 * m), m):
        sides = ["U"] * (2 * m)
        for i in lower_slots:
            sides[i] = "L"
        out.append(Interleaving.from_sides(sides))
    return tuple(out)


@dataclass(frozen=True)
class StayState:
    """Current extremes (values or symbolic names) and record counts."""

    current_low: object
    current_high: object
    lower_count: int
    upper_count: int


@dataclass(frozen=True)
class StayInterval:
    """Stay region with bounds as coordinate names (or values); None means infinite."""

    lower: object
    upper: object
    lower_open: bool
    upper_open: bool

    def leave_probability(self, d, coords=None):
        """``1 - P(stay)``, accumulated as ``P(below) + P(above)``."""
        def val(b):
            return coords[b] if coords is not None else b
        below = 0.0
        if self.lower is not None:
            a = val(self.lower)
            below = d.cdf(a) if self.lower_open else d.strict_cdf(a)
        above = 0.0
        if self.upper is not None:
            b = val(self.upper)
            above = d.strict_sf(b) if self.upper_open else d.sf(b)
        return below + above

    def probability(self, d, coords=None):
        return 1.0 - self.leave_probability(d, coords)

    def to_json(self) -> dict:
        return {
            "lower": "-inf" if self.lower is None else self.lower,
            "upper": "+inf" if self.upper is None else self.upper,
            "lower_open": self.lower_open,
            "upper_open": self.upper_open,
        }

    def __str__(self) -> str:
        lo = "-inf" if self.lower is None else self.lower
        hi = "+inf" if self.upper is None else self.upper
        return f"{'(' if self.lower_open else '['}{lo}, {hi}{')' if self.upper_open else ']'}"


def stay_region(state: StayState, n: int, kind: str) -> StayInterval:
    """Values an observation may take without creating a premature record."""
    _check_kind(kind)
    if not (1 <= state.lower_count <= n and 1 <= state.upper_count <= n):
        raise ValueError(f"record counts must lie in [1, {n}]")
    lower = state.current_low if state.lower_count < n else None
    upper = state.current_high if state.upper_count < n else None
    is_open = kind == "continuous"
    return StayInterval(lower, upper, is_open or lower is None, is_open or upper is None)


@dataclass(frozen=True)
class DensityTerm:
    """One summand of the joint law: the reciprocal of a product of leave probabilities."""

    interleaving: Interleaving
    kind: str
    denominators: tuple[StayInterval, ...]

    def evaluate(self, d, coords: dict):
        out = 1.0
        for den in self.denominators:
            out = out * den.leave_probability(d, coords)
        return 1.0 / out

    def to_json(self) -> dict:
        return {
            "interleaving": self.interleaving.tag,
            "label": self.interleaving.label,
            "denominators": [den.to_json() for den in self.denominators],
        }


def _walk(inter: Interleaving, kind: str) -> tuple[StayInterval, ...]:
    n = inter.n
    state = StayState("x", "x", 1, 1)
    dens = []
    if kind == "discrete":
        dens.append(stay_region(state, n, kind))
    for i, event in enumerate(inter.events):
        k = int(event[1:])
        if event[0] == "L":
            state = StayState(f"y{k - 1}", state.current_high, k, state.upper_count)
        else:
            state = StayState(state.current_low, f"z{k - 1}", state.lower_count, k)
        if i < len(inter.events) - 1:
            dens.append(stay_region(state, n, kind))
    return tuple(dens)


@lru_cache(maxsize=None)
def generate_density_terms(n: int, kind: str) -> tuple[DensityTerm, ...]:
    """One term per interleaving, in canonical enumeration order."""
    _check_kind(kind)
    return tuple(DensityTerm(inter, kind, _walk(inter, kind)) for inter in enumerate_interleavings(n))


def term_dump(n: int, kind: str) -> list[dict]:
    return [t.to_json() for t in generate_density_terms(n, kind)]


def evaluate_general_density(d, point: JointPoint, n: int | None = None):
    """Generated joint density (or mass) of ``Z_n`` at ``point``.

    Returns 0 off the ordered domain.  Raises DomainError if a leave
    probability vanishes at an in-domain point of positive density.
    Works on batched points (array coordinates) as well as scalars.
    """
    if n is None:
        n = point.n
    if point.n != n:
        raise ValueError(f"point has dimension {2 * point.n - 1}, expected {2 * n - 1}")
    coords = {k: np.asarray(v, dtype=float) for k, v in point.coords().items()}
    scalar = all(v.ndim == 0 for v in coords.values())
    ordered = np.asarray(point.is_ordered())
    main = np.ones(np.broadcast(*coords.values()).shape)
    for v in coords.values():
        main = main * d.mass_or_density(v)
    live = ordered & (main > 0)
    total = np.zeros_like(main)
    if np.any(live):
        sub = {k: np.broadcast_to(v, main.shape)[live] for k, v in coords.items()}
        acc = np.zeros(int(np.count_nonzero(live)))
        for term in generate_density_terms(n, d.kind):
            prod = np.ones_like(acc)
            for den in term.denominators:
                leave = den.leave_probability(d, sub)
                if np.any(leave <= 0):
                    raise DomainError(f"stay-region denominator for {den} vanishes at an in-domain point")
                prod = prod * leave
            acc = acc + 1.0 / prod
        total[live] = main[live] * acc
    return float(total) if scalar else total
