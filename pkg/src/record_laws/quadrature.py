"""Adaptive Gauss-Kronrod quadrature and iterated integration over ordered sections.

The 15-point Kronrod rule never evaluates the panel endpoints, so
integrable endpoint singularities (the logarithms produced by
``log F`` and ``log(1 - F)`` at F in {0, 1}) are admissible.

Nested integration is batched: every level integrates a whole batch of
integrands (one per outer node) on a shared panel partition, so the
innermost integrand is evaluated on large numpy arrays instead of point by
point.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Collection, Mapping, Sequence

import numpy as np

from .errors import NumericError

__all__ = [
    "QuadratureResult",
    "SectionRegion",
    "integrate_1d",
    "integrate_section",
    "DEFAULT_REL_TOL",
    "DEFAULT_ABS_TOL",
    "MAX_PANELS",
]

DEFAULT_REL_TOL = 1e-8
DEFAULT_ABS_TOL = 1e-12
MAX_PANELS = 2**10
_CHUNK_ROWS = 2**15

# Kronrod nodes on [-1, 1] (non-negative half) and weights; every second
# node (odd index) is also a 7-point Gauss node.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # ascending, 15 nodes
WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
WEIGHTS_G = np.zeros(15)
WEIGHTS_G[[1, 3, 5]] = _WG[:3]
WEIGHTS_G[[9, 11, 13]] = _WG[2::-1]
WEIGHTS_G[7] = _WG[3]
# absorb the decimal rounding of the tables so constants integrate exactly
WEIGHTS_K[7] += 2.0 - math.fsum(WEIGHTS_K)
WEIGHTS_G[7] += 2.0 - math.fsum(WEIGHTS_G)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    level: int | None = None  # nesting level that failed to converge, if any

    def __float__(self) -> float:
        return self.value

    def require(self, what: str = "integral") -> float:
        """Return the value or raise NumericError when not converged."""
        if not self.converged:
            raise NumericError(
                f"{what} did not converge (estimate {self.value!r}, error {self.error_estimate!r})",
                estimate=self.value,
                error_estimate=self.error_estimate,
                level=self.level,
            )
        return self.value


def _panel_nodes(a: float, b: float) -> np.ndarray:
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * NODES


def _batched_adaptive(h, batch: int, a: float, b: float, rel_tol: float, abs_tol: float,
                      max_panels: int, initial_panels: int = 1):
    """Integrate ``batch`` functions over [a, b] on one shared panel partition.

    ``h(t)`` receives nodes of shape (k,) and returns ``(values, inner_errors)``
    each of shape (batch, k).  Returns values, error estimates (both shape
    (batch,)), the number of node evaluations and a convergence flag.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    pending = list(zip(edges[:-1], edges[1:]))
    panels: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}
    evaluations = 0
    while True:
        if pending:
            t = np.concatenate([_panel_nodes(lo, hi) for lo, hi in pending])
            vals, errs = h(t)
            vals = np.asarray(vals, dtype=float).reshape(batch, len(pending), 15)
            errs = np.asarray(errs, dtype=float).reshape(batch, len(pending), 15)
            evaluations += t.size
            for j, (lo, hi) in enumerate(pending):
                half = 0.5 * (hi - lo)
                kron = half * (vals[:, j, :] @ WEIGHTS_K)
                gauss = half * (vals[:, j, :] @ WEIGHTS_G)
                inner = half * (errs[:, j, :] @ np.abs(WEIGHTS_K))
                err = np.abs(kron - gauss) + inner
                err[~np.isfinite(kron)] = np.inf
                panels[(lo, hi)] = (kron, err)
            pending = []
        keys = sorted(panels)
        kron = np.stack([panels[k][0] for k in keys])  # (P, batch)
        err = np.stack([panels[k][1] for k in keys])
        # summation over panels in left-to-right order is deterministic
        total = np.sum(kron, axis=0)
        total_err = np.sum(err, axis=0)
        tol = np.maximum(rel_tol * np.abs(total), abs_tol)
        if np.all(total_err <= tol):
            return total, total_err, evaluations, True
        if len(panels) >= max_panels:
            return total, total_err, evaluations, False
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.max(np.where(err > 0, err / tol, 0.0), axis=1)
        ratio = np.nan_to_num(ratio, nan=np.inf, posinf=np.inf)
        worst = float(np.max(ratio))
        cutoff = 0.25 * worst if math.isfinite(worst) else math.inf
        chosen = [keys[i] for i in range(len(keys)) if ratio[i] >= cutoff]
        room = max_panels - len(panels)
        chosen = sorted(chosen, key=lambda k: -ratio[keys.index(k)])[:max(1, room)]
        for lo, hi in chosen:
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                return total, total_err, evaluations, False
            del panels[(lo, hi)]
            pending.extend([(lo, mid), (mid, hi)])


def _call_vectorised(fn, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(t))) for t in x])


def integrate_1d(fn: Callable, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL,
                 abs_tol: float = DEFAULT_ABS_TOL, max_panels: int = MAX_PANELS) -> QuadratureResult:
    """Adaptive bisection with the 15-point Kronrod rule on (a, b).

    ``fn`` may be vectorised (array in, array out) or scalar.  Converged
    when the summed local error estimate is at most
    ``max(rel_tol * |value|, abs_tol)``; otherwise ``converged`` is False and
    ``value`` carries the best estimate.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_1d needs finite limits; substitute u = F(x) first")
    if not a < b:
        raise ValueError(f"integrate_1d needs a < b, got ({a}, {b})")

    def h(t):
        v = _call_vectorised(fn, t)[None, :]
        return v, np.zeros_like(v)

    vals, errs, evals, ok = _batched_adaptive(h, 1, a, b, rel_tol, abs_tol, max_panels)
    return QuadratureResult(float(vals[0]), float(errs[0]), evals, ok)


@dataclass(frozen=True)
class SectionRegion:
    """Coordinate section of an ordered chain ``names[0] < names[1] < ...``.

    Coordinates listed in ``fixed`` are held at the given values; the others
    are integrated out.  ``lower``/``upper`` bound the chain (defaults to the
    support of the model passed to :func:`integrate_section`, or must be
    finite when integrating in plain Lebesgue measure).
    """

    names: tuple[str, ...]
    fixed: Mapping[str, float]
    lower: float | None = None
    upper: float | None = None

    def free(self) -> list[str]:
        return [n for n in self.names if n not in self.fixed]


def _smooth_step(s):
    # s -> s^2 (3 - 2 s): vanishing derivative at both ends softens endpoint singularities
    return s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s)


def _processing_order(names: Sequence[str], fixed: Mapping[str, float]) -> list[int]:
    """Order in which free chain positions are integrated (outermost first).

    Within a run of free coordinates, integration starts next to a fixed
    coordinate and moves towards the open end of the chain, so that the
    Jacobians of the substitution cancel the 1/F and 1/(1-F) factors of the
    record densities.  A chain with no fixed coordinate starts in the middle.
    """
    order: list[int] = []
    k = len(names)
    i = 0
    while i < k:
        if names[i] in fixed:
            i += 1
            continue
        j = i
        while j < k and names[j] not in fixed:
            j += 1
        run = list(range(i, j))
        left_open, right_open = i == 0, j == k
        if left_open and right_open:
            mid = (k - 1) // 2
            order += [mid] + list(range(mid + 1, k)) + list(range(mid - 1, -1, -1))
        elif left_open:
            order += run[::-1]
        else:
            order += run
        i = j
    return order


def integrate_section(fn: Callable[[dict], np.ndarray], region: SectionRegion, dist=None,
                      rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL,
                      max_panels: int = MAX_PANELS, constant_in: Collection[str] = ()) -> QuadratureResult:
    """Iterated integral of ``fn`` over the free coordinates of ``region``.

    With ``dist`` given, every free coordinate is integrated against the
    model's law through ``u = F(x)``: ``fn`` must be the integrand *per unit
    of probability*, i.e. the joint density divided by ``f`` at each free
    coordinate.  Without ``dist`` the measure is plain Lebesgue on
    ``[region.lower, region.upper]``.

    ``fn`` receives a dict mapping every chain name to an array (free
    coordinates) or a float (fixed ones) and must return an array.  Each of
    the ``L`` levels is held to ``rel_tol / (L + 1)``.

    ``constant_in`` names free coordinates on which ``fn`` does not depend;
    those levels are integrated exactly (interval length) instead of by
    quadrature, and ``fn`` sees the interval midpoint there.
    """
    names = tuple(region.names)
    fixed = dict(region.fixed)
    constant_in = frozenset(constant_in) - set(fixed)
    unknown = set(fixed) - set(names)
    if unknown:
        raise ValueError(f"fixed coordinates {sorted(unknown)} are not in the chain")
    if dist is not None:
        to_u = lambda v: float(dist.cdf(v))
        lo_u = 0.0 if region.lower is None else to_u(region.lower)
        hi_u = 1.0 if region.upper is None else to_u(region.upper)
    else:
        if region.lower is None or region.upper is None:
            raise ValueError("Lebesgue sections need finite region bounds")
        to_u = float
        lo_u, hi_u = float(region.lower), float(region.upper)
    fixed_u = {n: to_u(v) for n, v in fixed.items()}

    seq = [fixed_u[n] for n in names if n in fixed_u]
    if any(not b < c for b, c in zip([lo_u] + seq, seq + [hi_u])):
        return QuadratureResult(0.0, 0.0, 0, True)

    order = _processing_order(names, fixed)
    depth = len(order)
    if depth == 0:
        coords = dict(fixed)
        return QuadratureResult(float(np.asarray(fn(coords))), 0.0, 1, True)

    # static neighbour sources for each level: ("fix", u) or ("var", level)
    sources = []
    for level, pos in enumerate(order):
        known = {order[j]: j for j in range(level)}
        def neighbour(step, pos=pos, known=known):
            p = pos + step
            while 0 <= p < len(names):
                if names[p] in fixed_u:
                    return ("fix", fixed_u[names[p]])
                if p in known:
                    return ("var", known[p])
                p += step
            return ("fix", lo_u if step < 0 else hi_u)
        sources.append((neighbour(-1), neighbour(+1)))

    level_rtol = rel_tol / (depth + 1)
    level_atol = abs_tol / (depth + 1)
    stats = {"evals": 0, "failed": None}

    def bound(src, P):
        kind, val = src
        if kind == "fix":
            return np.full(P.shape[0], val)
        return P[:, val]

    def leaf(P):
        coords: dict = dict(fixed)
        for level, pos in enumerate(order):
            u = P[:, level]
            coords[names[pos]] = dist.quantile(np.clip(u, 0.0, 1.0)) if dist is not None else u
        out = np.asarray(fn(coords), dtype=float)
        return np.broadcast_to(out, (P.shape[0],)).copy()

    def solve(level, P):
        if level == depth:
            return leaf(P), np.zeros(P.shape[0])
        m = P.shape[0]
        lo = bound(sources[level][0], P)
        hi = bound(sources[level][1], P)
        width = hi - lo
        if names[order[level]] in constant_in:
            Pn = np.concatenate([P, (lo + 0.5 * width)[:, None]], axis=1)
            v, e = solve(level + 1, Pn)
            return v * width, e * width

        def h(s):
            t, dt = _smooth_step(s)
            V = lo[:, None] + width[:, None] * t[None, :]
            # bound memory: deeper levels see at most _CHUNK_ROWS outer nodes at once
            step = max(1, _CHUNK_ROWS // s.size)
            v = np.empty((m, s.size))
            e = np.empty((m, s.size))
            for r0 in range(0, m, step):
                r1 = min(m, r0 + step)
                Pn = np.concatenate([np.repeat(P[r0:r1], s.size, axis=0), V[r0:r1].reshape(-1, 1)], axis=1)
                vc, ec = solve(level + 1, Pn)
                v[r0:r1] = vc.reshape(r1 - r0, s.size)
                e[r0:r1] = ec.reshape(r1 - r0, s.size)
            fac = width[:, None] * dt[None, :]
            # nodes that collapse onto a neighbour carry no measure, even where fn is infinite there
            with np.errstate(invalid="ignore"):
                return np.where(fac > 0, v * fac, 0.0), np.where(fac > 0, e * fac, 0.0)

        vals, errs, evals, ok = _batched_adaptive(h, m, 0.0, 1.0, level_rtol, level_atol, max_panels)
        stats["evals"] += evals
        if not ok and stats["failed"] is None:
            stats["failed"] = level
        return vals, errs

    vals, errs = solve(0, np.zeros((1, 0)))
    failed = stats["failed"]
    total_err = float(errs[0])
    tol = max(rel_tol * abs(float(vals[0])), abs_tol)
    converged = failed is None and total_err <= tol
    if failed is None and not converged:
        failed = 0
    return QuadratureResult(float(vals[0]), total_err, stats["evals"], converged, None if converged else failed)
