"""Ground truth independent of the closed forms.

``dp_probability_discrete`` steps the record process draw by draw on a
finite support and accumulates the probability that the record values hit
the target point.  ``mc_box_probability`` estimates a continuous density
by counting simulated record vectors inside a small box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .point import JointPoint

__all__ = ["OracleBound", "MCBoxEstimate", "dp_probability_discrete", "mc_box_probability"]


@dataclass(frozen=True)
class OracleBound:
    """The true probability lies in ``[value_lower, value_lower + tail_bound]``."""

    value_lower: float
    tail_bound: float
    horizon: int

    @property
    def value_upper(self) -> float:
        return self.value_lower + self.tail_bound

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.value_lower - slack <= value <= self.value_upper + slack


def _mass_table(d):
    support = [float(v) for v in d.support]
    masses = [float(m) for m in d.mass_array]
    return dict(zip(support, masses)), support, masses


def dp_probability_discrete(d, point: JointPoint, n: int | None = None, horizon: int = 200) -> OracleBound:
    """P(first observation and records 2..n equal ``point``) by forward recursion.

    The chain state is (lower records seen, upper records seen); the
    current minimum and maximum are then the corresponding target values.
    A draw below the minimum must be exactly the next lower target while
    lower records are pending (anything else kills the path); once all n
    lower records are in, any lower value is harmless.  Likewise above.
    ``value_lower`` is the probability of completion within ``horizon``
    draws; ``tail_bound`` is the probability still alive at the horizon.
    """
    if d.kind != "discrete":
        raise ValueError("the DP oracle needs a discrete model")
    if n is None:
        n = point.n
    if point.n != n:
        raise ValueError(f"point has dimension {2 * point.n - 1}, expected {2 * n - 1}")
    if horizon < 2 * n - 1:
        raise ValueError(f"horizon must be at least 2n-1 = {2 * n - 1}")
    mass, support, masses = _mass_table(d)
    lows = [float(point.x)] + [float(v) for v in point.lower]
    highs = [float(point.x)] + [float(v) for v in point.upper]
    off = [v for v in lows + highs if v not in mass]
    if off:
        raise ValueError(f"coordinates {off} are not support points of {d.descriptor}")
    ordered = all(a > b for a, b in zip(lows, lows[1:])) and all(a < b for a, b in zip(highs, highs[1:]))
    if not ordered:
        return OracleBound(0.0, 0.0, horizon)

    def below(t):  # P(Y < t)
        return math.fsum(m for v, m in zip(support, masses) if v < t)

    def above(t):  # P(Y > t)
        return math.fsum(m for v, m in zip(support, masses) if v > t)

    def between(a, b):  # P(a <= Y <= b)
        return math.fsum(m for v, m in zip(support, masses) if a <= v <= b)

    # transition pieces per state (i, j): i lower and j upper records seen
    stay = {}
    to_lower = {}
    to_upper = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            lo, hi = lows[i - 1], highs[j - 1]
            s = between(lo, hi)
            if i == n:
                s += below(lo)
            if j == n:
                s += above(hi)
            stay[(i, j)] = s
            to_lower[(i, j)] = mass[lows[i]] if i < n else 0.0
            to_upper[(i, j)] = mass[highs[j]] if j < n else 0.0

    live = {(1, 1): mass[lows[0]]}
    done = 0.0
    for _ in range(horizon - 1):
        nxt: dict = {}
        for (i, j), w in live.items():
            if w == 0.0:
                continue
            nxt[(i, j)] = nxt.get((i, j), 0.0) + w * stay[(i, j)]
            if to_lower[(i, j)]:
                key = (i + 1, j)
                nxt[key] = nxt.get(key, 0.0) + w * to_lower[(i, j)]
            if to_upper[(i, j)]:
                key = (i, j + 1)
                nxt[key] = nxt.get(key, 0.0) + w * to_upper[(i, j)]
        done += nxt.pop((n, n), 0.0)
        live = nxt
    tail = math.fsum(live.values())
    return OracleBound(done, tail, horizon)


@dataclass(frozen=True)
class MCBoxEstimate:
    estimate: float
    std_error: float
    censored_fraction: float
    hits: int
    runs: int
    volume: float


def mc_box_probability(d, center: JointPoint, half_width: float, runs: int, seed: int,
                       max_draws: int = 100_000, workers: int | None = None) -> MCBoxEstimate:
    """Density estimate: P(record vector in the box around ``center``) / box volume.

    Censored runs count as misses and are reported through
    ``censored_fraction``.
    """
    from .simulation import run_batch

    if d.kind != "continuous":
        raise ValueError("box estimates need a continuous model")
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    chain = [float(v) for v in center.chain()]
    lows = [c - half_width for c in chain]
    highs = [c + half_width for c in chain]
    if not (d.lep <= lows[0] and highs[-1] <= d.uep):
        raise ValueError("box leaves the support of the model")
    if any(h >= l for h, l in zip(highs, lows[1:])):
        raise ValueError("box crosses the boundary of the ordered domain")
    dim = len(chain)
    volume = (2.0 * half_width) ** dim
    summary = run_batch(d, center.n, runs, seed, max_draws=max_draws, bins=1, workers=workers,
                        box=([float(v) for v in center.flat()], float(half_width)))
    hits = int(summary.box_hits)
    p = hits / runs
    return MCBoxEstimate(
        estimate=p / volume,
        std_error=math.sqrt(p * (1.0 - p) / runs) / volume,
        censored_fraction=summary.censored_fraction,
        hits=hits,
        runs=runs,
        volume=volume,
    )
