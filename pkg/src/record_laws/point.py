"""Ordered evaluation points for the joint record-value laws."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["JointPoint", "coordinate_names"]


def coordinate_names(n: int) -> list[str]:
    """Chain order ``y_{n-1} < ... < y1 < x < z1 < ... < z_{n-1}``.

    ``y_k`` is the (k+1)-th lower record value and ``z_k`` the (k+1)-th
    upper record value.
    """
    return [f"y{k}" for k in range(n - 1, 0, -1)] + ["x"] + [f"z{k}" for k in range(1, n)]


@dataclass(frozen=True)
class JointPoint:
    """``x`` with lower records ``lower = (y1, y2, ...)`` and upper ``upper = (z1, z2, ...)``.

    Components may be floats or equally shaped numpy arrays (a batch of points).
    """

    x: object
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or len(self.lower) < 1:
            raise ValueError("a joint point needs equally many (>= 1) lower and upper records")
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "upper", tuple(self.upper))

    @property
    def n(self) -> int:
        return len(self.lower) + 1

    @classmethod
    def from_flat(cls, values: Sequence, n: int | None = None) -> "JointPoint":
        """Build from ``(x, y1, ..., y_{n-1}, z1, ..., z_{n-1})``."""
        values = list(values)
        if n is None:
            if len(values) % 2 == 0:
                raise ValueError(f"a flat point has odd length 2n-1, got {len(values)}")
            n = (len(values) + 1) // 2
        if len(values) != 2 * n - 1:
            raise ValueError(f"n={n} needs {2 * n - 1} coordinates, got {len(values)}")
        return cls(values[0], tuple(values[1:n]), tuple(values[n:]))

    def flat(self) -> tuple:
        return (self.x, *self.lower, *self.upper)

    def coords(self) -> dict:
        out = {"x": self.x}
        out.update({f"y{k}": v for k, v in enumerate(self.lower, start=1)})
        out.update({f"z{k}": v for k, v in enumerate(self.upper, start=1)})
        return out

    def chain(self) -> list:
        return [*reversed(self.lower), self.x, *self.upper]

    def is_ordered(self):
        """Strict chain order; a bool or a bool array for batched points."""
        chain = [np.asarray(c, dtype=float) for c in self.chain()]
        ok = np.ones(np.broadcast(*chain).shape, dtype=bool)
        for a, b in zip(chain, chain[1:]):
            ok &= a < b
        return bool(ok) if ok.ndim == 0 else ok

    def reflected(self) -> "JointPoint":
        """The point seen by the law of -Y: negate and swap lower/upper roles."""
        neg = lambda v: -np.asarray(v, dtype=float) if isinstance(v, np.ndarray) else -v
        return JointPoint(neg(self.x), tuple(neg(v) for v in self.upper), tuple(neg(v) for v in self.lower))
