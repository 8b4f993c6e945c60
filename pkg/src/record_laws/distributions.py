"""Univariate laws exposing every quantity the record formulas consume.

All evaluation methods are vectorised: they accept a float or an array and
return a float or an array of the same shape.  Besides ``F`` (``cdf``) each
model also exposes the strict CDF ``F*(y) = P(Y < y)`` and both survival
functions, computed directly rather than as ``1 - F`` so that reflecting a
law (``Y -> -Y``) swaps them exactly.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar

import numpy as np

from .errors import DomainError, TableFormatError

__all__ = [
    "DistributionModel",
    "Uniform",
    "Exponential",
    "Pareto",
    "DiscreteDistribution",
    "Reflected",
    "finite_uniform",
    "load_tabulated",
    "parse_descriptor",
    "reflect",
]

_TABLE_SUM_TOL = 1e-9
_MASS_SUM_TOL = 1e-12


def _as_array(y):
    arr = np.asarray(y, dtype=float)
    return arr, arr.ndim == 0


def _out(values, scalar):
    if scalar:
        return float(values)
    return values


def _fmt(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


class DistributionModel(ABC):
    """Common interface of continuous and discrete laws.

    Subclasses are immutable value objects and safe to share between
    worker processes.
    """

    kind: ClassVar[str]

    @property
    @abstractmethod
    def name(self) -> str: ...

    @property
    @abstractmethod
    def parameters(self) -> tuple[float, ...]: ...

    @property
    @abstractmethod
    def lep(self) -> float:
        """Lower endpoint of the support."""

    @property
    @abstractmethod
    def uep(self) -> float:
        """Upper endpoint of the support."""

    @property
    @abstractmethod
    def descriptor(self) -> str:
        """Model string accepted by :func:`parse_descriptor`."""

    @abstractmethod
    def cdf(self, y):
        """F(y) = P(Y <= y)."""

    @abstractmethod
    def sf(self, y):
        """1 - F(y) = P(Y > y)."""

    def strict_cdf(self, y):
        """F*(y) = P(Y < y); equal to ``cdf`` for atomless laws."""
        return self.cdf(y)

    def strict_sf(self, y):
        """1 - F*(y) = P(Y >= y)."""
        return self.sf(y)

    @abstractmethod
    def mass_or_density(self, y):
        """Lebesgue density (continuous) or point mass (discrete); 0 off support."""

    @abstractmethod
    def quantile(self, p):
        """Generalised inverse inf{y : F(y) >= p}."""

    def hazard(self, y):
        """r(y) = f(y) / (1 - F(y)); raises DomainError where F(y) = 1."""
        arr, scalar = _as_array(y)
        tail = np.asarray(self.sf(arr), dtype=float)
        if np.any(tail <= 0.0):
            raise DomainError(f"hazard undefined where F(y) = 1 ({self.descriptor})")
        return _out(np.asarray(self.mass_or_density(arr)) / tail, scalar)

    def _check_p(self, p):
        arr, scalar = _as_array(p)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("quantile argument must lie in [0, 1]")
        return arr, scalar

    def __str__(self) -> str:
        return self.descriptor


@dataclass(frozen=True)
class Uniform(DistributionModel):
    a: float = 0.0
    b: float = 1.0
    kind: ClassVar[str] = "continuous"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"uniform needs finite a < b, got ({self.a}, {self.b})")

    name = property(lambda self: "uniform")
    parameters = property(lambda self: (float(self.a), float(self.b)))
    lep = property(lambda self: float(self.a))
    uep = property(lambda self: float(self.b))
    descriptor = property(lambda self: f"uniform:{_fmt(self.a)},{_fmt(self.b)}")

    def cdf(self, y):
        arr, scalar = _as_array(y)
        return _out(np.clip((arr - self.a) / (self.b - self.a), 0.0, 1.0), scalar)

    def sf(self, y):
        arr, scalar = _as_array(y)
        return _out(np.clip((self.b - arr) / (self.b - self.a), 0.0, 1.0), scalar)

    def mass_or_density(self, y):
        arr, scalar = _as_array(y)
        inside = (arr >= self.a) & (arr <= self.b)
        return _out(np.where(inside, 1.0 / (self.b - self.a), 0.0), scalar)

    def quantile(self, p):
        arr, scalar = self._check_p(p)
        return _out(self.a + arr * (self.b - self.a), scalar)


@dataclass(frozen=True)
class Exponential(DistributionModel):
    rate: float = 1.0
    kind: ClassVar[str] = "continuous"

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"exponential rate must be positive, got {self.rate}")

    name = property(lambda self: "exp")
    parameters = property(lambda self: (float(self.rate),))
    lep = property(lambda self: 0.0)
    uep = property(lambda self: math.inf)
    descriptor = property(lambda self: f"exp:{_fmt(self.rate)}")

    def cdf(self, y):
        arr, scalar = _as_array(y)
        with np.errstate(over="ignore"):
            v = np.where(arr > 0.0, -np.expm1(-self.rate * np.maximum(arr, 0.0)), 0.0)
        return _out(v, scalar)

    def sf(self, y):
        arr, scalar = _as_array(y)
        v = np.where(arr > 0.0, np.exp(-self.rate * np.maximum(arr, 0.0)), 1.0)
        return _out(v, scalar)

    def mass_or_density(self, y):
        arr, scalar = _as_array(y)
        v = np.where(arr >= 0.0, self.rate * np.exp(-self.rate * np.maximum(arr, 0.0)), 0.0)
        return _out(v, scalar)

    def quantile(self, p):
        arr, scalar = self._check_p(p)
        with np.errstate(divide="ignore"):
            v = -np.log1p(-arr) / self.rate
        return _out(v, scalar)


@dataclass(frozen=True)
class Pareto(DistributionModel):
    """Pareto law with shape ``alpha`` and scale ``xm``: F(y) = 1 - (xm/y)^alpha, y >= xm."""

    alpha: float = 2.0
    xm: float = 1.0
    kind: ClassVar[str] = "continuous"

    def __post_init__(self):
        if not (self.alpha > 0 and self.xm > 0 and math.isfinite(self.alpha) and math.isfinite(self.xm)):
            raise ValueError(f"pareto needs alpha > 0 and xm > 0, got ({self.alpha}, {self.xm})")

    name = property(lambda self: "pareto")
    parameters = property(lambda self: (float(self.alpha), float(self.xm)))
    lep = property(lambda self: float(self.xm))
    uep = property(lambda self: math.inf)
    descriptor = property(lambda self: f"pareto:{_fmt(self.alpha)},{_fmt(self.xm)}")

    def _log_ratio(self, arr):
        # log(xm / y), clipped to 0 below the scale
        return np.log(self.xm / np.maximum(arr, self.xm))

    def cdf(self, y):
        arr, scalar = _as_array(y)
        return _out(-np.expm1(self.alpha * self._log_ratio(arr)), scalar)

    def sf(self, y):
        arr, scalar = _as_array(y)
        return _out(np.exp(self.alpha * self._log_ratio(arr)), scalar)

    def mass_or_density(self, y):
        arr, scalar = _as_array(y)
        safe = np.maximum(arr, self.xm)
        v = np.where(arr >= self.xm, self.alpha * np.exp(self.alpha * self._log_ratio(safe)) / safe, 0.0)
        return _out(v, scalar)

    def quantile(self, p):
        arr, scalar = self._check_p(p)
        with np.errstate(divide="ignore"):
            v = self.xm * np.exp(-np.log1p(-arr) / self.alpha)
        return _out(v, scalar)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution(DistributionModel):
    """Finite discrete law on strictly increasing support points."""

    values: tuple[float, ...]
    masses: tuple[float, ...]
    label: str = "discrete"
    source: str | None = None
    kind: ClassVar[str] = "discrete"
    _v: np.ndarray = field(init=False, repr=False)
    _m: np.ndarray = field(init=False, repr=False)
    _cum: np.ndarray = field(init=False, repr=False)
    _rcum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if v.ndim != 1 or v.size == 0 or v.shape != m.shape:
            raise ValueError("values and masses must be non-empty sequences of equal length")
        if np.any(np.diff(v) <= 0):
            raise ValueError("support values must be strictly increasing")
        if np.any(~np.isfinite(v)):
            raise ValueError("support values must be finite")
        if np.any(m <= 0):
            raise ValueError("masses must be positive")
        if abs(float(np.sum(m)) - 1.0) > _MASS_SUM_TOL:
            raise ValueError(f"masses sum to {np.sum(m)!r}, not 1")
        cum = np.cumsum(m)
        rcum = np.cumsum(m[::-1])[::-1]
        cum[-1] = 1.0
        rcum[0] = 1.0
        for arr in (v, m, cum, rcum):
            arr.setflags(write=False)
        object.__setattr__(self, "values", tuple(float(t) for t in v))
        object.__setattr__(self, "masses", tuple(float(t) for t in m))
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_m", m)
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_rcum", rcum)

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.values == other.values and self.masses == other.masses

    def __hash__(self):
        return hash((self.values, self.masses))

    name = property(lambda self: self.label)
    parameters = property(lambda self: tuple(self.masses))
    lep = property(lambda self: self.values[0])
    uep = property(lambda self: self.values[-1])

    @property
    def descriptor(self) -> str:
        if self.source is not None:
            return self.source
        return "pmf:" + ";".join(f"{_fmt(v)}={m!r}" for v, m in zip(self.values, self.masses))

    @property
    def support(self) -> np.ndarray:
        return self._v

    @property
    def mass_array(self) -> np.ndarray:
        return self._m

    def _below(self, arr, side):
        # number of support points <= arr (side="right") or < arr (side="left")
        return np.searchsorted(self._v, arr, side=side)

    def cdf(self, y):
        arr, scalar = _as_array(y)
        k = self._below(arr, "right")
        return _out(np.where(k > 0, self._cum[np.maximum(k - 1, 0)], 0.0), scalar)

    def strict_cdf(self, y):
        arr, scalar = _as_array(y)
        k = self._below(arr, "left")
        return _out(np.where(k > 0, self._cum[np.maximum(k - 1, 0)], 0.0), scalar)

    def sf(self, y):
        arr, scalar = _as_array(y)
        k = self._below(arr, "right")
        n = self._v.size
        return _out(np.where(k < n, self._rcum[np.minimum(k, n - 1)], 0.0), scalar)

    def strict_sf(self, y):
        arr, scalar = _as_array(y)
        k = self._below(arr, "left")
        n = self._v.size
        return _out(np.where(k < n, self._rcum[np.minimum(k, n - 1)], 0.0), scalar)

    def mass_or_density(self, y):
        arr, scalar = _as_array(y)
        n = self._v.size
        k = np.minimum(self._below(arr, "left"), n - 1)
        hit = self._v[k] == arr
        return _out(np.where(hit, self._m[k], 0.0), scalar)

    def quantile(self, p):
        arr, scalar = self._check_p(p)
        k = np.searchsorted(self._cum, arr, side="left")
        k = np.clip(k, 0, self._v.size - 1)
        return _out(self._v[k], scalar)


@dataclass(frozen=True)
class Reflected(DistributionModel):
    """Law of ``-Y`` for a continuous base law."""

    base: DistributionModel
    kind: ClassVar[str] = "continuous"

    def __post_init__(self):
        if self.base.kind != "continuous":
            raise ValueError("use reflect() for discrete laws")

    name = property(lambda self: "neg:" + self.base.name)
    parameters = property(lambda self: self.base.parameters)
    lep = property(lambda self: -self.base.uep)
    uep = property(lambda self: -self.base.lep)
    descriptor = property(lambda self: "neg:" + self.base.descriptor)

    def cdf(self, y):
        arr, scalar = _as_array(y)
        return _out(self.base.sf(-arr), scalar)

    def sf(self, y):
        arr, scalar = _as_array(y)
        return _out(self.base.cdf(-arr), scalar)

    def mass_or_density(self, y):
        arr, scalar = _as_array(y)
        return _out(self.base.mass_or_density(-arr), scalar)

    def quantile(self, p):
        arr, scalar = self._check_p(p)
        return _out(-np.asarray(self.base.quantile(1.0 - arr)), scalar)


def reflect(d: DistributionModel) -> DistributionModel:
    """Return the law of ``-Y``."""
    if isinstance(d, Reflected):
        return d.base
    if isinstance(d, DiscreteDistribution):
        source = None
        if d.source is not None:
            source = d.source[4:] if d.source.startswith("neg:") else "neg:" + d.source
        return DiscreteDistribution(
            values=tuple(-v for v in reversed(d.values)),
            masses=tuple(reversed(d.masses)),
            label="neg:" + d.label,
            source=source,
        )
    return Reflected(d)


def finite_uniform(m: int) -> DiscreteDistribution:
    """Uniform law on {1, ..., m}."""
    if int(m) != m or m < 1:
        raise ValueError(f"finite uniform needs a positive integer size, got {m}")
    m = int(m)
    return DiscreteDistribution(
        values=tuple(float(k) for k in range(1, m + 1)),
        masses=(1.0 / m,) * m,
        label="duniform",
        source=f"duniform:{m}",
    )


def load_tabulated(path, descriptor: str | None = None) -> DiscreteDistribution:
    """Read a ``value,probability`` CSV (no header, ``#`` comments) into a discrete law.

    Values must be strictly increasing; masses must be positive and sum to
    1 within 1e-9, after which they are renormalised.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableFormatError(f"cannot read {path}: {exc}") from exc
    values: list[float] = []
    masses: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise TableFormatError(f"{path}:{lineno}: expected 'value,probability', got {raw!r}")
        try:
            value, mass = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise TableFormatError(f"{path}:{lineno}: {exc}") from exc
        if not (math.isfinite(value) and math.isfinite(mass)):
            raise TableFormatError(f"{path}:{lineno}: non-finite entry")
        if mass <= 0:
            raise TableFormatError(f"{path}:{lineno}: non-positive mass {mass!r}")
        if value in values:
            raise TableFormatError(f"{path}:{lineno}: duplicate support value {value!r}")
        if values and value < values[-1]:
            raise TableFormatError(f"{path}:{lineno}: support values must be strictly increasing")
        values.append(value)
        masses.append(mass)
    if not values:
        raise TableFormatError(f"{path}: no data rows")
    total = math.fsum(masses)
    if abs(total - 1.0) > _TABLE_SUM_TOL:
        raise TableFormatError(f"{path}: masses sum to {total!r}, outside 1 +/- {_TABLE_SUM_TOL}")
    masses = [m / total for m in masses]
    return DiscreteDistribution(
        values=tuple(values),
        masses=tuple(masses),
        label="table",
        source=descriptor if descriptor is not None else f"table:{path}",
    )


def _numbers(text: str, count: int, what: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"{what} expects {count} parameter(s), got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ValueError(f"bad parameters for {what}: {text!r}") from exc


def parse_descriptor(text: str) -> DistributionModel:
    """Build a model from a descriptor such as ``exp:1``, ``uniform:0,1``,
    ``pareto:2,1``, ``duniform:5`` or ``table:path.csv``.

    A ``neg:`` prefix gives the reflected law.
    """
    text = text.strip()
    if text.startswith("neg:"):
        return reflect(parse_descriptor(text[4:]))
    head, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"model descriptor needs 'name:params', got {text!r}")
    head = head.lower()
    if head == "uniform":
        return Uniform(*_numbers(rest, 2, "uniform"))
    if head in ("exp", "exponential"):
        return Exponential(*_numbers(rest, 1, "exp"))
    if head == "pareto":
        return Pareto(*_numbers(rest, 2, "pareto"))
    if head == "duniform":
        (m,) = _numbers(rest, 1, "duniform")
        return finite_uniform(m)
    if head == "table":
        return load_tabulated(rest, descriptor=text)
    raise ValueError(f"unknown model {head!r}")
