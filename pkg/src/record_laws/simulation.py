"""Batch simulation of the record process, empirical summaries and goodness of fit.

Runs are split into fixed-size shards.  Shard ``i`` draws from a Philox
counter-based generator keyed by ``SeedSequence([seed, i])``, so results
do not depend on how shards are spread over worker processes.  Within a
shard all runs advance together in blocks of draws (numpy arrays); a run
leaves the active set once both n-th records are seen.
"""

from __future__ import annotations

import csv
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import stats

from .errors import StatisticsError
from .interleaving import enumerate_interleavings, generate_density_terms
from .marginals import PAIRS, numeric_marginal
from .point import coordinate_names
from .quadrature import SectionRegion, integrate_section
from .records import Interleaving, RecordScanner, RecordTrace

__all__ = [
    "SHARD_SIZE",
    "TraceBatch",
    "PairHistogram",
    "EmpiricalSummary",
    "FitReport",
    "simulate_one",
    "simulate_shard",
    "run_batch",
    "compare_to_closed_form",
    "ordering_probabilities",
    "ordering_frequency_check",
    "pair_bin_masses",
    "resolve_workers",
    "shard_generator",
]

SHARD_SIZE = 2**16
_BLOCK_CELLS = 2**22  # cap on active_runs * block_length per step
_MIN_COMPLETED = 10_000


def _env_int(name: str) -> int | None:
    text = os.environ.get(name)
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {text!r}") from None


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit value, else RECORD_LAWS_WORKERS, else CPU count.

    RECORD_LAWS_THREADS caps the result.
    """
    n = workers if workers is not None else _env_int("RECORD_LAWS_WORKERS")
    if n is None:
        n = os.cpu_count() or 1
    cap = _env_int("RECORD_LAWS_THREADS")
    if cap is not None:
        n = min(n, cap)
    return max(1, int(n))


def shard_generator(seed: int, shard_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(shard_index)])))


def simulate_one(d, n: int, stream: np.random.Generator, max_draws: int) -> RecordTrace:
    """Draw ``quantile(U)`` one value at a time until both n-th records appear or ``max_draws``."""
    if max_draws < 2 * n - 1:
        raise ValueError(f"max_draws must be at least 2n-1 = {2 * n - 1}")
    scanner = RecordScanner(n)
    for _ in range(max_draws):
        if scanner.feed(float(d.quantile(stream.random()))):
            break
    return scanner.trace()


@dataclass
class TraceBatch:
    """Record data of many runs; unreached entries hold time 0 and value NaN.

    For continuous models ``upper_u``/``lower_u`` hold the record values on
    the uniform scale (``F`` of the value), which the histograms use.
    """

    n: int
    upper_times: np.ndarray
    lower_times: np.ndarray
    upper_values: np.ndarray
    lower_values: np.ndarray
    draws: np.ndarray
    complete: np.ndarray
    upper_u: np.ndarray | None = None
    lower_u: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.draws.size)

    def trace(self, i: int) -> RecordTrace:
        ku = int(np.count_nonzero(self.upper_times[i]))
        kl = int(np.count_nonzero(self.lower_times[i]))
        return RecordTrace(
            n_target=self.n,
            upper_times=tuple(int(t) for t in self.upper_times[i, :ku]),
            lower_times=tuple(int(t) for t in self.lower_times[i, :kl]),
            upper_values=tuple(float(v) for v in self.upper_values[i, :ku]),
            lower_values=tuple(float(v) for v in self.lower_values[i, :kl]),
            draws_consumed=int(self.draws[i]),
        )

    def side_codes(self) -> np.ndarray:
        """Per run an integer whose bits (most significant first) mark upper events."""
        m = self.n - 1
        times = np.concatenate([self.upper_times[:, 1:], self.lower_times[:, 1:]], axis=1)
        is_upper = np.concatenate([np.ones(m, dtype=np.int64), np.zeros(m, dtype=np.int64)])
        order = np.argsort(times, axis=1, kind="stable")
        bits = is_upper[order]
        weights = 1 << np.arange(2 * m - 1, -1, -1, dtype=np.int64)
        return bits @ weights


def _side_string(code: int, n: int) -> str:
    width = 2 * (n - 1)
    return "".join("U" if (code >> (width - 1 - i)) & 1 else "L" for i in range(width))


def simulate_shard(d, n: int, runs: int, rng: np.random.Generator, max_draws: int) -> TraceBatch:
    """Simulate ``runs`` sequences together; the block length doubles each step."""
    if max_draws < 2 * n - 1:
        raise ValueError(f"max_draws must be at least 2n-1 = {2 * n - 1}")
    continuous = d.kind == "continuous"

    def draw(shape):
        u = rng.random(shape)
        return u if continuous else d.quantile(u)

    first = draw(runs)
    ut = np.zeros((runs, n), dtype=np.int64)
    lt = np.zeros((runs, n), dtype=np.int64)
    uv = np.full((runs, n), np.nan)
    lv = np.full((runs, n), np.nan)
    ut[:, 0] = lt[:, 0] = 1
    uv[:, 0] = lv[:, 0] = first
    cur_max = first.copy()
    cur_min = first.copy()
    uc = np.ones(runs, dtype=np.int64)
    lc = np.ones(runs, dtype=np.int64)
    draws = np.ones(runs, dtype=np.int64)
    lep, uep = (0.0, 1.0) if continuous else (d.lep, d.uep)
    active = np.arange(runs)
    offset, block = 1, 8
    while active.size and offset < max_draws:
        b = int(min(block, max_draws - offset, max(1, _BLOCK_CELLS // active.size)))
        X = draw((active.size, b))
        hi = np.maximum.accumulate(np.concatenate([cur_max[active, None], X], axis=1), axis=1)
        lo = np.minimum.accumulate(np.concatenate([cur_min[active, None], X], axis=1), axis=1)
        is_up = X > hi[:, :-1]
        is_lo = X < lo[:, :-1]
        cu = uc[active, None] + np.cumsum(is_up, axis=1)
        cl = lc[active, None] + np.cumsum(is_lo, axis=1)
        for k in range(2, n + 1):
            for hit_mask, count, times, values in ((is_up & (cu == k), uc, ut, uv), (is_lo & (cl == k), lc, lt, lv)):
                has = hit_mask.any(axis=1) & (count[active] < k)
                if not has.any():
                    continue
                idx = hit_mask.argmax(axis=1)[has]
                rows = active[has]
                times[rows, k - 1] = offset + idx + 1
                values[rows, k - 1] = X[has, idx]
        uc[active] = np.minimum(cu[:, -1], n)
        lc[active] = np.minimum(cl[:, -1], n)
        cur_max[active] = hi[:, -1]
        cur_min[active] = lo[:, -1]
        done = (uc[active] >= n) & (lc[active] >= n)
        finished = active[done]
        draws[finished] = np.maximum(ut[finished, n - 1], lt[finished, n - 1])
        draws[active[~done]] = offset + b
        # a pending record beyond a support endpoint can never occur: censored, stop drawing
        stuck = ~done & (((lc[active] < n) & (cur_min[active] <= lep)) | ((uc[active] < n) & (cur_max[active] >= uep)))
        draws[active[stuck]] = max_draws
        active = active[~done & ~stuck]
        offset += b
        block *= 2
    complete = (uc >= n) & (lc >= n)
    if continuous:
        return TraceBatch(n, ut, lt, d.quantile(np.nan_to_num(uv, nan=0.5)) * np.where(np.isnan(uv), np.nan, 1.0),
                          d.quantile(np.nan_to_num(lv, nan=0.5)) * np.where(np.isnan(lv), np.nan, 1.0),
                          draws, complete, upper_u=uv, lower_u=lv)
    return TraceBatch(n, ut, lt, uv, lv, draws, complete)


@dataclass
class PairHistogram:
    """2-D counts for (lower record p, upper record q).

    ``space`` is ``"F"`` (uniform bins of F(value)) for continuous models or
    ``"support"`` (one cell per support point) for discrete ones.
    """

    pair: tuple[int, int]
    counts: np.ndarray
    y_edges: np.ndarray
    z_edges: np.ndarray
    space: str

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "space": self.space,
            "y_edges": [float(v) for v in self.y_edges],
            "z_edges": [float(v) for v in self.z_edges],
            "counts": self.counts.astype(int).tolist(),
        }


@dataclass
class EmpiricalSummary:
    model: str
    n: int
    runs: int
    seed: int
    max_draws: int
    completed: int
    ordering_counts: dict[str, int]
    pair_histograms: dict[tuple[int, int], PairHistogram]
    completion_counts: Counter = field(default_factory=Counter)
    box_hits: int | None = None

    @property
    def censored(self) -> int:
        return self.runs - self.completed

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.runs

    def draws_quantiles(self, probs=(0.5, 0.9, 0.99, 0.999, 1.0)) -> dict[str, int]:
        """Exact quantiles of the completion time over completed runs."""
        if not self.completion_counts:
            return {}
        keys = sorted(self.completion_counts)
        cum = np.cumsum([self.completion_counts[k] for k in keys])
        out = {}
        for p in probs:
            i = int(np.searchsorted(cum, math.ceil(p * cum[-1]) if p > 0 else 1, side="left"))
            out[f"{p:g}"] = int(keys[min(i, len(keys) - 1)])
        return out

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "runs": self.runs,
            "seed": self.seed,
            "max_draws": self.max_draws,
            "completed": self.completed,
            "censored_fraction": self.censored_fraction,
            "ordering_counts": dict(self.ordering_counts),
            "draws_to_completion": self.draws_quantiles(),
            "pair_histograms": [h.to_json() for _, h in sorted(self.pair_histograms.items())],
        }


def _pairs_for(n: int):
    return [pq for pq in PAIRS if max(pq) <= n]


def _histograms(d, batch: TraceBatch, bins: int) -> dict:
    ok = batch.complete
    out = {}
    if d.kind == "continuous":
        edges = np.linspace(0.0, 1.0, bins + 1)
        for p, q in _pairs_for(batch.n):
            counts, _, _ = np.histogram2d(batch.lower_u[ok, p - 1], batch.upper_u[ok, q - 1], bins=[edges, edges])
            out[(p, q)] = PairHistogram((p, q), counts.astype(np.int64), edges, edges, "F")
    else:
        support = d.support
        m = support.size
        for p, q in _pairs_for(batch.n):
            iy = np.searchsorted(support, batch.lower_values[ok, p - 1])
            iz = np.searchsorted(support, batch.upper_values[ok, q - 1])
            counts = np.bincount(iy * m + iz, minlength=m * m).reshape(m, m)
            out[(p, q)] = PairHistogram((p, q), counts.astype(np.int64), support.copy(), support.copy(), "support")
    return out


def _in_box(batch: TraceBatch, box) -> np.ndarray:
    center, hw = box
    n = batch.n
    vals = [batch.upper_values[:, 0]] + [batch.lower_values[:, k] for k in range(1, n)] + \
           [batch.upper_values[:, k] for k in range(1, n)]
    hit = batch.complete.copy()
    for v, c in zip(vals, center):
        hit &= np.abs(v - c) <= hw
    return hit


@dataclass
class _ShardOut:
    completed: int
    ordering_codes: Counter
    histograms: dict
    completion_counts: Counter
    box_hits: int
    rows: list | None


def _trace_rows(batch: TraceBatch, first_id: int) -> list:
    rows = []
    n = batch.n
    codes = batch.side_codes()
    for i in np.flatnonzero(batch.complete):
        tag = Interleaving.from_sides(_side_string(int(codes[i]), n)).tag
        rows.append(
            [first_id + int(i), tag]
            + [repr(float(v)) for v in batch.lower_values[i, 1:]]
            + [repr(float(batch.upper_values[i, 0]))]
            + [repr(float(v)) for v in batch.upper_values[i, 1:]]
            + [int(t) for t in batch.upper_times[i, 1:]]
            + [int(t) for t in batch.lower_times[i, 1:]]
            + [int(batch.draws[i])]
        )
    return rows


def _shard_task(args) -> _ShardOut:
    d, n, runs, seed, shard_index, max_draws, bins, box, keep_rows = args
    batch = simulate_shard(d, n, runs, shard_generator(seed, shard_index), max_draws)
    ok = batch.complete
    codes = Counter(batch.side_codes()[ok].tolist())
    hist = _histograms(d, batch, bins)
    comp = Counter(batch.draws[ok].tolist())
    hits = int(np.count_nonzero(_in_box(batch, box))) if box is not None else 0
    rows = _trace_rows(batch, shard_index * SHARD_SIZE) if keep_rows else None
    return _ShardOut(int(ok.sum()), codes, hist, comp, hits, rows)


def trace_csv_header(n: int) -> list[str]:
    return (["run_id", "ordering"] + [f"y{k}" for k in range(2, n + 1)] + ["x"]
            + [f"z{k}" for k in range(2, n + 1)] + [f"u{k}" for k in range(2, n + 1)]
            + [f"l{k}" for k in range(2, n + 1)] + ["draws"])


def run_batch(d, n: int, runs: int, seed: int, max_draws: int = 100_000, bins: int = 20,
              workers: int | None = None, export: str | os.PathLike | None = None, box=None) -> EmpiricalSummary:
    """Simulate ``runs`` sequences and summarise the completed ones.

    ``export`` writes one CSV row per completed trace.  ``box`` is an
    optional ``(center_flat, half_width)`` whose hit count is recorded.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    sizes = [min(SHARD_SIZE, runs - s) for s in range(0, runs, SHARD_SIZE)]
    tasks = [(d, n, size, seed, i, max_draws, bins, box, export is not None) for i, size in enumerate(sizes)]
    nworkers = min(resolve_workers(workers), len(tasks))
    if nworkers > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            outs = list(pool.map(_shard_task, tasks))
    else:
        outs = [_shard_task(t) for t in tasks]

    completed = sum(o.completed for o in outs)
    codes = Counter()
    comp = Counter()
    for o in outs:
        codes.update(o.ordering_codes)
        comp.update(o.completion_counts)
    ordering_counts = {}
    for inter in enumerate_interleavings(n):
        code = int("".join("1" if s == "U" else "0" for s in inter.sides), 2)
        if codes.get(code):
            ordering_counts[inter.tag] = int(codes[code])
    hists = {}
    for key in outs[0].histograms:
        first = outs[0].histograms[key]
        total = sum(o.histograms[key].counts for o in outs)
        hists[key] = PairHistogram(key, total, first.y_edges, first.z_edges, first.space)
    if export is not None:
        with open(export, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(trace_csv_header(n))
            for o in outs:
                w.writerows(o.rows)
    return EmpiricalSummary(
        model=d.descriptor, n=n, runs=runs, seed=seed, max_draws=max_draws, completed=completed,
        ordering_counts=ordering_counts, pair_histograms=hists, completion_counts=comp,
        box_hits=sum(o.box_hits for o in outs) if box is not None else None,
    )


# ---------------------------------------------------------------- expected masses

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


def _graded_rule(lo, hi):
    """Nodes/weights on [lo, hi] (arrays broadcast on a trailing axis), clustered at both ends."""
    s = _GL_NODES
    t = s * s * (3.0 - 2.0 * s)
    w = _GL_WEIGHTS * 6.0 * s * (1.0 - s)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    return lo + (hi - lo) * t, (hi - lo) * w


def _softplus(s):
    return np.logaddexp(0.0, s)


def _pair_kernel_u(p: int, q: int, u, v):
    """Density of (F(Y_(p)), F(Y^(q))) at u < v; identical for every continuous model.

    With s = log(t / (1 - t)) the weight dt / (t (1 - t)) becomes ds, so the
    remaining integrand over the first observation is smooth.
    """
    lu = np.log(u) - np.log1p(-u)
    lv = np.log(v) - np.log1p(-v)
    if (p, q) == (2, 2):
        return lv - lu
    s, w = _graded_rule(lu, lv)
    log_t = -_softplus(-s)
    log_1mt = -_softplus(s)
    f = np.ones_like(s)
    if p == 3:
        f = f * (log_t - np.log(u)[..., None])
    if q == 3:
        f = f * (log_1mt - np.log1p(-v)[..., None])
    return np.sum(f * w, axis=-1)


_GEOMETRIC_LEVELS = 24


def _composite_rule(lo, hi, refine_lo: bool, refine_hi: bool):
    """Graded rule on sub-panels shrinking geometrically towards a log-singular end."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    fr = [0.0, 1.0]
    if refine_lo:
        fr += [2.0 ** -k for k in range(1, _GEOMETRIC_LEVELS)]
    if refine_hi:
        fr += [1.0 - 2.0 ** -k for k in range(1, _GEOMETRIC_LEVELS)]
    fr = np.unique(fr)
    nodes, weights = [], []
    for a, b in zip(fr[:-1], fr[1:]):
        x, w = _graded_rule(lo + (hi - lo) * a, lo + (hi - lo) * b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes, axis=-1), np.concatenate(weights, axis=-1)


@lru_cache(maxsize=16)
def _pair_bin_masses_cached(p: int, q: int, bins: int) -> np.ndarray:
    edges = np.linspace(0.0, 1.0, bins + 1)
    masses = np.zeros((bins, bins))
    for j in range(bins):
        v, wv = _composite_rule(edges[j], edges[j + 1], False, j == bins - 1)
        for i in range(j + 1):
            hi_u = np.minimum(edges[i + 1], v) if i == j else np.full_like(v, edges[i + 1])
            u, wu = _composite_rule(np.full_like(v, edges[i]), hi_u, i == 0, False)
            with np.errstate(divide="ignore", invalid="ignore"):
                k = _pair_kernel_u(p, q, u, np.broadcast_to(v[:, None], u.shape))
            # nodes that round onto u = 0 or v = 1 carry negligible weight
            k = np.where(np.isfinite(k), k, 0.0)
            masses[i, j] = float(np.sum(wv * np.sum(wu * k, axis=1)))
    masses.setflags(write=False)
    return masses


def pair_bin_masses(p: int, q: int, bins: int) -> np.ndarray:
    """Probability of each F-space bin (rows: lower record, columns: upper record)."""
    if (p, q) not in PAIRS:
        raise ValueError(f"unsupported pair ({p}, {q})")
    return _pair_bin_masses_cached(p, q, bins)


def _discrete_cell_masses(d, n: int, pair) -> np.ndarray:
    from .joint_density import density_z2_discrete, density_z3_discrete

    if n not in (2, 3):
        raise ValueError("discrete fits use the closed forms, available for n = 2, 3")
    density = density_z2_discrete if n == 2 else density_z3_discrete
    p, q = pair
    support = d.support
    m = support.size
    cells = np.zeros((m, m))
    for i, y in enumerate(support):
        for j, z in enumerate(support):
            if y < z:
                cells[i, j] = numeric_marginal(density, d, {f"y{p - 1}": y, f"z{q - 1}": z}, n=n)
    total = math.fsum(cells.ravel())
    if total <= 0:
        raise StatisticsError("the model gives zero probability to completing the records")
    # the simulation keeps completed runs only, so compare with the law given completion
    return cells / total


@dataclass
class FitReport:
    pair: tuple[int, int]
    completed: int
    statistic: float
    dof: int
    p_value: float
    sup_norm: float
    cells_used: int
    pooled_cells: int
    binomial_bound_ok: bool
    expected: np.ndarray = field(repr=False)
    observed: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "completed": self.completed,
            "chi_square": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "sup_norm": self.sup_norm,
            "cells_used": self.cells_used,
            "pooled_cells": self.pooled_cells,
            "binomial_bound_ok": self.binomial_bound_ok,
        }


def compare_to_closed_form(summary: EmpiricalSummary, d, pair) -> FitReport:
    """Chi-square fit of a simulated pair histogram against the pair law.

    Cells with expected count below 5 are pooled into one cell, which is
    kept only if its own expectation reaches 5.
    """
    pair = tuple(int(v) for v in pair)
    if pair not in summary.pair_histograms:
        raise ValueError(f"summary has no histogram for pair {pair} (n = {summary.n})")
    N = summary.completed
    if N < _MIN_COMPLETED:
        raise StatisticsError(f"need at least {_MIN_COMPLETED} completed runs, got {N}")
    hist = summary.pair_histograms[pair]
    observed = hist.counts.astype(float)
    if hist.space == "F":
        probs = np.array(pair_bin_masses(*pair, observed.shape[0]))
    else:
        probs = _discrete_cell_masses(d, summary.n, pair)
    expected = N * probs
    big = expected >= 5.0
    obs_cells = list(observed[big])
    exp_cells = list(expected[big])
    pooled = int(np.count_nonzero(~big & (probs > 0)))
    rest_exp = float(expected[~big].sum())
    if rest_exp >= 5.0:
        obs_cells.append(float(observed[~big].sum()))
        exp_cells.append(rest_exp)
    if len(exp_cells) < 2:
        raise StatisticsError("fewer than two cells with expected count >= 5")
    obs_arr, exp_arr = np.array(obs_cells), np.array(exp_cells)
    # rescale so both sides sum to the same total (quadrature masses are not exactly 1)
    exp_arr = exp_arr * obs_arr.sum() / exp_arr.sum()
    statistic = float(np.sum((obs_arr - exp_arr) ** 2 / exp_arr))
    dof = len(exp_arr) - 1
    p_value = float(stats.chi2.sf(statistic, dof))
    emp = observed / N
    diff = np.abs(emp - probs)
    bound = 4.0 * np.sqrt(probs * (1.0 - probs) / N)
    return FitReport(
        pair=pair, completed=N, statistic=statistic, dof=dof, p_value=p_value,
        sup_norm=float(diff.max()), cells_used=int(big.sum()), pooled_cells=pooled,
        binomial_bound_ok=bool(np.all(diff <= bound + 1e-15)), expected=expected, observed=observed,
    )


# ---------------------------------------------------------------- orderings

@lru_cache(maxsize=8)
def _ordering_probabilities_cached(n: int, rel_tol: float) -> tuple:
    from .distributions import Uniform

    u = Uniform(0.0, 1.0)
    names = tuple(coordinate_names(n))
    out = []
    for term in generate_density_terms(n, "continuous"):
        used = {b for den in term.denominators for b in (den.lower, den.upper) if b is not None}
        flat = [c for c in names if c not in used]
        res = integrate_section(lambda c, t=term: t.evaluate(u, c), SectionRegion(names, {}),
                                dist=u, rel_tol=rel_tol, constant_in=flat)
        out.append((term.interleaving.tag, res.require(f"ordering {term.interleaving.tag} probability")))
    return tuple(out)


def ordering_probabilities(n: int = 3, rel_tol: float = 1e-6) -> dict[str, float]:
    """Probability of each interleaving: one term integrated over the whole domain.

    For atomless models the value does not depend on the law, so it is
    computed on the uniform scale.  Coordinates a term does not involve are
    integrated exactly.
    """
    return dict(_ordering_probabilities_cached(n, rel_tol))


def ordering_frequency_check(summary: EmpiricalSummary, probabilities: dict[str, float], level: float = 0.999):
    """Per interleaving: observed count against the central binomial interval."""
    rows = []
    N = summary.completed
    for inter in enumerate_interleavings(summary.n):
        p = probabilities[inter.tag]
        lo, hi = stats.binom.interval(level, N, p)
        k = summary.ordering_counts.get(inter.tag, 0)
        rows.append({
            "interleaving": inter.tag,
            "label": inter.label,
            "count": int(k),
            "probability": p,
            "interval": [int(lo), int(hi)],
            "pass": bool(lo <= k <= hi),
        })
    return rows
