"""Empirical Hoelder exponents from multi-scale oscillation scans.

For each scale s, pairs (x, y) are drawn with x uniform on the domain and
|x - y| uniform in (s/2, s]; the oscillation at s is the largest
|f(x) - f(y)| seen among pairs with |x - y| <= s (so it is nondecreasing in
s by construction).  The exponent is the least-squares slope of
log(oscillation) against log(scale) over the finest half of the scales.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateFit
from .graphons import Graphon
from .hilbert import CurveMap
from .rng import resolve_threads, substream

DEFAULT_SCALES = tuple(2.0 ** -np.arange(3, 15))
# For small exponents the default grid spans too little oscillation range
# for a stable slope; pullbacks at 20 bits resolve far finer scales.
DEEP_SCALES = tuple(2.0 ** -np.arange(3, 25))
CSV_FIELDS = ["scale", "oscillation", "n_pairs", "alpha_hat", "r2", "seed"]


@dataclass(frozen=True)
class ScanBudget:
    scales: tuple[float, ...] = DEFAULT_SCALES
    n_per_scale: int = 4000

    @classmethod
    def deep(cls, n_per_scale: int = 4000) -> "ScanBudget":
        return cls(DEEP_SCALES, n_per_scale)


@dataclass
class HolderScanTable:
    scales: np.ndarray
    oscillations: np.ndarray
    n_pairs: np.ndarray
    alpha_hat: float
    r2: float
    seed: int
    fit_mask: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for s, o, n in zip(self.scales, self.oscillations, self.n_pairs):
            w.writerow([repr(float(s)), repr(float(o)), int(n), repr(self.alpha_hat),
                        repr(self.r2), self.seed])
        return buf.getvalue()


def _pairs_at_scale(rng: np.random.Generator, dim: int, scale: float, n: int):
    """n pairs in [0,1]^dim with Euclidean separation uniform in (scale/2, scale]."""
    xs, ys = [], []
    need = n
    while need > 0:
        m = max(2 * need, 64)
        x = rng.random((m, dim))
        u = rng.standard_normal((m, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        r = scale * (1.0 - 0.5 * rng.random(m))       # (s/2, s]
        y = x + r[:, None] * u
        ok = np.all((y >= 0.0) & (y <= 1.0), axis=1)
        xs.append(x[ok][:need])
        ys.append(y[ok][:need])
        need -= len(xs[-1])
    return np.concatenate(xs), np.concatenate(ys)


def fit_exponent(scales: np.ndarray, osc: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    lx = np.log(scales[mask])
    ly = np.log(osc[mask])
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(min(max(r2, 0.0), 1.0))


def oscillation_scan(f: Callable[[np.ndarray], np.ndarray], dim: int, scales=DEFAULT_SCALES,
                     n_per_scale: int = 4000, seed: int = 0,
                     threads: int | None = None) -> HolderScanTable:
    """Max-oscillation scan of ``f`` on [0,1]^dim.

    ``f`` maps an (n, dim) array to (n,) values or (n, m) vectors; vector
    oscillations use the Euclidean norm.
    """
    scales = np.asarray(scales, dtype=float)
    if scales.ndim != 1 or scales.size < 2:
        raise ValueError("need at least two scales")
    if np.any(np.diff(scales) >= 0) or scales[0] > 1 or scales[-1] <= 0:
        raise ValueError("scales must be strictly decreasing inside (0, 1]")
    if n_per_scale < 100:
        raise ValueError("n_per_scale must be >= 100")

    def work(j):
        rng = substream(seed, j)
        x, y = _pairs_at_scale(rng, dim, scales[j], n_per_scale)
        diff = np.asarray(f(x), dtype=float) - np.asarray(f(y), dtype=float)
        if diff.ndim > 1:
            diff = np.linalg.norm(diff, axis=1)
        return float(np.max(np.abs(diff)))

    n_threads = resolve_threads(threads)
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            raw = np.array(list(pool.map(work, range(scales.size))))
    else:
        raw = np.array([work(j) for j in range(scales.size)])
    # scales decrease; running max from the finest end
    osc = np.maximum.accumulate(raw[::-1])[::-1]
    if np.any(osc <= 0):
        raise DegenerateFit("zero oscillation at some scale; function looks constant there")
    mask = np.zeros(scales.size, dtype=bool)
    mask[scales.size - max(2, scales.size // 2):] = True
    alpha, r2 = fit_exponent(scales, osc, mask)
    return HolderScanTable(scales, osc, np.full(scales.size, n_per_scale), alpha, r2, seed, mask)


def graphon_exponent(W: Graphon, budget: ScanBudget | None = None, seed: int = 0,
                     threads: int | None = None) -> HolderScanTable:
    """Scan W as a function on [0,1]^(2d)."""
    budget = budget or ScanBudget()
    d = W.dim
    f = lambda v: W(v[:, :d], v[:, d:])  # noqa: E731
    return oscillation_scan(f, 2 * d, budget.scales, budget.n_per_scale, seed, threads)


def resolution_floor(curve: CurveMap) -> float:
    """Smallest scale worth scanning: a few index cells."""
    return 16.0 * curve.resolution


def curve_exponent(curve: CurveMap, budget: ScanBudget | None = None, seed: int = 0,
                   threads: int | None = None) -> HolderScanTable:
    """Scan t -> map_point(t) with Euclidean oscillation."""
    budget = budget or ScanBudget()
    scales = np.asarray(budget.scales, dtype=float)
    scales = scales[scales >= resolution_floor(curve)]
    f = lambda t: curve.map_point(t[:, 0])  # noqa: E731
    return oscillation_scan(f, 1, scales, budget.n_per_scale, seed, threads)
