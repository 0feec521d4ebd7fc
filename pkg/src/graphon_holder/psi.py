"""Monte Carlo estimation of the functional

    Psi_q(W) = E_{x,y}[ D(x,y)^{-q} ],   D(x,y) = E_z |W(x,z) - W(y,z)|,

through the truncated profile T(delta) = E[D^{-q} ; D > delta].

Pairs are processed in strata of fixed size; stratum ``k`` draws its pairs
and its inner sample z from the substream (seed, k), so results do not
depend on the number of worker threads.  Standard errors come from batch
means over strata, which accounts for the inner sample being shared inside
a stratum.

Verdict
-------
Near zero the law of D behaves like P(D <= s) ~ A s^gamma, so the
increments of T over a log-grid scale like delta^(gamma - q) and log T has
asymptotic slope max(q - gamma, 0) against log(1/delta).  The local exponent
gamma is fitted by Poisson maximum likelihood to the counts of D-hat in the
finest grid bins; ``q - gamma`` above 0.1 with a 95% interval excluding 0
is Divergent.  A finite Psi is reported as T(delta_min) plus the power-law
remainder A gamma/(gamma - q) delta_min^(gamma - q).
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import BadGrid, DimensionMismatch, DomainError, InsufficientSamples
from .graphons import Graphon, as_points
from .rng import resolve_threads, substream

DEFAULT_GRID = tuple(float(v) for v in np.logspace(-1, -4, 7))
SLOPE_THRESHOLD = 0.1
ZERO_MASS_THRESHOLD = 0.01
MIN_RETAINED = 30
# finest-bin window for the local exponent fit
WINDOW_MIN_COUNT = 200
WINDOW_MIN_BINS = 3
# inner-sample accuracy gate: relative stderr of D-hat on retained pairs
REL_STDERR_GATE = 0.1
RESAMPLE_FACTOR = 4
Z95 = 1.959963984540054


@dataclass(frozen=True)
class InnerDistanceEstimate:
    value: float
    stderr: float
    n_z: int


@dataclass(frozen=True)
class Finite:
    psi_estimate: float
    stderr: float
    name = "Finite"


@dataclass(frozen=True)
class Divergent:
    log_slope: float
    name = "Divergent"


@dataclass(frozen=True)
class DegenerateZero:
    zero_mass: float
    name = "DegenerateZero"


Verdict = Union[Finite, Divergent, DegenerateZero]


@dataclass(frozen=True)
class PsiBudget:
    n_pairs: int = 100_000
    n_z: int = 500
    delta_grid: tuple[float, ...] = DEFAULT_GRID
    stratum_size: int = 256


@dataclass
class TruncatedPsiResult:
    q: float
    delta_grid: np.ndarray
    t_values: np.ndarray
    t_stderr: np.ndarray
    n_retained: np.ndarray
    zero_mass: float
    verdict: Verdict | None
    n_pairs: int
    n_z: int
    seed: int
    log_slope: float = math.nan
    log_slope_stderr: float = math.nan
    gamma_hat: float = math.nan
    t_log_slope: float = math.nan
    remainder: float = 0.0
    n_resampled: int = 0
    diagnostics: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {
                "q": self.q, "delta": float(d), "t_value": float(t), "t_stderr": float(s),
                "n_pairs_retained": int(r), "n_z": self.n_z, "seed": self.seed,
                "verdict": self.verdict.name,
            }
            for d, t, s, r in zip(self.delta_grid, self.t_values, self.t_stderr, self.n_retained)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()


CSV_FIELDS = ["q", "delta", "t_value", "t_stderr", "n_pairs_retained", "n_z", "seed", "verdict"]


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


# --------------------------------------------------------------------------
# inner distance

def _abs_diff_rows(W: Graphon, X, Y, Z) -> np.ndarray:
    diff = np.abs(W.cross(X, Z) - W.cross(Y, Z))
    same = np.all(X == Y, axis=1)
    if same.any():
        diff[same] = 0.0
    return diff


def inner_distances(W: Graphon, X, Y, n_z: int, rng: np.random.Generator):
    """D-hat and its standard error for each row pair, sharing one z sample."""
    Z = rng.random((n_z, W.dim))
    diff = _abs_diff_rows(W, X, Y, Z)
    value = diff.mean(axis=1)
    stderr = diff.std(axis=1, ddof=1) / math.sqrt(n_z)
    return value, stderr


def inner_distance(W: Graphon, x, y, n_z: int = 10_000, seed: int = 0) -> InnerDistanceEstimate:
    """Monte Carlo estimate of the L1 distance between the slices at x and y."""
    if n_z < 2:
        raise ValueError("n_z must be >= 2")
    x = as_points(x, W.dim)
    y = as_points(y, W.dim)
    if x.shape != (1, W.dim) or y.shape != (1, W.dim):
        raise DimensionMismatch(f"expected single points of dimension {W.dim}")
    value, stderr = inner_distances(W, x, y, n_z, substream(seed, 0))
    return InnerDistanceEstimate(float(value[0]), float(stderr[0]), n_z)


# --------------------------------------------------------------------------
# truncated profile

def check_grid(delta_grid) -> np.ndarray:
    grid = np.asarray(delta_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise BadGrid("delta grid needs at least two thresholds")
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0):
        raise BadGrid("delta grid must be positive and finite")
    if np.any(np.diff(grid) >= 0):
        raise BadGrid("delta grid must be strictly decreasing")
    return grid


def _stratum(W: Graphon, seed: int, k: int, m: int, n_z: int, delta_min: float):
    rng = substream(seed, k)
    X = rng.random((m, W.dim))
    Y = rng.random((m, W.dim))
    value, stderr = inner_distances(W, X, Y, n_z, rng)
    weak = (value > delta_min) & (stderr > REL_STDERR_GATE * value)
    n_weak = int(weak.sum())
    if n_weak:
        v2, _ = inner_distances(W, X[weak], Y[weak], RESAMPLE_FACTOR * n_z, rng)
        value[weak] = v2
    return value, n_weak


def sample_inner_distances(W: Graphon, n_pairs: int, n_z: int, seed: int, *,
                           delta_min: float = 0.0, stratum_size: int = 256,
                           threads: int | None = None):
    """D-hat for ``n_pairs`` uniform pairs, grouped by stratum."""
    sizes = [min(stratum_size, n_pairs - s) for s in range(0, n_pairs, stratum_size)]
    work = lambda k: _stratum(W, seed, k, sizes[k], n_z, delta_min)  # noqa: E731
    n_threads = resolve_threads(threads)
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(k) for k in range(len(sizes))]
    return [p[0] for p in parts], sum(p[1] for p in parts)


def truncated_profile(strata: list[np.ndarray], q: float, grid: np.ndarray):
    """T(delta), batch-means standard errors and retained counts."""
    D = np.concatenate(strata)
    n = D.size
    with np.errstate(divide="ignore"):
        inv = np.where(D > 0, D, np.inf) ** (-q)
    t = np.empty(grid.size)
    se = np.empty(grid.size)
    kept = np.empty(grid.size, dtype=np.int64)
    bounds = np.cumsum([0] + [s.size for s in strata])
    sizes = np.diff(bounds)
    for j, delta in enumerate(grid):
        vals = np.where(D > delta, inv, 0.0)
        kept[j] = int(np.count_nonzero(D > delta))
        t[j] = vals.mean()
        if len(strata) >= 10:
            sums = np.add.reduceat(vals, bounds[:-1])
            # ratio estimator over unequal strata sizes
            resid = sums - t[j] * sizes
            se[j] = math.sqrt(np.sum(resid ** 2) * len(strata) / (len(strata) - 1)) / n
        else:
            se[j] = vals.std(ddof=1) / math.sqrt(n)
    return t, se, kept


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def fit_local_exponent(D: np.ndarray, grid: np.ndarray, *, min_count: int = WINDOW_MIN_COUNT,
                       min_bins: int = WINDOW_MIN_BINS):
    """Poisson fit of P(D <= s) = A s^gamma to counts in the finest bins.

    Bins are (0, d_min] and the intervals between consecutive grid points;
    the window grows from the finest bin until it holds ``min_count``
    samples and ``min_bins`` bins.  Returns (A, gamma, stderr_gamma, n_window).
    """
    n = D.size
    edges = np.concatenate([grid[::-1], [np.inf]])     # increasing, d_min first
    counts = np.empty(grid.size, dtype=np.int64)
    counts[0] = np.count_nonzero(D <= edges[0])
    for j in range(1, grid.size):
        counts[j] = np.count_nonzero((D > edges[j - 1]) & (D <= edges[j]))
    nb = 0
    total = 0
    while nb < grid.size and (total < min_count or nb < min_bins):
        total += counts[nb]
        nb += 1
    c = counts[:nb].astype(float)
    lo = np.concatenate([[0.0], edges[:nb - 1]])
    hi = edges[:nb]
    if total == 0 or np.count_nonzero(c) == 0:
        return 0.0, math.inf, math.inf, 0
    log_lo = np.log(np.where(lo > 0, lo, 1.0))
    log_hi = np.log(hi)

    def moments(gamma):
        a_lo = np.where(lo > 0, np.exp(gamma * log_lo), 0.0)
        a_hi = np.exp(gamma * log_hi)
        shape = a_hi - a_lo
        dshape = a_hi * log_hi - np.where(lo > 0, a_lo * log_lo, 0.0)
        return shape, dshape

    def profile_score(gamma):
        # A profiled out: A = total / (n * sum(shape))
        shape, dshape = moments(gamma)
        return np.sum(c * dshape / shape) - total * dshape.sum() / shape.sum()

    # score is decreasing in gamma; bracket and bisect
    g_lo, g_hi = 1e-3, 1.0
    if profile_score(g_lo) < 0:
        gamma = g_lo
    else:
        while profile_score(g_hi) > 0 and g_hi < 256:
            g_hi *= 2
        if profile_score(g_hi) > 0:
            gamma = g_hi
        else:
            for _ in range(200):
                mid = 0.5 * (g_lo + g_hi)
                if profile_score(mid) > 0:
                    g_lo = mid
                else:
                    g_hi = mid
            gamma = 0.5 * (g_lo + g_hi)
    shape, dshape = moments(gamma)
    A = total / (n * shape.sum())
    mu = n * A * shape
    # Fisher information in (log A, gamma)
    g1 = mu
    g2 = n * A * dshape
    keep = mu > 0
    info = np.array([
        [np.sum(g1[keep] ** 2 / mu[keep]), np.sum(g1[keep] * g2[keep] / mu[keep])],
        [np.sum(g1[keep] * g2[keep] / mu[keep]), np.sum(g2[keep] ** 2 / mu[keep])],
    ])
    try:
        cov = np.linalg.inv(info)
        se_gamma = math.sqrt(max(cov[1, 1], 0.0))
    except np.linalg.LinAlgError:
        se_gamma = math.inf
    return float(A), float(gamma), se_gamma, int(total)


def _raw_t_slope(t: np.ndarray, grid: np.ndarray, n_points: int = 3) -> float:
    sel = slice(grid.size - n_points, grid.size)
    tt = t[sel]
    if np.any(tt <= 0):
        return math.nan
    return float(np.polyfit(np.log(1.0 / grid[sel]), np.log(tt), 1)[0])


def psi_truncated(W: Graphon, q: float, delta_grid=DEFAULT_GRID, n_pairs: int = 50_000,
                  n_z: int = 500, seed: int = 0, *, stratum_size: int = 256,
                  threads: int | None = None) -> TruncatedPsiResult:
    """Truncated profile T(delta) with a Finite / Divergent / DegenerateZero verdict."""
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    grid = check_grid(delta_grid)
    if n_pairs < 2 or n_z < 2:
        raise ValueError("n_pairs and n_z must be >= 2")
    delta_min = float(grid[-1])
    strata, n_weak = sample_inner_distances(W, n_pairs, n_z, seed, delta_min=delta_min,
                                            stratum_size=stratum_size, threads=threads)
    D = np.concatenate(strata)
    t, se, kept = truncated_profile(strata, q, grid)

    n_zero = int(np.count_nonzero(D <= delta_min))
    zero_mass = n_zero / D.size
    zlo, zhi = wilson_interval(n_zero, D.size)
    out = TruncatedPsiResult(q=float(q), delta_grid=grid, t_values=t, t_stderr=se,
                             n_retained=kept, zero_mass=zero_mass, verdict=None,
                             n_pairs=int(n_pairs), n_z=int(n_z), seed=int(seed),
                             n_resampled=n_weak)
    out.diagnostics["zero_mass_ci"] = (zlo, zhi)
    if zlo > ZERO_MASS_THRESHOLD:
        out.verdict = DegenerateZero(zero_mass)
        return out
    if kept[0] < MIN_RETAINED:
        raise InsufficientSamples(
            f"only {kept[0]} pairs have D > {grid[0]:g}; need at least {MIN_RETAINED}")

    A, gamma, se_gamma, n_window = fit_local_exponent(D, grid)
    out.gamma_hat = gamma
    out.log_slope = q - gamma
    out.log_slope_stderr = se_gamma
    out.t_log_slope = _raw_t_slope(t, grid)
    out.diagnostics["window_count"] = n_window
    if out.log_slope > SLOPE_THRESHOLD and out.log_slope - Z95 * se_gamma > 0:
        out.verdict = Divergent(out.log_slope)
        return out
    if gamma > q and math.isfinite(gamma) and A > 0:
        remainder = A * gamma / (gamma - q) * delta_min ** (gamma - q)
        rem_se = remainder / math.sqrt(max(n_window, 1))
    else:
        remainder, rem_se = 0.0, 0.0
    out.remainder = remainder
    out.verdict = Finite(float(t[-1] + remainder), float(math.hypot(se[-1], rem_se)))
    return out


def classify_divergence(W: Graphon, q: float, budget: PsiBudget | None = None,
                        seed: int = 0, threads: int | None = None) -> TruncatedPsiResult:
    """Run :func:`psi_truncated` on a default budget; the verdict is ``.verdict``."""
    budget = budget or PsiBudget()
    return psi_truncated(W, q, budget.delta_grid, budget.n_pairs, budget.n_z, seed,
                         stratum_size=budget.stratum_size, threads=threads)


def psi_analytic_dot1(q: float) -> float:
    """Exact Psi_q of W(x, y) = x*y on [0,1], finite for 0 < q < 1."""
    if not (0.0 < q < 1.0):
        raise DomainError(f"Psi_q(xy) is infinite for q >= 1 (got q={q})")
    return 2.0 ** q * 2.0 / ((1.0 - q) * (2.0 - q))


# --------------------------------------------------------------------------
# c_d

@dataclass(frozen=True)
class CdEstimate:
    d: int
    value: float
    direction: np.ndarray
    stderr: float
    n_dirs: int
    n_z: int


def projection_mean(u, n_z: int = 200_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo E|u . z| for z uniform on [0,1]^d, with its standard error."""
    u = np.asarray(u, dtype=float).reshape(-1)
    vals = np.abs(substream(seed, 0).random((n_z, u.size)) @ u)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_z))


def _canonical_directions(d: int, limit: int = 3 ** 6) -> np.ndarray:
    if 3 ** d > limit:
        pats = np.concatenate([np.eye(d), -np.eye(d)])
    else:
        grids = np.meshgrid(*([np.array([-1.0, 0.0, 1.0])] * d), indexing="ij")
        pats = np.stack([g.ravel() for g in grids], axis=1)
        pats = pats[np.any(pats != 0, axis=1)]
    return pats / np.linalg.norm(pats, axis=1, keepdims=True)


def estimate_cd(d: int, n_dirs: int = 2000, n_z: int = 200_000, seed: int = 0) -> CdEstimate:
    """Minimum over unit directions u of h(u) = E|u . z|, z uniform on [0,1]^d."""
    if d < 1 or n_dirs < 1 or n_z < 2:
        raise ValueError("need d >= 1, n_dirs >= 1, n_z >= 2")
    rng = substream(seed, 0)
    Z = rng.random((n_z, d))
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        g = substream(seed, 1).standard_normal((n_dirs, d))
        dirs = np.concatenate([_canonical_directions(d), g / np.linalg.norm(g, axis=1, keepdims=True)])
    vals = np.empty(len(dirs))
    errs = np.empty(len(dirs))
    for s in range(0, len(dirs), 64):
        block = np.abs(Z @ dirs[s:s + 64].T)
        vals[s:s + 64] = block.mean(axis=0)
        errs[s:s + 64] = block.std(axis=0, ddof=1) / math.sqrt(n_z)
    i = int(np.argmin(vals))
    return CdEstimate(d, float(vals[i]), dirs[i], float(errs[i]), len(dirs), n_z)


# --------------------------------------------------------------------------
# lower envelope against the torus metric

@dataclass
class EnvelopeScan:
    torus: np.ndarray
    dhat: np.ndarray
    min_ratio: float
    envelope_slope: float
    bin_centres: np.ndarray
    bin_minima: np.ndarray


def torus_envelope(W: Graphon, exponent: float, n_pairs: int = 10_000, n_z: int = 2000,
                   seed: int = 0, n_bins: int = 12, min_sep: float = 1e-5) -> EnvelopeScan:
    """Compare D-hat with the summed torus distance over log-spread pairs.

    Pairs are x uniform and y = x + r u (mod 1) with u a random direction
    and r log-uniform in [min_sep, 1/2], so separations cover several
    decades.  Reports min D / dist^exponent and the log-log slope of the
    per-bin minima of D against distance.
    """
    from .special import torus_dist

    rng = substream(seed, 0)
    X = rng.random((n_pairs, W.dim))
    r = 10.0 ** rng.uniform(math.log10(min_sep), math.log10(0.5), n_pairs)
    u = rng.standard_normal((n_pairs, W.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    Y = np.mod(X + r[:, None] * u, 1.0)
    D = np.empty(n_pairs)
    block = 500
    for k, s in enumerate(range(0, n_pairs, block)):
        D[s:s + block], _ = inner_distances(W, X[s:s + block], Y[s:s + block], n_z,
                                            substream(seed, 1, k))
    td = torus_dist(X, Y)
    ok = td > 0
    ratio = D[ok] / td[ok] ** exponent
    edges = np.logspace(np.log10(td[ok].min()), np.log10(td[ok].max()), n_bins + 1)
    idx = np.clip(np.digitize(td, edges[1:-1]), 0, n_bins - 1)
    centres, minima = [], []
    for b in range(n_bins):
        sel = ok & (idx == b)
        if sel.any():
            centres.append(math.sqrt(edges[b] * edges[b + 1]))
            minima.append(D[sel].min())
    centres = np.array(centres)
    minima = np.array(minima)
    good = minima > 0
    slope = float(np.polyfit(np.log(centres[good]), np.log(minima[good]), 1)[0]) if good.sum() >= 2 else math.nan
    return EnvelopeScan(td, D, float(ratio.min()), slope, centres, minima)
