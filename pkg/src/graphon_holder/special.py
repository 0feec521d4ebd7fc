"""Weierstrass lacunary series and related helpers.

h_alpha(t) = sum_{k=0}^{K} 2^{-k alpha} cos(2 pi 2^k t).

Phases frac(2^k t) are generated by repeated doubling modulo one, which is
exact in binary floating point, so high-frequency terms never see the
cancellation that cos(2*pi*2**k*t) would suffer for large k.  Once the
fractional part becomes zero every later term is exactly cos(0) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TAIL_TOL = 1e-9


def tail_bound(alpha: float, k: int) -> float:
    """Sup-norm bound on the series terms dropped after order ``k``."""
    return 2.0 ** (-(k + 1) * alpha) / (1.0 - 2.0 ** (-alpha))


def default_order(alpha: float, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest truncation order whose tail bound is at most ``tol``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    k = max(0, math.ceil(-math.log2(tol * (1.0 - 2.0 ** (-alpha))) / alpha) - 1)
    while k > 0 and tail_bound(alpha, k - 1) <= tol:
        k -= 1
    while tail_bound(alpha, k) > tol:
        k += 1
    return k


@dataclass(frozen=True)
class WeierstrassParams:
    alpha: float
    k: int | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.k is not None and self.k < 0:
            raise ValueError(f"truncation order must be >= 0, got {self.k}")

    @property
    def order(self) -> int:
        return default_order(self.alpha) if self.k is None else self.k

    @property
    def weights(self) -> np.ndarray:
        return 2.0 ** (-self.alpha * np.arange(self.order + 1))

    @property
    def tail(self) -> float:
        return tail_bound(self.alpha, self.order)

    @property
    def sup_bound(self) -> float:
        """|h| <= 1 / (1 - 2^-alpha) for every truncation order."""
        return 1.0 / (1.0 - 2.0 ** (-self.alpha))


def dyadic_phases(t, order: int) -> np.ndarray:
    """Return frac(2^k |t|) for k = 0..order, stacked along a new first axis."""
    u = np.mod(np.abs(np.asarray(t, dtype=float)), 1.0)
    out = np.empty((order + 1,) + u.shape)
    for k in range(order + 1):
        out[k] = u
        u = 2.0 * u
        u -= u >= 1.0
    return out


def h_eval(params: WeierstrassParams, t):
    """Truncated Weierstrass function; even and 1-periodic."""
    w = params.weights
    phases = dyadic_phases(t, params.order)
    terms = np.cos(2.0 * np.pi * phases)
    val = np.tensordot(w, terms, axes=(0, 0))
    return float(val) if np.ndim(val) == 0 else val


def l2_modulus(params: WeierstrassParams, y):
    """Exact L2[0,1] norm of h(.) - h(. - y) for the truncated series."""
    w2 = params.weights ** 2
    phases = dyadic_phases(y, params.order)
    val = np.sqrt(np.tensordot(w2, 1.0 - np.cos(2.0 * np.pi * phases), axes=(0, 0)))
    return float(val) if np.ndim(val) == 0 else val


def lp_modulus_quadrature(params: WeierstrassParams, y: float, p: int = 1,
                          n_grid: int = 2 ** 16) -> float:
    """||h(.) - h(. - y)||_{L^p[0,1]} by the periodic midpoint rule.

    The integrand is 1-periodic, so the rule is exact for trigonometric
    polynomials of degree below ``n_grid`` (``p == 2`` with
    ``n_grid > 2**(order+1)`` reproduces Parseval up to rounding).
    """
    t = (np.arange(n_grid) + 0.5) / n_grid
    diff = np.empty(n_grid)
    chunk = 1 << 18
    for s in range(0, n_grid, chunk):
        ts = t[s:s + chunk]
        diff[s:s + chunk] = h_eval(params, ts) - h_eval(params, ts - y)
    return float(np.mean(np.abs(diff) ** p) ** (1.0 / p))


def torus_dist(x, y):
    """min(|x - y|, 1 - |x - y|), summed over the last axis for points.

    Scalars give the circle distance; arrays with a trailing coordinate axis
    give the coordinatewise-summed distance on the d-torus.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = np.abs(x - y)
    per_axis = np.minimum(diff, 1.0 - diff)
    if per_axis.ndim == 0:
        return float(per_axis)
    return per_axis.sum(axis=-1)


def safe_amplitude(alpha: float, d: int) -> float:
    """Largest amplitude keeping 1/2 + a * sum_i h(x_i - y_i) inside [0, 1]."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return (1.0 - 2.0 ** (-alpha)) / (2.0 * d)
