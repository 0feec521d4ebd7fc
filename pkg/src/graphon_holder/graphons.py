"""Graphons on [0,1]^d built from declarative, JSON-serialisable specs.

Every graphon exposes two evaluation paths:

* ``W(x, y)`` evaluates row-wise pairs, ``x`` and ``y`` of shape (n, d).
  Kernels are written as algebraically symmetric expressions with a fixed
  operand order, so ``W(x, y) == W(y, x)`` holds bitwise.
* ``W.cross(X, Z)`` returns the full (n, m) matrix of W(X[i], Z[j]); this is
  the fast path used by the Monte Carlo estimators.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from . import special
from .errors import DimensionMismatch, InvalidSpec
from .hilbert import MAX_INDEX_BITS, CurveMap


# --------------------------------------------------------------------------
# specs

@dataclass(frozen=True)
class DotProduct:
    d: int = 1
    a: float | None = None

    @property
    def amplitude(self) -> float:
        return 1.0 / self.d if self.a is None else float(self.a)


@dataclass(frozen=True)
class WeierstrassSum:
    d: int = 2
    alpha: float = 0.5
    a: float | None = None
    k: int | None = None

    @property
    def amplitude(self) -> float:
        return special.safe_amplitude(self.alpha, self.d) if self.a is None else float(self.a)

    @property
    def order(self) -> int:
        return special.default_order(self.alpha) if self.k is None else int(self.k)


@dataclass(frozen=True)
class Constant:
    p: float
    d: int = 1


@dataclass(frozen=True)
class StepBlock:
    cuts: tuple[float, ...]
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(float(c) for c in self.cuts))
        object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in self.matrix))


@dataclass(frozen=True)
class Pullback:
    inner: "GraphonSpec"
    bits: int = 20


GraphonSpec = Union[DotProduct, WeierstrassSum, Constant, StepBlock, Pullback]


def spec_dim(spec: GraphonSpec) -> int:
    if isinstance(spec, (DotProduct, WeierstrassSum, Constant)):
        return spec.d
    return 1


def check_spec(spec: GraphonSpec) -> None:
    """Raise :class:`InvalidSpec` naming the first violated bound."""
    if isinstance(spec, DotProduct):
        if spec.d < 1:
            raise InvalidSpec(f"dot_product: d must be >= 1, got {spec.d}")
        a = spec.amplitude
        if not a > 0:
            raise InvalidSpec(f"dot_product: a must be > 0, got {a}")
        if a * spec.d > 1 + 1e-12:
            raise InvalidSpec(f"dot_product: a*d must be <= 1, got {a * spec.d}")
    elif isinstance(spec, WeierstrassSum):
        if spec.d < 2:
            raise InvalidSpec(f"weierstrass: d must be >= 2, got {spec.d}")
        if not (0.0 < spec.alpha < 1.0):
            raise InvalidSpec(f"weierstrass: alpha must lie in (0, 1), got {spec.alpha}")
        if spec.k is not None and spec.k < 0:
            raise InvalidSpec(f"weierstrass: k must be >= 0, got {spec.k}")
        a = spec.amplitude
        cap = special.safe_amplitude(spec.alpha, spec.d)
        if not a > 0:
            raise InvalidSpec(f"weierstrass: a must be > 0, got {a}")
        if a > cap * (1 + 1e-12):
            raise InvalidSpec(f"weierstrass: a must be <= (1-2^-alpha)/(2d) = {cap:.6g}, got {a}")
    elif isinstance(spec, Constant):
        if not (0.0 <= spec.p <= 1.0):
            raise InvalidSpec(f"constant: p must lie in [0, 1], got {spec.p}")
        if spec.d < 1:
            raise InvalidSpec(f"constant: d must be >= 1, got {spec.d}")
    elif isinstance(spec, StepBlock):
        cuts = np.asarray(spec.cuts, dtype=float)
        if np.any(cuts <= 0) or np.any(cuts >= 1) or np.any(np.diff(cuts) <= 0):
            raise InvalidSpec("step: cuts must be strictly increasing inside (0, 1)")
        m = np.asarray(spec.matrix, dtype=float)
        k = len(cuts) + 1
        if m.shape != (k, k):
            raise InvalidSpec(f"step: matrix must be {k}x{k} for {k - 1} cuts, got {m.shape}")
        if not np.array_equal(m, m.T):
            raise InvalidSpec("step: matrix must be symmetric")
        if np.any(m < 0) or np.any(m > 1):
            raise InvalidSpec("step: matrix entries must lie in [0, 1]")
    elif isinstance(spec, Pullback):
        check_spec(spec.inner)
        d = spec_dim(spec.inner)
        if d < 2:
            raise InvalidSpec(f"pullback: inner graphon must have d >= 2, got {d}")
        if spec.bits < 1:
            raise InvalidSpec(f"pullback: bits must be >= 1, got {spec.bits}")
        if d * spec.bits > MAX_INDEX_BITS:
            raise InvalidSpec(f"pullback: d*bits must be <= {MAX_INDEX_BITS}, got {d * spec.bits}")
    else:
        raise InvalidSpec(f"unknown spec type {type(spec).__name__}")


# --------------------------------------------------------------------------
# JSON

def spec_to_dict(spec: GraphonSpec) -> dict:
    if isinstance(spec, DotProduct):
        return {"kind": "dot_product", "d": spec.d, "a": spec.a}
    if isinstance(spec, WeierstrassSum):
        return {"kind": "weierstrass", "d": spec.d, "alpha": spec.alpha, "a": spec.a, "k": spec.k}
    if isinstance(spec, Constant):
        out = {"kind": "constant", "p": spec.p}
        if spec.d != 1:
            out["d"] = spec.d
        return out
    if isinstance(spec, StepBlock):
        return {"kind": "step", "cuts": list(spec.cuts), "matrix": [list(r) for r in spec.matrix]}
    if isinstance(spec, Pullback):
        return {"kind": "pullback", "bits": spec.bits, "inner": spec_to_dict(spec.inner)}
    raise InvalidSpec(f"unknown spec type {type(spec).__name__}")


def spec_from_dict(doc: dict) -> GraphonSpec:
    try:
        kind = doc["kind"]
        if kind == "dot_product":
            return DotProduct(d=int(doc.get("d", 1)), a=_opt_float(doc.get("a")))
        if kind == "weierstrass":
            k = doc.get("k")
            return WeierstrassSum(d=int(doc.get("d", 2)), alpha=float(doc["alpha"]),
                                  a=_opt_float(doc.get("a")), k=None if k is None else int(k))
        if kind == "constant":
            return Constant(p=float(doc["p"]), d=int(doc.get("d", 1)))
        if kind == "step":
            return StepBlock(cuts=tuple(doc["cuts"]), matrix=tuple(tuple(r) for r in doc["matrix"]))
        if kind == "pullback":
            return Pullback(inner=spec_from_dict(doc["inner"]), bits=int(doc.get("bits", 20)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"malformed spec document: {exc!r}") from exc
    raise InvalidSpec(f"unknown graphon kind {kind!r}")


def _opt_float(v):
    return None if v is None else float(v)


def dumps_spec(spec: GraphonSpec) -> str:
    return json.dumps(spec_to_dict(spec), sort_keys=True)


def loads_spec(text: str) -> GraphonSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"spec is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidSpec("spec document must be a JSON object")
    return spec_from_dict(doc)


def load_spec(path) -> GraphonSpec:
    return loads_spec(Path(path).read_text())


# --------------------------------------------------------------------------
# graphons

def as_points(x, d: int) -> np.ndarray:
    """Coerce ``x`` to an (n, d) float array; a bare point becomes (1, d)."""
    x = np.asarray(x, dtype=float)
    if d == 1 and x.ndim <= 1:
        x = x.reshape(-1, 1)
    elif x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != d:
        raise DimensionMismatch(f"expected points of dimension {d}, got shape {x.shape}")
    return x


class Graphon:
    """Symmetric kernel on [0,1]^d x [0,1]^d with values in [0, 1]."""

    spec: GraphonSpec
    dim: int

    def __call__(self, x, y) -> np.ndarray:
        x = as_points(x, self.dim)
        y = as_points(y, self.dim)
        if x.shape != y.shape:
            raise DimensionMismatch(f"x and y shapes differ: {x.shape} vs {y.shape}")
        return np.clip(self._pairs(x, y), 0.0, 1.0)

    def cross(self, X, Z) -> np.ndarray:
        X = as_points(X, self.dim)
        Z = as_points(Z, self.dim)
        return np.clip(self._cross(X, Z), 0.0, 1.0)

    def raw(self, x, y) -> np.ndarray:
        """Unclamped kernel values (series truncation may leave [0,1])."""
        return self._pairs(as_points(x, self.dim), as_points(y, self.dim))

    def _pairs(self, x, y):
        raise NotImplementedError

    def _cross(self, X, Z):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


class DotProductGraphon(Graphon):
    def __init__(self, spec: DotProduct):
        self.spec = spec
        self.dim = spec.d
        self.a = spec.amplitude

    def _pairs(self, x, y):
        return self.a * (x * y).sum(axis=1)

    def _cross(self, X, Z):
        return self.a * (X @ Z.T)


class WeierstrassGraphon(Graphon):
    def __init__(self, spec: WeierstrassSum):
        self.spec = spec
        self.dim = spec.d
        self.a = spec.amplitude
        self.params = special.WeierstrassParams(spec.alpha, spec.order)
        self.truncation_error = self.a * spec.d * self.params.tail

    def _pairs(self, x, y):
        # h is even, and |x - y| is symmetric bitwise
        return 0.5 + self.a * special.h_eval(self.params, np.abs(x - y)).sum(axis=1)

    def features(self, X) -> np.ndarray:
        """Fourier features F with h(x_i - z_i) summed over i == F(x) @ F(z)."""
        phases = special.dyadic_phases(X, self.params.order)   # (K+1, n, d)
        root_w = np.sqrt(self.params.weights)[:, None, None]
        ang = 2.0 * np.pi * phases
        f = np.concatenate([root_w * np.cos(ang), root_w * np.sin(ang)], axis=0)
        return np.moveaxis(f, 1, 0).reshape(X.shape[0], -1)

    def _cross(self, X, Z):
        return 0.5 + self.a * (self.features(X) @ self.features(Z).T)


class ConstantGraphon(Graphon):
    def __init__(self, spec: Constant):
        self.spec = spec
        self.dim = spec.d
        self.p = float(spec.p)

    def _pairs(self, x, y):
        return np.full(x.shape[0], self.p)

    def _cross(self, X, Z):
        return np.full((X.shape[0], Z.shape[0]), self.p)


class StepGraphon(Graphon):
    def __init__(self, spec: StepBlock):
        self.spec = spec
        self.dim = 1
        self.cuts = np.asarray(spec.cuts, dtype=float)
        self.matrix = np.asarray(spec.matrix, dtype=float)

    def block(self, x) -> np.ndarray:
        return np.searchsorted(self.cuts, x, side="right")

    def _pairs(self, x, y):
        return self.matrix[self.block(x[:, 0]), self.block(y[:, 0])]

    def _cross(self, X, Z):
        return self.matrix[np.ix_(self.block(X[:, 0]), self.block(Z[:, 0]))]


class PullbackGraphon(Graphon):
    def __init__(self, spec: Pullback):
        self.spec = spec
        self.dim = 1
        self.inner = build(spec.inner)
        self.curve = CurveMap(d=self.inner.dim, bits=spec.bits)

    def lift(self, s) -> np.ndarray:
        return self.curve.map_point(np.asarray(s, dtype=float)[:, 0])

    def _pairs(self, x, y):
        return self.inner._pairs(self.lift(x), self.lift(y))

    def _cross(self, X, Z):
        return self.inner._cross(self.lift(X), self.lift(Z))


_BUILDERS = {
    DotProduct: DotProductGraphon,
    WeierstrassSum: WeierstrassGraphon,
    Constant: ConstantGraphon,
    StepBlock: StepGraphon,
    Pullback: PullbackGraphon,
}


def build(spec: GraphonSpec) -> Graphon:
    check_spec(spec)
    return _BUILDERS[type(spec)](spec)


def eval_pair(W: Graphon, x, y) -> float:
    """Kernel value at a single pair of points."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != W.dim or y.size != W.dim:
        raise DimensionMismatch(f"graphon has dimension {W.dim}, got {x.size} and {y.size}")
    return float(W(x[None, :], y[None, :])[0])


@dataclass
class ValidationReport:
    n_pairs: int
    max_symmetry_defect: float
    range_violations: int
    min_value: float
    max_value: float
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def validate(W: Graphon, n_pairs: int = 10_000, seed: int = 0,
             tol: float = 1e-12) -> ValidationReport:
    """Sample uniform pairs and check symmetry and range of the kernel."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.random((n_pairs, W.dim))
    y = rng.random((n_pairs, W.dim))
    wxy = W.raw(x, y)
    wyx = W.raw(y, x)
    defect = float(np.max(np.abs(wxy - wyx)))
    slack = getattr(W, "truncation_error", 0.0) + tol
    bad = int(np.count_nonzero((wxy < -slack) | (wxy > 1 + slack)))
    failures = []
    if defect > tol:
        failures.append(f"symmetry defect {defect:.3g} exceeds {tol:g}")
    if bad:
        failures.append(f"{bad} values outside [0, 1]")
    if not math.isfinite(float(wxy.sum())):
        failures.append("non-finite kernel values")
    return ValidationReport(n_pairs, defect, bad, float(wxy.min()), float(wxy.max()), failures)
