"""Bit-exact Hilbert curve on [0,1]^d and the pull-back of graphons along it.

Indices are converted with the transpose/Gray-code algorithm of J. Skilling
("Programming the Hilbert curve", AIP Conf. Proc. 707, 2004).  The index
bits are dealt round-robin onto the d axes (most significant first), Gray
decoded, and the per-level reflections are undone.  With this orientation
index 0 is the origin cell and, for d = 2 and one bit per axis, the cells
are visited in the order (0,0), (0,1), (1,1), (1,0).

All routines are vectorised over numpy int64 arrays; the total index width
``d * bits`` is capped at 62 so every quantity stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CellOutOfRange, DimensionMismatch, IndexOutOfRange

MAX_INDEX_BITS = 62
CONVENTION = "skilling-transpose-gray/origin-start"
# Level tables above this many cells are not enumerated.
_TABLE_LIMIT_BITS = 22


def _check_shape(d: int, bits: int) -> None:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    if d * bits > MAX_INDEX_BITS:
        raise ValueError(f"d * bits = {d * bits} exceeds {MAX_INDEX_BITS}")


def _index_to_transpose(index: np.ndarray, d: int, bits: int) -> np.ndarray:
    X = np.zeros((d,) + index.shape, dtype=np.int64)
    for level in range(bits):
        for i in range(d):
            src = (bits - 1 - level) * d + (d - 1 - i)
            X[i] |= ((index >> src) & 1) << (bits - 1 - level)
    return X


def _transpose_to_index(X: np.ndarray, d: int, bits: int) -> np.ndarray:
    index = np.zeros(X.shape[1:], dtype=np.int64)
    for level in range(bits):
        for i in range(d):
            src = (bits - 1 - level) * d + (d - 1 - i)
            index |= ((X[i] >> (bits - 1 - level)) & 1) << src
    return index


def _transpose_to_axes(X: np.ndarray, d: int, bits: int) -> None:
    top = 1 << bits
    # Gray decode
    t = X[d - 1] >> 1
    for i in range(d - 1, 0, -1):
        X[i] ^= X[i - 1]
    X[0] ^= t
    # undo excess work
    Q = 2
    while Q != top:
        P = Q - 1
        for i in range(d - 1, -1, -1):
            hit = (X[i] & Q) != 0
            t = np.where(hit, 0, (X[0] ^ X[i]) & P)
            X[0] ^= np.where(hit, P, 0) ^ t
            X[i] ^= t
        Q <<= 1


def _axes_to_transpose(X: np.ndarray, d: int, bits: int) -> None:
    Q = 1 << (bits - 1)
    # inverse undo
    while Q > 1:
        P = Q - 1
        for i in range(d):
            hit = (X[i] & Q) != 0
            t = np.where(hit, 0, (X[0] ^ X[i]) & P)
            X[0] ^= np.where(hit, P, 0) ^ t
            X[i] ^= t
        Q >>= 1
    # Gray encode
    for i in range(1, d):
        X[i] ^= X[i - 1]
    t = np.zeros_like(X[0])
    Q = 1 << (bits - 1)
    while Q > 1:
        t ^= np.where((X[d - 1] & Q) != 0, Q - 1, 0)
        Q >>= 1
    X ^= t


def encode(index, d: int, bits: int) -> np.ndarray:
    """Integer cell of the Hilbert curve at depth ``bits`` for ``index``.

    ``index`` may be a scalar or an integer array; the result has a trailing
    axis of length ``d`` holding coordinates in ``[0, 2**bits)``.
    """
    _check_shape(d, bits)
    idx = np.asarray(index, dtype=np.int64)
    if np.any(idx < 0) or np.any(idx >= (1 << (d * bits))):
        raise IndexOutOfRange(f"index outside [0, 2^{d * bits})")
    X = _index_to_transpose(idx, d, bits)
    _transpose_to_axes(X, d, bits)
    return np.moveaxis(X, 0, -1)


def decode(cell, d: int, bits: int) -> np.ndarray:
    """Inverse of :func:`encode`: Hilbert index of an integer cell."""
    _check_shape(d, bits)
    c = np.asarray(cell, dtype=np.int64)
    if c.shape[-1:] != (d,):
        raise DimensionMismatch(f"cell must have trailing length {d}, got shape {c.shape}")
    if np.any(c < 0) or np.any(c >= (1 << bits)):
        raise CellOutOfRange(f"cell coordinates outside [0, 2^{bits})")
    X = np.moveaxis(c, -1, 0).copy()
    _axes_to_transpose(X, d, bits)
    return _transpose_to_index(X, d, bits)


@dataclass(frozen=True)
class CurveMap:
    """Depth-limited Hilbert map [0,1] -> [0,1]^d (cell centres)."""

    d: int
    bits: int = 20
    convention: str = CONVENTION

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"curve dimension must be >= 2, got {self.d}")
        _check_shape(self.d, self.bits)

    @property
    def n_cells(self) -> int:
        return 1 << (self.d * self.bits)

    @property
    def resolution(self) -> float:
        """Length of the parameter interval mapped to one cell."""
        return 2.0 ** (-self.d * self.bits)

    def index_of(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.floor(t * float(self.n_cells))
        idx = np.clip(idx, 0, self.n_cells - 1)
        # float rounding may land on n_cells for t just below 1
        return np.minimum(idx.astype(np.int64), self.n_cells - 1)

    def cell_of(self, t) -> np.ndarray:
        return encode(self.index_of(t), self.d, self.bits)

    def map_point(self, t) -> np.ndarray:
        """Centre of the depth-``bits`` cell containing the curve at ``t``.

        Accepts a scalar or an array of parameters (a trailing singleton
        axis, as in an (n, 1) array of points on [0,1], is dropped).
        """
        t = np.asarray(t, dtype=float)
        if t.ndim >= 1 and t.shape[-1] == 1:
            t = t[..., 0]
        cell = self.cell_of(t)
        return (cell + 0.5) * 2.0 ** (-self.bits)

    def level_cell(self, t, level: int) -> np.ndarray:
        """Level-``level`` dyadic cell containing ``map_point(t)``."""
        if not (0 <= level <= self.bits):
            raise ValueError(f"level must lie in [0, {self.bits}]")
        return self.cell_of(t) >> (self.bits - level)


def map_point(t, curve: CurveMap) -> np.ndarray:
    return curve.map_point(t)


@lru_cache(maxsize=64)
def _level_table(d: int, bits: int, level: int) -> np.ndarray:
    """Level-``level`` cell hit by each block of 2^(d*(bits-level)) indices."""
    blocks = np.arange(1 << (d * level), dtype=np.int64)
    starts = blocks << (d * (bits - level))
    cells = encode(starts, d, bits) >> (bits - level)
    out = np.zeros(blocks.shape, dtype=np.int64)
    for i in range(d):
        out = (out << level) | cells[:, i]
    out.setflags(write=False)
    return out


def preimage_length(cell, level: int, curve: CurveMap) -> Fraction:
    """Exact Lebesgue measure of {t : level-``level`` cell of t == cell}.

    The parameter interval splits into 2^(d*level) blocks of consecutive
    indices; each block is mapped into a single level cell (nesting), so the
    preimage is a union of such blocks.
    """
    d = curve.d
    if not (0 <= level <= curve.bits):
        raise ValueError(f"level must lie in [0, {curve.bits}]")
    c = np.asarray(cell, dtype=np.int64)
    if c.shape != (d,):
        raise DimensionMismatch(f"cell must have {d} coordinates, got shape {c.shape}")
    if np.any(c < 0) or np.any(c >= (1 << level)):
        raise CellOutOfRange(f"cell {c.tolist()} outside [0, 2^{level})^{d}")
    n_blocks = 1 << (d * level)
    if d * level <= _TABLE_LIMIT_BITS:
        key = 0
        for i in range(d):
            key = (key << level) | int(c[i])
        hits = int(np.count_nonzero(_level_table(d, curve.bits, level) == key))
        return Fraction(hits, n_blocks)
    # too many blocks to enumerate: locate the block through the inverse map
    rep = c << (curve.bits - level)
    block = int(decode(rep, d, curve.bits)) >> (d * (curve.bits - level))
    start = block << (d * (curve.bits - level))
    landed = encode(start, d, curve.bits) >> (curve.bits - level)
    if not np.array_equal(landed, c):
        raise AssertionError("Hilbert nesting violated")
    return Fraction(1, n_blocks)


def pullback(W, curve: CurveMap):
    """Graphon on [0,1] given by W(phi(s), phi(t)) with phi the curve map."""
    from .graphons import Pullback, build

    if W.dim != curve.d:
        raise DimensionMismatch(f"graphon has dimension {W.dim}, curve has {curve.d}")
    return build(Pullback(inner=W.spec, bits=curve.bits))
