from collections import Counter
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphon_holder import hilbert
from graphon_holder.errors import CellOutOfRange, IndexOutOfRange
from graphon_holder.hilbert import CurveMap, decode, encode, preimage_length


def gray_square_oracle():
    # depth-1 square visited along the reflected Gray code, x tracking the high bit
    out = []
    for i in range(4):
        g = i ^ (i >> 1)
        out.append((g >> 1, g & 1))
    return out


def test_depth_one_matches_gray_code():
    assert [tuple(c) for c in encode(np.arange(4), 2, 1).tolist()] == gray_square_oracle()
    assert tuple(encode(0, 2, 1)) == (0, 0)
    assert tuple(encode(3, 2, 1)) == (1, 0)


@pytest.mark.parametrize("d,bits", [(2, b) for b in range(1, 6)] + [(3, b) for b in range(1, 4)])
def test_adjacency_exhaustive(d, bits):
    cells = encode(np.arange(1 << (d * bits)), d, bits)
    steps = np.abs(np.diff(cells, axis=0))
    assert np.all(steps.sum(axis=1) == 1)
    assert np.all(np.count_nonzero(steps, axis=1) == 1)


@pytest.mark.parametrize("d,bits", [(2, b) for b in range(1, 5)] + [(3, b) for b in range(1, 5)])
def test_bijection_exhaustive(d, bits):
    n = 1 << (d * bits)
    cells = encode(np.arange(n), d, bits)
    assert len({tuple(c) for c in cells.tolist()}) == n
    assert cells.min() == 0 and cells.max() == (1 << bits) - 1
    np.testing.assert_array_equal(decode(cells, d, bits), np.arange(n))


@given(st.data())
def test_decode_inverts_encode(data):
    d = data.draw(st.integers(2, 5))
    bits = data.draw(st.integers(1, 62 // d))
    idx = data.draw(st.integers(0, (1 << (d * bits)) - 1))
    assert int(decode(encode(idx, d, bits), d, bits)) == idx


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        encode(16, 2, 2)
    with pytest.raises(IndexOutOfRange):
        encode(-1, 2, 2)


def test_width_cap():
    with pytest.raises(ValueError):
        CurveMap(3, 21)
    CurveMap(2, 31)


def test_map_point_origin_centre():
    curve = CurveMap(2, 4)
    np.testing.assert_array_equal(curve.map_point(0.0), [2.0 ** -5, 2.0 ** -5])
    assert np.all(curve.map_point(1.0) < 1.0)


def test_map_point_close_parameters_adjacent():
    curve = CurveMap(2, 6)
    rng = np.random.default_rng(2)
    t = rng.random(5000) * (1 - 2 * curve.resolution)
    a = curve.cell_of(t)
    b = curve.cell_of(t + curve.resolution)
    assert np.all(np.abs(a - b).sum(axis=1) <= 1)


def test_map_point_resolution_error():
    # the centre lies within half a cell of every point of its cell
    curve = CurveMap(3, 5)
    t = np.random.default_rng(0).random(1000)
    p = curve.map_point(t)
    corner = curve.cell_of(t) * 2.0 ** -5
    assert np.all(np.abs(p - corner - 2.0 ** -6) <= 2.0 ** -6 + 1e-15)


def test_holder_ratio_finite():
    curve = CurveMap(2, 20)
    rng = np.random.default_rng(5)
    s = rng.random(100_000)
    t = np.clip(s + rng.uniform(-1, 1, s.size) * 10.0 ** rng.uniform(-5, -1, s.size), 0, 1)
    sep = np.abs(s - t)
    keep = sep > 16 * curve.resolution
    ratio = (np.linalg.norm(curve.map_point(s) - curve.map_point(t), axis=1)[keep]
             / np.sqrt(sep[keep]))
    assert ratio.max() <= 4 * np.sqrt(2) + 0.1


def test_nesting_consistency():
    rng = np.random.default_rng(9)
    for d, bits in [(2, 20), (3, 16)]:
        curve = CurveMap(d, bits)
        t = rng.random(20_000)
        idx = curve.index_of(t)
        full = curve.cell_of(t)
        for m in range(0, 6):
            lc = curve.level_cell(t, m)
            np.testing.assert_array_equal(lc, full >> (bits - m))
            # the index prefix alone fixes the level cell
            starts = (idx >> (d * (bits - m))) << (d * (bits - m))
            np.testing.assert_array_equal(encode(starts, d, bits) >> (bits - m), lc)


def brute_force_preimages(d, bits, level):
    """Exact measure of each level cell by counting every depth-``bits`` index."""
    cells = encode(np.arange(1 << (d * bits)), d, bits) >> (bits - level)
    counts = Counter(tuple(c) for c in cells.tolist())
    return {c: Fraction(k, 1 << (d * bits)) for c, k in counts.items()}


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("level", [0, 1, 2, 3, 4])
def test_measure_preservation_against_brute_force(d, level):
    bits = level + 1 if d * (level + 1) <= 15 else level
    truth = brute_force_preimages(d, bits, level)
    assert len(truth) == 2 ** (level * d)
    assert set(truth.values()) == {Fraction(1, 2 ** (level * d))}
    curve = CurveMap(d, bits)
    for cell, length in truth.items():
        assert preimage_length(cell, level, curve) == length


def test_preimage_examples():
    curve = CurveMap(2, 20)
    assert preimage_length((1, 2), 2, curve) == Fraction(1, 16)
    total = sum(preimage_length(c, 3, curve) for c in product(range(8), repeat=2))
    assert total == 1
    curve3 = CurveMap(3, 16)
    assert all(preimage_length(c, 4, curve3) == Fraction(1, 4096)
               for c in product(range(16), repeat=3))


def test_preimage_large_level_uses_inverse():
    curve = CurveMap(2, 20)
    assert preimage_length((12345, 999), 15, curve) == Fraction(1, 2 ** 30)


def test_preimage_cell_out_of_range():
    with pytest.raises(CellOutOfRange):
        preimage_length((4, 0), 2, CurveMap(2, 5))


def test_curve_convention_tag():
    assert CurveMap(2).convention == hilbert.CONVENTION
