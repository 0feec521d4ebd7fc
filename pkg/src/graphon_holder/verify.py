"""Executable acceptance bundle: fixed fixtures, seeds and tolerances.

Each check returns a :class:`Check`; ``run_all`` runs them in order.  The
test suite and the ``verify`` subcommand share these definitions.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from . import hilbert, holder, psi, sampler, special
from .graphons import Constant, DotProduct, Pullback, StepBlock, WeierstrassSum, build

SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(fn: Callable[[], tuple[bool, str]], name: str) -> Check:
    t0 = time.perf_counter()
    ok, detail = fn()
    return Check(name, bool(ok), detail, time.perf_counter() - t0)


# 1 ------------------------------------------------------------------------
def check_psi_oracle(threads=None) -> Check:
    def run():
        t0 = time.perf_counter()
        W = build(DotProduct(d=1, a=1.0))
        res = psi.psi_truncated(W, 0.5, psi.DEFAULT_GRID, n_pairs=200_000, n_z=2000,
                                seed=SEED, threads=threads)
        elapsed = time.perf_counter() - t0
        exact = psi.psi_analytic_dot1(0.5)
        if not isinstance(res.verdict, psi.Finite):
            return False, f"verdict {res.verdict.name}, expected Finite"
        rel = abs(res.verdict.psi_estimate - exact) / exact
        ok = rel <= 0.05 and elapsed < 120
        return ok, (f"estimate {res.verdict.psi_estimate:.4f} vs exact {exact:.4f} "
                    f"(rel err {rel:.3%}, tol 5%), runtime {elapsed:.1f}s (< 120s)")
    return _timed(run, "1 psi oracle d=1")


# 2 ------------------------------------------------------------------------
def check_invariance(threads=None) -> Check:
    def run():
        inner = DotProduct(d=2, a=0.5)
        W = build(inner)
        Wp = build(Pullback(inner, bits=20))
        kw = dict(n_pairs=100_000, n_z=500, threads=threads)
        a = psi.psi_truncated(W, 1.0, psi.DEFAULT_GRID, seed=SEED, **kw)
        b = psi.psi_truncated(Wp, 1.0, psi.DEFAULT_GRID, seed=SEED + 1, **kw)
        z = np.abs(a.t_values - b.t_values) / np.hypot(a.t_stderr, b.t_stderr)
        same = a.verdict.name == b.verdict.name
        return bool(np.all(z <= 3.0) and same), (
            f"max |dT|/SE = {z.max():.2f} over {z.size} thresholds (tol 3), "
            f"verdicts {a.verdict.name}/{b.verdict.name}")
    return _timed(run, "2 invariance under Hilbert pullback")


# 3 ------------------------------------------------------------------------
DIVERGENCE_MATRIX = [
    (DotProduct(d=1, a=1.0), 1.5, {"Divergent"}),
    (DotProduct(d=1, a=1.0), 2.0, {"Divergent"}),
    (DotProduct(d=2, a=0.5), 1.0, {"Finite"}),
    (DotProduct(d=2, a=0.5), 1.5, {"Finite"}),
    (DotProduct(d=2, a=0.5), 2.5, {"Divergent"}),
    (WeierstrassSum(d=2, alpha=0.5), 2.0, {"Finite"}),
    (WeierstrassSum(d=2, alpha=0.5), 3.5, {"Finite"}),
    (Constant(p=0.3), 1.0, {"DegenerateZero", "Divergent"}),
    (StepBlock((0.5,), ((0.2, 0.8), (0.8, 0.4))), 1.0, {"DegenerateZero", "Divergent"}),
]


def check_divergence_matrix(threads=None) -> Check:
    def run():
        wrong = []
        cells = []
        for spec, q, expected in DIVERGENCE_MATRIX:
            res = psi.classify_divergence(build(spec), q, seed=SEED, threads=threads)
            tag = f"{type(spec).__name__}(q={q})={res.verdict.name}"
            cells.append(tag)
            if res.verdict.name not in expected:
                wrong.append(tag)
        detail = "; ".join(cells)
        return not wrong, (f"wrong: {', '.join(wrong)} | " if wrong else "") + detail
    return _timed(run, "3 divergence matrix")


# 4 ------------------------------------------------------------------------
def exponent_fixtures():
    h = special.WeierstrassParams(0.5)
    deep = holder.ScanBudget.deep()
    return [
        ("h_0.5", (0.45, 0.55),
         lambda s: holder.oscillation_scan(lambda x: special.h_eval(h, x[:, 0]), 1, seed=s)),
        ("hilbert d=2 B=20", (0.45, 0.55),
         lambda s: holder.curve_exponent(hilbert.CurveMap(2, 20), seed=s)),
        ("hilbert d=3 B=16", (0.28, 0.39),
         lambda s: holder.curve_exponent(hilbert.CurveMap(3, 16), seed=s)),
        ("pullback weierstrass d=2", (0.20, 0.30),
         lambda s: holder.graphon_exponent(build(Pullback(WeierstrassSum(2, 0.5), 20)), deep, seed=s)),
        ("pullback dot d=2", (0.43, 0.57),
         lambda s: holder.graphon_exponent(build(Pullback(DotProduct(2, 0.5), 20)), deep, seed=s)),
    ]


def check_exponents(threads=None) -> Check:
    def run():
        ok = True
        parts = []
        for name, (lo, hi), scan in exponent_fixtures():
            a = scan(SEED).alpha_hat
            good = lo <= a <= hi
            ok &= good
            parts.append(f"{name} {a:.3f} in [{lo}, {hi}]{'' if good else ' NO'}")
        return ok, "; ".join(parts)
    return _timed(run, "4 exponent scans")


# 5 ------------------------------------------------------------------------
def check_measure_preservation() -> Check:
    def run():
        n_cells = 0
        for d, bits in [(2, 20), (3, 16), (2, 4), (3, 4)]:
            curve = hilbert.CurveMap(d, bits)
            for m in range(0, 5):
                target = Fraction(1, 2 ** (m * d))
                for cell in product(range(2 ** m), repeat=d):
                    n_cells += 1
                    if hilbert.preimage_length(cell, m, curve) != target:
                        return False, f"d={d} B={bits} level {m} cell {cell} wrong"
        return True, f"{n_cells} cells, every preimage exactly 2^(-md)"
    return _timed(run, "5 measure preservation")


# 6 ------------------------------------------------------------------------
def check_adjacency() -> Check:
    def run():
        parts = []
        ok = True
        for d, bits in [(2, 5), (3, 3)]:
            n = 1 << (d * bits)
            cells = hilbert.encode(np.arange(n), d, bits)
            steps = np.abs(np.diff(cells, axis=0)).sum(axis=1)
            good = bool(np.all(steps == 1))
            ok &= good
            parts.append(f"d={d} B={bits}: {n} cells, all L1 steps == 1: {good}")
        return ok, "; ".join(parts)
    return _timed(run, "6 adjacency")


# 7 ------------------------------------------------------------------------
def check_parseval() -> Check:
    def run():
        p = special.WeierstrassParams(0.5, 20)
        errs = []
        for y in (0.1, 0.3, 0.5):
            quad = special.lp_modulus_quadrature(p, y, p=2, n_grid=2 ** 22)
            errs.append(abs(special.l2_modulus(p, y) - quad))
        exact = special.l2_modulus(p, 0.5) == math.sqrt(2.0)
        ok = max(errs) <= 1e-6 and exact
        return ok, (f"max |closed form - quadrature| = {max(errs):.2e} (tol 1e-6); "
                    f"l2_modulus(1/2) == sqrt(2): {exact}")
    return _timed(run, "7 Parseval check")


# 8 ------------------------------------------------------------------------
def check_lower_bound() -> Check:
    def run():
        scan = psi.torus_envelope(build(WeierstrassSum(2, 0.5)), 0.5, n_pairs=10_000,
                                  n_z=2000, seed=SEED)
        ok = scan.min_ratio > 0 and abs(scan.envelope_slope - 0.5) <= 0.1
        return ok, (f"min D/dist^0.5 = {scan.min_ratio:.4f} (> 0), "
                    f"envelope slope {scan.envelope_slope:.3f} (0.5 +- 0.1)")
    return _timed(run, "8 torus lower bound")


# 9 ------------------------------------------------------------------------
def check_cd() -> Check:
    def run():
        c1 = psi.estimate_cd(1, seed=SEED)
        c2 = psi.estimate_cd(2, seed=SEED)
        bound = 1.0 / (3.0 * math.sqrt(2.0))
        ok1 = abs(c1.value - 0.5) <= 3 * c1.stderr
        ok2 = 0 < c2.value <= bound + 3 * c2.stderr
        return ok1 and ok2, (f"c_1 = {c1.value:.5f} +- {c1.stderr:.1e} (0.5); "
                             f"c_2 = {c2.value:.5f} <= {bound:.5f} + 3*{c2.stderr:.1e}")
    return _timed(run, "9 c_d sanity")


# 10 -----------------------------------------------------------------------
def check_sampler() -> Check:
    def run():
        n = 1000
        g = sampler.sample_graph(build(Constant(0.5)), n, seed=SEED)
        pairs = n * (n - 1) // 2
        tol = 3 * math.sqrt(0.25 / pairs)
        dens_ok = abs(g.density - 0.5) <= tol
        empty = sampler.SampledGraph(3, np.zeros((3, 1)), np.zeros((3, 3), bool), 0)
        tri = sampler.SampledGraph(3, np.zeros((3, 1)), ~np.eye(3, dtype=bool), 0)
        k2 = sampler.sample_graph(build(Constant(1.0)), 2, seed=SEED)
        bytes_ok = (sampler.edge_list_bytes(empty) == b"# n=3\n"
                    and sampler.edge_list_bytes(tri) == b"# n=3\n0 1\n0 2\n1 2\n"
                    and sampler.edge_list_bytes(k2) == b"# n=2\n0 1\n")
        again = sampler.sample_graph(build(Constant(0.5)), n, seed=SEED)
        repro = sampler.edge_list_bytes(g) == sampler.edge_list_bytes(again)
        return dens_ok and bytes_ok and repro, (
            f"density {g.density:.5f} (0.5 +- {tol:.5f}); fixture bytes exact: {bytes_ok}; "
            f"reproducible: {repro}")
    return _timed(run, "10 sampler")


CHECKS = {
    1: check_psi_oracle,
    2: check_invariance,
    3: check_divergence_matrix,
    4: check_exponents,
    5: check_measure_preservation,
    6: check_adjacency,
    7: check_parseval,
    8: check_lower_bound,
    9: check_cd,
    10: check_sampler,
}
_THREADED = {1, 2, 3, 4}


def run_check(number: int, threads=None) -> Check:
    fn = CHECKS[number]
    return fn(threads) if number in _THREADED else fn()


def run_all(threads=None, only=None, echo=print) -> list[Check]:
    out = []
    for number in sorted(CHECKS):
        if only and number not in only:
            continue
        chk = run_check(number, threads)
        if echo:
            echo(chk.line())
        out.append(chk)
    return out
