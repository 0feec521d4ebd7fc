"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
(insufficient samples, degenerate fit, or a failed verification check).
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import holder, psi, sampler, special, verify
from .errors import GraphonError, NumericalFailure, ParseError
from .graphons import Pullback, build, dumps_spec, load_spec
from .hilbert import CurveMap
from .rng import resolve_threads

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
DEFAULT_GRID_DESCRIPTOR = "geometric:0.0001:0.1:7"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_delta_grid(descriptor: str) -> list[float]:
    """'geometric:<min>:<max>:<count>' -> strictly decreasing thresholds."""
    parts = descriptor.split(":")
    if len(parts) != 4 or parts[0] != "geometric":
        raise ParseError(f"expected 'geometric:<min>:<max>:<count>', got {descriptor!r}")
    try:
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise ParseError(f"malformed grid descriptor {descriptor!r}: {exc}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0:
        raise ParseError("grid bounds must be positive and finite")
    if lo >= hi:
        raise ParseError(f"grid min {lo} must be below max {hi}")
    if count < 2:
        raise ParseError("grid needs at least two points")
    grid = np.logspace(math.log10(hi), math.log10(lo), count)
    grid[0], grid[-1] = hi, lo
    return [float(v) for v in grid]


@dataclass
class RunConfig:
    subcommand: str
    spec: str | None = None
    pairs: int = psi.PsiBudget.n_pairs
    inner: int = psi.PsiBudget.n_z
    scales: str | None = None
    per_scale: int = holder.ScanBudget.n_per_scale
    q: float | None = None
    grid: str = DEFAULT_GRID_DESCRIPTOR
    bits: int = 20
    n: int = 0
    seed: int = 0
    out: str | None = None
    threads: int | None = None

    def check(self):
        for name in ("pairs", "inner", "per_scale", "bits"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.q is not None and not self.q > 0:
            raise UsageError("--q must be positive")
        if self.threads is not None and self.threads < 1:
            raise UsageError("--threads must be positive")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _verdict_line(res: psi.TruncatedPsiResult) -> str:
    v = res.verdict
    if isinstance(v, psi.Finite):
        return (f"Finite psi_estimate={v.psi_estimate!r} stderr={v.stderr!r} "
                f"log_slope={res.log_slope:.4f} q={res.q} seed={res.seed}")
    if isinstance(v, psi.Divergent):
        return (f"Divergent log_slope={v.log_slope:.4f} "
                f"stderr={res.log_slope_stderr:.4f} q={res.q} seed={res.seed}")
    return f"DegenerateZero zero_mass={v.zero_mass!r} q={res.q} seed={res.seed}"


def _need_spec(cfg: RunConfig):
    if not cfg.spec:
        raise UsageError("--spec is required")
    try:
        return load_spec(cfg.spec)
    except OSError as exc:
        raise UsageError(f"cannot read spec {cfg.spec}: {exc}") from exc


def cmd_psi(cfg: RunConfig) -> int:
    W = build(_need_spec(cfg))
    res = psi.psi_truncated(W, cfg.q, parse_delta_grid(cfg.grid), cfg.pairs, cfg.inner,
                            cfg.seed, threads=cfg.threads)
    _emit(res.to_csv(), cfg.out)
    print(_verdict_line(res), file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    W = build(_need_spec(cfg))
    budget = psi.PsiBudget(cfg.pairs, cfg.inner, tuple(parse_delta_grid(cfg.grid)))
    res = psi.classify_divergence(W, cfg.q, budget, cfg.seed, threads=cfg.threads)
    print(_verdict_line(res))
    if cfg.out:
        Path(cfg.out).write_text(res.to_csv())
    return EXIT_OK


def cmd_holder(cfg: RunConfig, args) -> int:
    if cfg.scales:
        scales = tuple(parse_delta_grid(cfg.scales))
    else:
        scales = holder.DEEP_SCALES if args.deep else holder.DEFAULT_SCALES
    budget = holder.ScanBudget(scales, cfg.per_scale)
    if args.curve_d:
        table = holder.curve_exponent(CurveMap(args.curve_d, cfg.bits), budget, cfg.seed, cfg.threads)
    elif args.h_alpha is not None:
        p = special.WeierstrassParams(args.h_alpha, args.k)
        table = holder.oscillation_scan(lambda x: special.h_eval(p, x[:, 0]), 1, budget.scales,
                                        budget.n_per_scale, cfg.seed, cfg.threads)
    else:
        table = holder.graphon_exponent(build(_need_spec(cfg)), budget, cfg.seed, cfg.threads)
    _emit(table.to_csv(), cfg.out)
    print(f"alpha_hat={table.alpha_hat:.4f} r2={table.r2:.4f} seed={cfg.seed}",
          file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_pullback(cfg: RunConfig) -> int:
    spec = Pullback(inner=_need_spec(cfg), bits=cfg.bits)
    build(spec)
    _emit(dumps_spec(spec) + "\n", cfg.out)
    return EXIT_OK


def cmd_sample(cfg: RunConfig) -> int:
    g = sampler.sample_graph(build(_need_spec(cfg)), cfg.n, cfg.seed)
    if cfg.out:
        sampler.write_edge_list(g, cfg.out)
    else:
        sys.stdout.buffer.write(sampler.edge_list_bytes(g))
    return EXIT_OK


def cmd_cd(cfg: RunConfig, args) -> int:
    est = psi.estimate_cd(args.d, args.dirs, cfg.inner, cfg.seed)
    direction = " ".join(f"{v:.6f}" for v in est.direction)
    print(f"c_{est.d}={est.value!r} stderr={est.stderr!r} direction=[{direction}] seed={cfg.seed}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    only = None
    if args.only:
        try:
            only = {int(v) for v in args.only.split(",")}
        except ValueError as exc:
            raise UsageError(f"--only expects comma-separated criterion numbers: {exc}") from exc
        if not only <= set(verify.CHECKS):
            raise UsageError(f"unknown criteria {sorted(only - set(verify.CHECKS))}")
    checks = verify.run_all(threads=cfg.threads, only=only)
    n_pass = sum(c.passed for c in checks)
    print(f"{n_pass}/{len(checks)} criteria passed")
    return EXIT_OK if n_pass == len(checks) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphon-holder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(p, spec=True, seed=True, out=True):
        if spec:
            p.add_argument("--spec", help="graphon spec JSON file")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if out:
            p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $GRAPHON_THREADS or 1)")

    for name in ("psi", "classify"):
        p = sub.add_parser(name, help="truncated Psi_q profile" if name == "psi" else "finite/divergent verdict")
        common(p)
        p.add_argument("--q", type=float, required=True)
        p.add_argument("--pairs", type=int, default=psi.PsiBudget.n_pairs)
        p.add_argument("--inner", type=int, default=psi.PsiBudget.n_z)
        p.add_argument("--grid", default=DEFAULT_GRID_DESCRIPTOR)

    p = sub.add_parser("holder", help="oscillation scan and fitted exponent")
    common(p)
    p.add_argument("--curve-d", type=int, default=None, help="scan the Hilbert curve of this dimension")
    p.add_argument("--h-alpha", type=float, default=None, help="scan the Weierstrass function h_alpha")
    p.add_argument("--k", type=int, default=None, help="truncation order for --h-alpha")
    p.add_argument("--bits", type=int, default=20)
    p.add_argument("--scales", default=None, help="geometric:<min>:<max>:<count>")
    p.add_argument("--deep", action="store_true", help="use the 2^-3..2^-24 scale grid")
    p.add_argument("--per-scale", type=int, default=holder.ScanBudget.n_per_scale)

    p = sub.add_parser("pullback", help="write the Hilbert pull-back spec of a graphon")
    common(p, seed=False)
    p.add_argument("--bits", type=int, default=20)

    p = sub.add_parser("sample", help="sample a W-random graph as an edge list")
    common(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("cd", help="estimate c_d = min over unit u of E|u . z|")
    common(p, spec=False, out=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dirs", type=int, default=2000)
    p.add_argument("--inner", type=int, default=200_000)

    p = sub.add_parser("verify", help="run the acceptance checks")
    common(p, spec=False, seed=False, out=False)
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            raise UsageError("a subcommand is required")
        cfg = RunConfig(
            subcommand=args.subcommand,
            spec=getattr(args, "spec", None),
            pairs=getattr(args, "pairs", psi.PsiBudget.n_pairs),
            inner=getattr(args, "inner", psi.PsiBudget.n_z),
            scales=getattr(args, "scales", None),
            per_scale=getattr(args, "per_scale", holder.ScanBudget.n_per_scale),
            q=getattr(args, "q", None),
            grid=getattr(args, "grid", DEFAULT_GRID_DESCRIPTOR),
            bits=getattr(args, "bits", 20),
            n=getattr(args, "n", 0),
            seed=getattr(args, "seed", 0),
            out=getattr(args, "out", None),
            threads=resolve_threads(args.threads),
        )
        cfg.check()
        handlers = {
            "psi": lambda: cmd_psi(cfg),
            "classify": lambda: cmd_classify(cfg),
            "holder": lambda: cmd_holder(cfg, args),
            "pullback": lambda: cmd_pullback(cfg),
            "sample": lambda: cmd_sample(cfg),
            "cd": lambda: cmd_cd(cfg, args),
            "verify": lambda: cmd_verify(cfg, args),
        }
        return handlers[cfg.subcommand]()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
