"""Hoelder-smooth graphons on [0,1]^d, their Hilbert-curve pull-backs to [0,1],
and numerical checks of the smoothness functional Psi_q."""
from .errors import (BadGrid, CellOutOfRange, DegenerateFit, DimensionMismatch, DomainError,
                     GraphonError, IndexOutOfRange, InsufficientSamples, InvalidSpec, ParseError)
from .graphons import (Constant, DotProduct, Graphon, Pullback, StepBlock, WeierstrassSum, build,
                       eval_pair, load_spec, loads_spec, dumps_spec, validate)
from .hilbert import CurveMap, decode, encode, map_point, preimage_length, pullback
from .holder import HolderScanTable, ScanBudget, curve_exponent, graphon_exponent, oscillation_scan
from .psi import (CdEstimate, DegenerateZero, Divergent, Finite, PsiBudget, TruncatedPsiResult,
                  classify_divergence, estimate_cd, inner_distance, psi_analytic_dot1, psi_truncated)
from .sampler import SampledGraph, sample_graph, write_edge_list
from .special import WeierstrassParams, h_eval, l2_modulus, safe_amplitude, torus_dist

__version__ = "0.1.0"
