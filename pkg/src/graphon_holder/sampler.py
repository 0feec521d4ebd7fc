"""W-random graphs and their edge-list serialisation."""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphons import Graphon
from .rng import counter_uniform, substream

LATENT_STREAM = 0
EDGE_STREAM = 1


@dataclass
class SampledGraph:
    n: int
    latents: np.ndarray        # (n, d)
    adjacency: np.ndarray      # (n, n) bool, symmetric, zero diagonal
    seed: int

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges u < v in lexicographic order."""
        u, v = np.nonzero(np.triu(self.adjacency, k=1))
        return np.stack([u, v], axis=1)

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    @property
    def density(self) -> float:
        pairs = self.n * (self.n - 1) // 2
        return self.n_edges / pairs if pairs else 0.0


def sample_graph(W: Graphon, n: int, seed: int = 0, chunk: int = 256) -> SampledGraph:
    """Uniform latents, then edge {i, j} iff U(seed, i, j) < W(x_i, x_j).

    Each unordered pair has its own counter-based uniform, so the result does
    not depend on evaluation order or chunking.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    latents = substream(seed, LATENT_STREAM).random((n, W.dim))
    adj = np.zeros((n, n), dtype=bool)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        ii, jj = np.meshgrid(rows, np.arange(n), indexing="ij")
        upper = jj > ii
        i, j = ii[upper], jj[upper]
        if i.size == 0:
            continue
        p = W(latents[i], latents[j])
        u = counter_uniform(seed, EDGE_STREAM, i, j)
        hit = u < p
        adj[i[hit], j[hit]] = True
    adj |= adj.T
    return SampledGraph(n, latents, adj, seed)


def edge_list_bytes(g: SampledGraph) -> bytes:
    buf = io.StringIO()
    buf.write(f"# n={g.n}\n")
    for u, v in g.edges():
        buf.write(f"{u} {v}\n")
    return buf.getvalue().encode("ascii")


def write_edge_list(g: SampledGraph, sink) -> int:
    """Write the edge list to a path or binary stream; return the byte count."""
    data = edge_list_bytes(g)
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(data)
    else:
        sink.write(data)
    return len(data)
