"""Seeded w-random graphs and sampled graph signals.

All randomness comes from numpy's PCG64 bit generator seeded with a single
integer.  A sample first draws its n latents, then one uniform per vertex
pair in row-major ``i < j`` order; pair ``(i, j)`` is an edge when that
uniform is below its link probability.  Vertices are sorted by latent (or
by block) so the labelled graph lines up with the source partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphon import Graph, GraphonSignal, StepGraphon, uniform_measures

_ROW_CHUNK = 1 << 22


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def task_seed(base_seed: int, task_index: int) -> int:
    return int(base_seed) ^ int(task_index)


@dataclass(frozen=True, eq=False)
class SampleRecord:
    """A sampled graph with the source cell of every vertex.

    ``latents`` holds the uniform positions for w-random samples and is
    ``None`` for fixed-block samples.
    """

    graph: Graph
    cells: np.ndarray
    source_measures: np.ndarray
    seed: int
    latents: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.graph.n


def _bernoulli_pairs(prob: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Symmetric 0/1 matrix with independent upper-triangle draws."""
    n = prob.shape[0]
    adj = np.zeros((n, n), dtype=np.uint8)
    i = 0
    while i < n - 1:
        # rows [i, j) consume sum_{r} (n - r - 1) uniforms, kept below _ROW_CHUNK
        j, count = i, 0
        while j < n - 1 and (count == 0 or count + n - j - 1 <= _ROW_CHUNK):
            count += n - j - 1
            j += 1
        u = rng.random(count)
        pos = 0
        for r in range(i, j):
            width = n - r - 1
            adj[r, r + 1:] = u[pos:pos + width] < prob[r, r + 1:]
            pos += width
        i = j
    return adj | adj.T


def sample_w_random(w: StepGraphon, n: int, seed: int) -> SampleRecord:
    """Draw G(n, w): uniform latents, sorted, then independent edges."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    latents = np.sort(rng.random(n))
    cells = w.cell_of(latents)
    prob = w.values[np.ix_(cells, cells)]
    adj = _bernoulli_pairs(prob, rng)
    return SampleRecord(Graph(adj), cells, w.cell_measures, seed, latents)


def sample_fixed_blocks(model, block_size: int, seed: int) -> SampleRecord:
    """Block model sample: k blocks of exactly ``block_size`` vertices, block-major."""
    model = np.asarray(model, dtype=float)
    if block_size < 1:
        raise ValueError("block size must be at least 1")
    k = model.shape[0]
    rng = make_rng(seed)
    cells = np.repeat(np.arange(k), block_size)
    prob = model[np.ix_(cells, cells)]
    adj = _bernoulli_pairs(prob, rng)
    return SampleRecord(Graph(adj), cells, uniform_measures(k), seed)


def sampled_signal(f: GraphonSignal, record: SampleRecord, mode="evaluate",
                   block: int | None = None) -> np.ndarray:
    """Graph signal on a sample.

    ``evaluate`` gives ``f(x_v) / sqrt(n)`` so that the lifted signal
    approximates ``f``.  ``indicator`` gives the raw 0/1 indicator of the
    vertices in source cell ``block``; ``f`` is ignored in that mode.
    """
    if mode == "evaluate":
        if not np.allclose(f.cell_measures, record.source_measures, rtol=0, atol=1e-12):
            raise ValueError("signal and sample use different partitions")
        return f.values[record.cells] / np.sqrt(record.n)
    if mode == "indicator":
        k = len(record.source_measures)
        if block is None or not 0 <= block < k:
            raise ValueError(f"unknown block {block!r}")
        return (record.cells == block).astype(complex)
    raise ValueError(f"unknown mode {mode!r}")
