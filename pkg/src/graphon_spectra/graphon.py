"""Step graphons on ordered partitions of [0, 1], graphs and signals.

A partition is a list of consecutive intervals given by their measures, so
cell ``c`` is ``[sum(m[:c]), sum(m[:c+1]))``.  Both graphs (one cell per
vertex) and block models live in this representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import SignedSpectrum, eigh_symmetric

EXACT_CUT_MAX_CELLS = 24
_BREAK_TOL = 1e-12


def uniform_measures(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


@dataclass(frozen=True, eq=False)
class StepGraphon:
    """Symmetric block-value matrix over a partition of [0, 1].

    ``signed=True`` relaxes the [0, 1] range to [-1, 1] so differences of
    graphons (as used by the cut norm) can be represented too.
    """

    values: np.ndarray
    cell_measures: np.ndarray
    signed: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        measures = np.asarray(self.cell_measures, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cell_measures", measures)
        k = len(measures)
        if values.shape != (k, k):
            raise ValueError(f"values shape {values.shape} does not match {k} cells")
        if np.any(measures <= 0):
            raise ValueError("cell measures must be positive")
        if abs(measures.sum() - 1) > 1e-12:
            raise ValueError(f"cell measures sum to {measures.sum():.15g}")
        if k and np.abs(values - values.T).max() > 1e-12:
            raise ValueError("graphon values are not symmetric")
        lo = -1.0 if self.signed else 0.0
        if k and (values.min() < lo - 1e-12 or values.max() > 1 + 1e-12):
            raise ValueError(f"graphon values outside [{lo:g}, 1]")

    @classmethod
    def uniform(cls, values, signed=False) -> "StepGraphon":
        values = np.asarray(values, dtype=float)
        return cls(values, uniform_measures(len(values)), signed=signed)

    @classmethod
    def constant(cls, c: float) -> "StepGraphon":
        return cls(np.array([[c]]), np.array([1.0]))

    @property
    def k(self) -> int:
        return len(self.cell_measures)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.cell_measures)])

    def cell_of(self, x) -> np.ndarray:
        """Cell index containing each point ``x`` in [0, 1]."""
        edges = self.breakpoints[1:-1]
        return np.searchsorted(edges, np.asarray(x), side="right")

    def __sub__(self, other: "StepGraphon") -> "StepGraphon":
        a, b, _, _ = common_refinement(self, other)
        return StepGraphon(a.values - b.values, a.cell_measures, signed=True)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as a dense 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency must be binary")
        object.__setattr__(self, "adjacency", a.astype(np.uint8, copy=False))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum(dtype=np.int64) // 2)

    def density(self) -> float:
        n = self.n
        return self.edge_count / (n * (n - 1) / 2) if n > 1 else 0.0

    def edges(self) -> np.ndarray:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j])

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        a = np.zeros((n, n), dtype=np.uint8)
        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        a[edges[:, 0], edges[:, 1]] = 1
        a[edges[:, 1], edges[:, 0]] = 1
        return cls(a)


@dataclass(frozen=True, eq=False)
class GraphonSignal:
    """Complex step function on a partition with measures ``cell_measures``."""

    values: np.ndarray
    cell_measures: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        m = np.asarray(self.cell_measures, dtype=float)
        if v.shape != m.shape:
            raise ValueError("signal length does not match partition")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "cell_measures", m)

    def inner(self, other: "GraphonSignal") -> complex:
        _check_partition(self.cell_measures, other.cell_measures)
        return complex(np.sum(self.cell_measures * self.values * np.conj(other.values)))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.cell_measures * np.abs(self.values) ** 2)))

    def __add__(self, other):
        _check_partition(self.cell_measures, other.cell_measures)
        return GraphonSignal(self.values + other.values, self.cell_measures)

    def __sub__(self, other):
        _check_partition(self.cell_measures, other.cell_measures)
        return GraphonSignal(self.values - other.values, self.cell_measures)

    def __mul__(self, c):
        return GraphonSignal(self.values * c, self.cell_measures)

    __rmul__ = __mul__

    def refine(self, mapping, measures) -> "GraphonSignal":
        return GraphonSignal(self.values[np.asarray(mapping)], measures)


def _check_partition(m1, m2):
    if m1.shape != m2.shape or not np.allclose(m1, m2, rtol=0, atol=1e-12):
        raise ValueError("partition mismatch")


def graphon_from_graph(graph: Graph) -> StepGraphon:
    """The 0/1 step graphon ``w_G`` on n equal cells."""
    return StepGraphon.uniform(graph.adjacency.astype(float))


def operator_spectrum(w: StepGraphon, zero_threshold=None, top=None) -> SignedSpectrum:
    """Nonzero spectrum of the integral operator of a step graphon."""
    return eigh_symmetric(w.values, w.cell_measures, zero_threshold, top=top)


def lift_signal(f, graph: Graph | int) -> GraphonSignal:
    """Isometric lift of a vertex signal to a step function: value sqrt(n) f(v)."""
    n = graph if isinstance(graph, (int, np.integer)) else graph.n
    f = np.asarray(f, dtype=complex)
    if f.shape != (n,):
        raise ValueError(f"signal has length {len(f)}, graph has {n} vertices")
    return GraphonSignal(np.sqrt(n) * f, uniform_measures(n))


def unlift_signal(f: GraphonSignal) -> np.ndarray:
    """Inverse of :func:`lift_signal` on a uniform n-cell partition."""
    n = len(f.values)
    _check_partition(f.cell_measures, uniform_measures(n))
    return f.values / np.sqrt(n)


def apply_operator(w: StepGraphon, f: GraphonSignal) -> GraphonSignal:
    _check_partition(w.cell_measures, f.cell_measures)
    return GraphonSignal(w.values @ (w.cell_measures * f.values), f.cell_measures)


class Refinement(NamedTuple):
    measures: np.ndarray
    map1: np.ndarray
    map2: np.ndarray


def refine_partitions(m1, m2) -> Refinement:
    """Overlay two ordered partitions; ``map_i[c]`` is the parent cell in partition i."""
    b1 = np.concatenate([[0.0], np.cumsum(m1)])
    b2 = np.concatenate([[0.0], np.cumsum(m2)])
    b1[-1] = b2[-1] = 1.0
    merged = np.unique(np.concatenate([b1, b2]))
    keep = np.concatenate([[True], np.diff(merged) > _BREAK_TOL])
    merged = merged[keep]
    merged[-1] = 1.0
    if len(merged) < 2:
        merged = np.array([0.0, 1.0])
    mids = 0.5 * (merged[:-1] + merged[1:])
    map1 = np.searchsorted(b1[1:-1], mids, side="right")
    map2 = np.searchsorted(b2[1:-1], mids, side="right")
    measures = np.diff(merged)
    measures /= measures.sum()
    return Refinement(measures, map1, map2)


def common_refinement(w1: StepGraphon, w2: StepGraphon):
    """Both graphons on the overlay partition, plus the parent-cell maps."""
    r = refine_partitions(w1.cell_measures, w2.cell_measures)
    a = StepGraphon(w1.values[np.ix_(r.map1, r.map1)], r.measures, signed=w1.signed)
    b = StepGraphon(w2.values[np.ix_(r.map2, r.map2)], r.measures, signed=w2.signed)
    return a, b, r.map1, r.map2


class CutNormResult(NamedTuple):
    value: float
    S: np.ndarray
    T: np.ndarray
    exact: bool


def _cut_value(x, w, m):
    """Best |int_{S x T} w| for the row set indicated by ``x`` (batched)."""
    agg = (x * m) @ (w * m[None, :])
    pos = np.where(agg > 0, agg, 0.0).sum(axis=-1)
    neg = -np.where(agg < 0, agg, 0.0).sum(axis=-1)
    return np.maximum(pos, neg), agg, pos >= neg


def cut_norm(w: StepGraphon, mode="exact", seed=0, starts=64) -> CutNormResult:
    """Cut norm ``sup_{S,T} |int_{S x T} w|`` of a (signed) step graphon.

    The objective is bilinear in per-cell inclusion fractions, so the
    supremum is attained on unions of cells.  ``exact`` enumerates every
    row set S (2^k of them, k <= 24) and picks T optimally by the sign of
    the column aggregate.  ``heuristic`` runs alternating best-response
    flips from ``starts`` seeded random starts and returns a lower bound.
    """
    vals, m = w.values, w.cell_measures
    k = w.k
    if mode == "exact":
        if k > EXACT_CUT_MAX_CELLS:
            raise ValueError(f"exact cut norm limited to {EXACT_CUT_MAX_CELLS} cells, got {k}")
        return _cut_norm_exact(vals, m)
    if mode == "heuristic":
        return _cut_norm_heuristic(vals, m, seed, starts)
    raise ValueError(f"unknown cut-norm mode {mode!r}")


def _mask_bits(masks, k):
    return ((masks[:, None] >> np.arange(k)) & 1).astype(float)


def _cut_norm_exact(vals, m):
    k = len(m)
    best, best_mask = -1.0, 0
    chunk = 1 << min(k, 16)
    for start in range(0, 1 << k, chunk):
        masks = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        value, _, _ = _cut_value(_mask_bits(masks, k), vals, m)
        i = int(np.argmax(value))
        if value[i] > best:
            best, best_mask = float(value[i]), int(masks[i])
    x = _mask_bits(np.array([best_mask]), k)
    value, agg, use_pos = _cut_value(x, vals, m)
    S = x[0].astype(bool)
    T = agg[0] > 0 if use_pos[0] else agg[0] < 0
    return CutNormResult(float(value[0]), S, T, True)


def _cut_norm_heuristic(vals, m, seed, starts):
    k = len(m)
    rng = np.random.default_rng(seed)
    best = CutNormResult(-1.0, np.zeros(k, bool), np.zeros(k, bool), False)
    inits = [np.ones(k, bool)] + [rng.random(k) < 0.5 for _ in range(starts - 1)]
    wm = vals * m[None, :]
    for S in inits:
        for sign in (1.0, -1.0):
            s = S.copy()
            prev = None
            for _ in range(100):
                col = (s * m) @ wm
                t = sign * col > 0
                row = wm @ (t * 1.0) * m  # m_c * sum_{c' in T} w m_c'
                s = sign * row > 0
                value = sign * float(((s * m) @ wm) @ t)
                if prev is not None and value <= prev + 1e-15:
                    break
                prev = value
            value = abs(float(((s * m) @ wm) @ t))
            if value > best.value:
                best = CutNormResult(value, s.copy(), t.copy(), False)
    return best


def lp_norms(w: StepGraphon) -> tuple[float, float]:
    """L1 and L2 norms under the product measure."""
    mm = np.outer(w.cell_measures, w.cell_measures)
    return float(np.sum(mm * np.abs(w.values))), float(np.sqrt(np.sum(mm * w.values ** 2)))
