"""Graph and graphon Fourier transforms, sample matching and filters.

The graph transform is the usual expansion in an adjacency eigenbasis.
The graphon transform assigns to every distinct nonzero eigenvalue the
projection of the signal onto its whole eigenspace; the kernel part is
kept as an explicit residual.  Eigenspace projections are what stays
stable along a convergent graph sequence, individual coefficients of a
repeated eigenvalue are not.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphon import (
    Graph,
    GraphonSignal,
    StepGraphon,
    apply_operator,
    graphon_from_graph,
    lift_signal,
    operator_spectrum,
    refine_partitions,
    uniform_measures,
)
from .linalg import (
    DistinctEigenvalueGroup,
    ProjectionKernel,
    SignedSpectrum,
    eigh_symmetric,
    group_distinct,
    hs_distance,
    projection_kernel,
)
from .sampling import sample_fixed_blocks, sample_w_random, sampled_signal, task_seed


class NotConvergedError(ValueError):
    """A sample spectrum is too short to match the reference groups."""


def graph_spectrum(graph: Graph, top=None) -> SignedSpectrum:
    """Adjacency spectrum in graph units (unit weights, vectors in C^n)."""
    return eigh_symmetric(graph.adjacency.astype(float), top=top)


def lift_spectrum(spec: SignedSpectrum) -> SignedSpectrum:
    """Graph spectrum -> spectrum of the associated step graphon.

    Eigenvalues are divided by n and eigenvectors lifted by sqrt(n).
    """
    n = spec.dim
    return SignedSpectrum(
        values=spec.values / n,
        indices=spec.indices.copy(),
        vectors=spec.vectors * np.sqrt(n),
        weights=uniform_measures(n),
        zero_rank=spec.zero_rank,
        zero_threshold=spec.zero_threshold / n,
    )


@dataclass(frozen=True, eq=False)
class GraphFourier:
    """Coefficients ``<f, phi_i>`` per signed index, plus the kernel residual."""

    coefficients: np.ndarray
    spectrum: SignedSpectrum
    residual: np.ndarray | None = None

    def __getitem__(self, index: int) -> complex:
        return complex(self.coefficients[self.spectrum.position(index)])


def gft(spectrum: SignedSpectrum, f) -> GraphFourier:
    f = np.asarray(f, dtype=complex)
    if f.shape != (spectrum.dim,):
        raise ValueError(f"signal length {len(f)} != {spectrum.dim}")
    v = spectrum.vectors
    coeffs = (spectrum.weights * f) @ v.conj()
    residual = f - v @ coeffs
    return GraphFourier(coeffs, spectrum, residual)


def igft(gf: GraphFourier, use_residual=True) -> np.ndarray:
    out = gf.spectrum.vectors @ gf.coefficients
    if use_residual:
        if gf.residual is None:
            raise ValueError("coefficients do not span the signal and no residual was kept")
        out = out + gf.residual
    return out


@dataclass(frozen=True, eq=False)
class GraphonFourier:
    """Eigenspace components of a graphon signal.

    ``components[j]`` is the projection onto the eigenspace of
    ``groups[j].mu``; ``residual`` is the kernel component.
    """

    groups: list[DistinctEigenvalueGroup]
    components: list[GraphonSignal]
    residual: GraphonSignal

    def component(self, mu_index: int) -> GraphonSignal:
        return self.components[mu_index]


def _project(spectrum: SignedSpectrum, index_set, values):
    v = spectrum.select(index_set)
    coeffs = (spectrum.weights * values) @ v.conj()
    return v @ coeffs


def wft(spectrum: SignedSpectrum, f: GraphonSignal,
        groups: Sequence[DistinctEigenvalueGroup] | None = None) -> GraphonFourier:
    """Projection-valued Fourier transform of a step graphon signal."""
    if not np.allclose(spectrum.weights, f.cell_measures, rtol=0, atol=1e-12):
        raise ValueError("partition mismatch between spectrum and signal")
    if groups is None:
        groups = group_distinct(spectrum)
    comps = [GraphonSignal(_project(spectrum, g.index_set, f.values), f.cell_measures)
             for g in groups]
    rest = f.values - sum((c.values for c in comps), np.zeros_like(f.values))
    return GraphonFourier(list(groups), comps, GraphonSignal(rest, f.cell_measures))


def iwft(gf: GraphonFourier) -> GraphonSignal:
    out = gf.residual
    for c in gf.components:
        out = out + c
    return out


# -- sample matching -------------------------------------------------------

@dataclass
class GroupMatch:
    group: DistinctEigenvalueGroup
    sample_indices: tuple[int, ...]
    interval: tuple[float, float]
    sample_values: np.ndarray
    inside: np.ndarray


@dataclass
class MatchResult:
    matches: list[GroupMatch]
    noise_indices: list[int]
    noise_outside: np.ndarray
    missing: list[DistinctEigenvalueGroup] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return not self.missing

    @property
    def all_inside(self) -> bool:
        return all(m.inside.all() for m in self.matches) and bool(np.all(self.noise_outside))


def group_intervals(groups: Sequence[DistinctEigenvalueGroup]):
    """Acceptance interval of every group: midpoints to its neighbours.

    Same-sign groups are ordered by magnitude; the smallest one of each sign
    reaches down to half its value, the largest one is unbounded outward.
    """
    out = {}
    for sign in (1, -1):
        sel = sorted((g for g in groups if np.sign(g.mu) == sign),
                     key=lambda g: -abs(g.mu))
        mags = [abs(g.mu) for g in sel]
        for j, g in enumerate(sel):
            hi = np.inf if j == 0 else 0.5 * (mags[j - 1] + mags[j])
            lo = 0.5 * (mags[j] + (mags[j + 1] if j + 1 < len(sel) else 0.0))
            out[g.index_set] = (lo, hi) if sign > 0 else (-hi, -lo)
    return out


def match_sample_groups(groups: Sequence[DistinctEigenvalueGroup],
                        sample: SignedSpectrum, strict=True) -> MatchResult:
    """Assign sample eigenpairs to reference groups by signed index.

    Every sample index outside the reference index sets is noise; the
    diagnostic checks it lies closer to zero than the smallest group of its
    sign.  ``sample`` and the reference must use the same eigenvalue scale.
    """
    intervals = group_intervals(groups)
    present = set(int(i) for i in sample.indices)
    matches, missing = [], []
    used = set()
    for g in groups:
        if not set(g.index_set) <= present:
            missing.append(g)
            continue
        vals = np.array([sample.eigval(i) for i in g.index_set])
        lo, hi = intervals[g.index_set]
        matches.append(GroupMatch(g, g.index_set, (lo, hi), vals,
                                  (vals > lo) & (vals <= hi)))
        used.update(g.index_set)
    if missing and strict:
        raise NotConvergedError(
            f"sample spectrum lacks indices for mu = {[g.mu for g in missing]}")
    noise = [int(i) for i in sample.indices if int(i) not in used]
    floors = {s: min((abs(g.mu) for g in groups if np.sign(g.mu) == s), default=np.inf)
              for s in (1, -1)}
    noise_outside = np.array(
        [abs(sample.eigval(i)) <= 0.5 * floors[int(np.sign(i))] for i in noise], dtype=bool)
    return MatchResult(matches, noise, noise_outside, missing)


def sample_group_projection(graph_spec: SignedSpectrum, group: DistinctEigenvalueGroup,
                            f) -> GraphonSignal:
    """Lift of ``sum_{i in I} <f, phi_i> phi_i`` computed on the sample."""
    missing = [i for i in group.index_set if i not in set(graph_spec.indices.tolist())]
    if missing:
        raise NotConvergedError(f"sample has no eigenvectors for indices {missing}")
    proj = _project(graph_spec, group.index_set, np.asarray(f, dtype=complex))
    return lift_signal(proj, graph_spec.dim)


def _refined_pair(p: ProjectionKernel, q: ProjectionKernel):
    r = refine_partitions(p.weights, q.weights)
    return p.refine(r.map1, r.measures), q.refine(r.map2, r.measures), r


def kernel_hs_distance(p: ProjectionKernel, q: ProjectionKernel) -> float:
    """HS distance of two kernels on possibly different partitions."""
    a, b, _ = _refined_pair(p, q)
    return hs_distance(a, b)


def signal_distance(f: GraphonSignal, g: GraphonSignal) -> float:
    r = refine_partitions(f.cell_measures, g.cell_measures)
    a = f.values[r.map1]
    b = g.values[r.map2]
    return float(np.sqrt(np.sum(r.measures * np.abs(a - b) ** 2)))


# -- convergence report ----------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: int
    group: str
    mu: float
    hs_dist: float
    proj_dist: float


CONVERGENCE_HEADER = ("n", "seed", "group", "mu", "hs_dist", "proj_dist")


def _draw(w, n, seed, sampler):
    if sampler == "w_random":
        return sample_w_random(w, n, seed)
    if sampler == "blocks":
        k = w.k
        if n % k or not np.allclose(w.cell_measures, 1.0 / k):
            raise ValueError("block sampler needs uniform cells and n divisible by k")
        return sample_fixed_blocks(w.values, n // k, seed)
    raise ValueError(f"unknown sampler {sampler!r}")


def _convergence_task(w, f, groups, ref_proj, ref_comp, n, seed, sampler):
    rec = _draw(w, n, seed, sampler)
    wg = graphon_from_graph(rec.graph)
    spec = operator_spectrum(wg)
    fn = lift_signal(sampled_signal(f, rec), n)
    rows = []
    total = 0.0
    for j, g in enumerate(groups):
        label = f"mu{j + 1}"
        try:
            p_n = projection_kernel(spec, g.index_set)
        except KeyError:
            rows.append(ConvergenceRow(n, seed, label, g.mu, np.nan, np.nan))
            total = np.nan
            continue
        hs = kernel_hs_distance(p_n, ref_proj[j])
        comp_n = GraphonSignal(p_n.apply(fn.values), fn.cell_measures)
        pd = signal_distance(comp_n, ref_comp[j])
        total += pd ** 2
        rows.append(ConvergenceRow(n, seed, label, g.mu, hs, pd))
    rows.append(ConvergenceRow(n, seed, "total", np.nan, np.nan, total))
    return rows


def convergence_report(w: StepGraphon, f: GraphonSignal, sizes, seeds,
                       sampler="w_random", groups=None, mu_floor=0.0,
                       threads=1) -> list[ConvergenceRow]:
    """HS and projected-signal distances of sample eigenspaces to the reference.

    For every (n, seed) a sample is drawn, its projections onto the
    reference index sets are compared with the graphon projections on the
    common refinement.  The ``total`` row holds the summed squared signal
    distances, meaningful when ``f`` has no kernel component.  Rows are
    ordered by (n, seed) whatever the completion order.
    """
    ref_spec = operator_spectrum(w)
    if groups is None:
        groups = [g for g in group_distinct(ref_spec) if abs(g.mu) > mu_floor]
    ref_proj = [projection_kernel(ref_spec, g.index_set) for g in groups]
    ref_comp = [GraphonSignal(p.apply(f.values), f.cell_measures) for p in ref_proj]
    tasks = [(n, seed) for n in sizes for seed in seeds]

    def run(task):
        n, seed = task
        return _convergence_task(w, f, groups, ref_proj, ref_comp,
                                 n, seed, sampler)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    return [row for rows in results for row in rows]


def convergence_csv(rows: Sequence[ConvergenceRow]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(CONVERGENCE_HEADER)
    for r in rows:
        out.writerow([r.n, r.seed, r.group, _fmt(r.mu), _fmt(r.hs_dist), _fmt(r.proj_dist)])
    return buf.getvalue()


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else f"{x:.6f}"


def derived_seeds(base_seed: int, count: int) -> list[int]:
    return [task_seed(base_seed, i) for i in range(count)]


# -- filters ---------------------------------------------------------------

def poly_filter_apply(shift, h, f):
    """Evaluate ``sum_k h_k S^k f`` by Horner's rule.

    ``shift`` is a :class:`Graph` (adjacency shift), a :class:`StepGraphon`
    (integral operator, ``f`` a :class:`GraphonSignal`) or a square matrix.
    """
    h = list(h)
    if not h:
        raise ValueError("filter needs at least one coefficient")
    if isinstance(shift, StepGraphon):
        out = f * h[-1]
        for c in reversed(h[:-1]):
            out = apply_operator(shift, out) + f * c
        return out
    mat = shift.adjacency.astype(float) if isinstance(shift, Graph) else np.asarray(shift)
    f = np.asarray(f, dtype=complex)
    out = h[-1] * f
    for c in reversed(h[:-1]):
        out = mat @ out + c * f
    return out


def poly_eval(h, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in reversed(list(h)):
        out = out * x + c
    return out


def graphon_filter_response(groups: Sequence[DistinctEigenvalueGroup], h) -> np.ndarray:
    return poly_eval(h, np.array([g.mu for g in groups]))
