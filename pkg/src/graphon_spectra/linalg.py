"""Dense eigendecompositions with signed eigenvalue indexing.

Nonzero eigenvalues are labelled the way graphon spectra are usually
listed: positive ones get indices +1, +2, ... in decreasing order, negative
ones get -1, -2, ... starting from the most negative.  Everything within
``zero_threshold`` of zero is treated as kernel and only counted.

Eigenvectors are step functions on a partition with cell measures
``weights``; the inner product is ``<f, g> = sum_c m_c f_c conj(g_c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

SYM_TOL = 1e-12
DEFAULT_REL_TOL = 1e-9
ZERO_REL = 1e-10


def _check_weights(weights, k):
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (k,):
        raise ValueError(f"weights have shape {weights.shape}, expected ({k},)")
    if np.any(weights <= 0):
        raise ValueError("cell measures must be positive")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"cell measures sum to {weights.sum():.15g}, not 1")
    return weights


def _check_square(matrix, name="matrix"):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be square, got shape {matrix.shape}")
    return matrix


def fix_phase(vectors):
    """Rotate each column so its first largest-magnitude entry is real positive.

    Entries within a relative 1e-8 of the maximum count as tied, so the
    choice does not depend on rounding noise.
    """
    vectors = np.array(vectors, copy=True)
    if vectors.size == 0:
        return vectors
    mags = np.abs(vectors)
    top = mags.max(axis=0)
    for col in range(vectors.shape[1]):
        if top[col] == 0:
            continue
        row = int(np.argmax(mags[:, col] >= top[col] * (1 - 1e-8)))
        z = vectors[row, col]
        vectors[:, col] *= np.conj(z) / abs(z)
    if np.iscomplexobj(vectors) and np.allclose(vectors.imag, 0, atol=1e-15):
        vectors = vectors.real.copy()
    return vectors


def signed_order(eigenvalues, zero_threshold=0.0):
    """Assign signed indices to a list of eigenvalues.

    Returns an integer array ``labels`` aligned with the input: ``labels[p]``
    is the signed index of ``eigenvalues[p]`` or 0 when it is kernel.
    Exact ties keep their input order.

    >>> signed_order([0.5, -0.5, 0.2]).tolist()
    [1, -1, 2]
    """
    values = np.asarray(eigenvalues, dtype=float)
    labels = np.zeros(values.shape, dtype=int)
    pos = np.flatnonzero(values > zero_threshold)
    neg = np.flatnonzero(values < -zero_threshold)
    # lexsort sorts by last key first; position breaks ties
    pos = pos[np.lexsort((pos, -values[pos]))]
    neg = neg[np.lexsort((neg, values[neg]))]
    labels[pos] = np.arange(1, len(pos) + 1)
    labels[neg] = -np.arange(1, len(neg) + 1)
    return labels


@dataclass(frozen=True)
class SignedSpectrum:
    """Nonzero eigenpairs in signed order.

    ``values`` and the columns of ``vectors`` are stored positives first
    (index +1, +2, ...) followed by negatives (index -1, -2, ...).  The
    kernel is never stored; ``zero_rank`` is its dimension, or ``None`` when
    only part of the spectrum was computed.
    """

    values: np.ndarray
    indices: np.ndarray
    vectors: np.ndarray
    weights: np.ndarray
    zero_rank: int | None = 0
    zero_threshold: float = 0.0

    @property
    def complete(self) -> bool:
        return self.zero_rank is not None

    @property
    def pos_eigs(self) -> np.ndarray:
        return self.values[self.indices > 0]

    @property
    def neg_eigs(self) -> np.ndarray:
        return self.values[self.indices < 0]

    @property
    def dim(self) -> int:
        return len(self.weights)

    def __len__(self):
        return len(self.values)

    def position(self, index: int) -> int:
        hits = np.flatnonzero(self.indices == index)
        if len(hits) == 0:
            raise KeyError(f"signed index {index} not in spectrum")
        return int(hits[0])

    def eigval(self, index: int) -> float:
        return float(self.values[self.position(index)])

    def eigvec(self, index: int) -> np.ndarray:
        return self.vectors[:, self.position(index)]

    def select(self, index_set: Iterable[int]) -> np.ndarray:
        """Eigenvector columns for ``index_set`` (in the given order)."""
        cols = [self.position(i) for i in index_set]
        return self.vectors[:, cols]

    @classmethod
    def from_pairs(cls, values, vectors, weights, zero_threshold=None,
                   complete=True):
        """Build from unordered eigenpairs; kernel pairs are dropped."""
        values = np.asarray(values, dtype=float)
        vectors = np.asarray(vectors)
        weights = np.asarray(weights, dtype=float)
        if zero_threshold is None:
            radius = np.abs(values).max() if values.size else 0.0
            zero_threshold = ZERO_REL * radius
        labels = signed_order(values, zero_threshold)
        npos = int((labels > 0).sum())
        nneg = int((labels < 0).sum())
        order = np.concatenate([
            np.argsort(np.where(labels > 0, labels, np.iinfo(int).max))[:npos],
            np.argsort(np.where(labels < 0, -labels, np.iinfo(int).max))[:nneg],
        ]).astype(int)
        zero_rank = int((labels == 0).sum()) if complete else None
        return cls(
            values=values[order],
            indices=labels[order],
            vectors=fix_phase(vectors[:, order]),
            weights=weights,
            zero_rank=zero_rank,
            zero_threshold=float(zero_threshold),
        )

    def reconstruct(self) -> np.ndarray:
        """Kernel matrix ``sum_i lambda_i phi_i (x) conj(phi_i)`` over cells."""
        v = self.vectors
        return (v * self.values) @ v.conj().T


def eigh_symmetric(matrix, weights=None, zero_threshold=None, top=None):
    """Eigenpairs of the step operator ``f -> matrix @ (weights * f)``.

    With ``weights=None`` the plain symmetric problem is solved (unit
    weights, standard inner product on C^n); this is how graph adjacency
    spectra are handled.  Otherwise the problem is conjugated to
    ``D^1/2 M D^1/2`` and eigenvectors are mapped back to step-function
    coordinates, orthonormal under the weighted inner product.

    ``top`` restricts the computation to the ``top`` algebraically largest
    eigenpairs (dense solver, partial back-transformation).  The result is
    then marked incomplete (``zero_rank is None``).
    """
    matrix = _check_square(matrix)
    k = matrix.shape[0]
    scale = max(1.0, float(np.abs(matrix).max())) if k else 1.0
    if np.iscomplexobj(matrix):
        raise ValueError("eigh_symmetric expects a real matrix")
    if np.abs(matrix - matrix.T).max(initial=0.0) > SYM_TOL * scale:
        raise ValueError("matrix is not symmetric")
    if weights is None:
        w = np.ones(k)
        b = np.asarray(matrix, dtype=float)
    else:
        w = _check_weights(weights, k)
        r = np.sqrt(w)
        b = r[:, None] * matrix * r[None, :]
    if top is not None and top < k:
        vals, vecs = scipy.linalg.eigh(b, subset_by_index=[k - top, k - 1],
                                       driver="evr")
        complete = False
    else:
        vals, vecs = np.linalg.eigh(b)
        complete = True
    if weights is not None:
        vecs = vecs / np.sqrt(w)[:, None]
    if zero_threshold is None:
        zero_threshold = ZERO_REL * np.abs(vals).max(initial=0.0)
    return SignedSpectrum.from_pairs(vals, vecs, w, zero_threshold,
                                     complete=complete)


def eigh_hermitian(matrix):
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix."""
    matrix = _check_square(np.asarray(matrix, dtype=complex))
    if np.abs(matrix - matrix.conj().T).max(initial=0.0) > SYM_TOL * max(
            1.0, float(np.abs(matrix).max(initial=0.0))):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(matrix)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


@dataclass(frozen=True)
class DistinctEigenvalueGroup:
    mu: float
    index_set: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.index_set)


def group_distinct(spectrum: SignedSpectrum, rel_tol=DEFAULT_REL_TOL):
    """Merge numerically equal neighbours of the same sign into groups.

    Neighbours ``a``, ``b`` merge when ``|a - b| <= rel_tol * max(1, |a|)``.
    Groups come out positives first (descending), then negatives.
    """
    if rel_tol < 0:
        raise ValueError("rel_tol must be non-negative")
    groups = []
    for sign in (1, -1):
        sel = np.flatnonzero(np.sign(spectrum.indices) == sign)
        sel = sel[np.argsort(np.abs(spectrum.indices[sel]))]
        current: list[int] = []
        for pos in sel:
            if current:
                prev = spectrum.values[current[-1]]
                if abs(spectrum.values[pos] - prev) > rel_tol * max(1.0, abs(prev)):
                    groups.append(current)
                    current = []
            current.append(int(pos))
        if current:
            groups.append(current)
    return [
        DistinctEigenvalueGroup(
            mu=float(np.mean(spectrum.values[g])),
            index_set=tuple(int(spectrum.indices[p]) for p in g),
        )
        for g in groups
    ]


def truncate_alpha(spectrum: SignedSpectrum, alpha: float) -> np.ndarray:
    """Cell kernel of ``sum_{|lambda_i| > alpha} lambda_i phi_i (x) phi_i``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    keep = np.abs(spectrum.values) > alpha
    v = spectrum.vectors[:, keep]
    out = (v * spectrum.values[keep]) @ v.conj().T
    return out.real if np.allclose(out.imag, 0) else out


@dataclass(frozen=True)
class ProjectionKernel:
    """Kernel ``K = sum_{i in I} phi_i phi_i^*`` of an orthogonal projection.

    As an operator it acts by ``f -> K @ (weights * f)``.
    """

    matrix: np.ndarray
    weights: np.ndarray
    rank: int = field(default=0)

    def apply(self, f) -> np.ndarray:
        return self.matrix @ (self.weights * np.asarray(f))

    def compose(self, other: "ProjectionKernel") -> "ProjectionKernel":
        _same_weights(self, other)
        return ProjectionKernel(self.matrix @ (self.weights[:, None] * other.matrix),
                                self.weights, self.rank)

    def trace(self) -> float:
        return float(np.real(np.sum(self.weights * np.diag(self.matrix))))

    def refine(self, mapping, weights) -> "ProjectionKernel":
        """Re-express on a refined partition; ``mapping[c]`` is the parent cell."""
        mapping = np.asarray(mapping)
        return ProjectionKernel(self.matrix[np.ix_(mapping, mapping)],
                                np.asarray(weights, dtype=float), self.rank)


def projection_kernel(spectrum: SignedSpectrum, index_set: Sequence[int]) -> ProjectionKernel:
    index_set = list(index_set)
    if not index_set:
        k = spectrum.dim
        return ProjectionKernel(np.zeros((k, k)), spectrum.weights, 0)
    v = spectrum.select(index_set)
    k = v @ v.conj().T
    if np.iscomplexobj(k) and np.allclose(k.imag, 0, atol=1e-14):
        k = k.real
    return ProjectionKernel(k, spectrum.weights, len(index_set))


def _same_weights(p, q):
    if p.weights.shape != q.weights.shape or not np.allclose(
            p.weights, q.weights, rtol=0, atol=1e-12):
        raise ValueError("kernels live on different partitions; refine first")


def hs_inner(p: ProjectionKernel, q: ProjectionKernel) -> complex:
    _same_weights(p, q)
    m = p.weights
    return complex(np.sum(np.outer(m, m) * p.matrix * np.conj(q.matrix)))


def hs_distance(p: ProjectionKernel, q: ProjectionKernel) -> float:
    """Weighted L2 (Hilbert-Schmidt) distance between two kernels."""
    _same_weights(p, q)
    m = p.weights
    d = np.abs(p.matrix - q.matrix) ** 2
    return float(np.sqrt(m @ d @ m))
