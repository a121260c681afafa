"""Harmonic analysis on finite groups and the circle, and Cayley graphons.

Haar measure on a finite group of order N is the counting measure divided
by N throughout, so for a Cayley function ``gamma`` the step graphon
``w(s, t) = gamma(s t^-1)`` on N equal cells has exactly the eigenvalues of
the matrices ``pi(gamma) = (1/N) sum_g gamma(g) pi(g)``.

Functions on a group are numpy vectors indexed like ``group.names``.
Permutations compose right to left: ``(s t)(x) = s(t(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphon import StepGraphon, uniform_measures
from .linalg import SignedSpectrum, eigh_hermitian

MERGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group given by its multiplication table ``table[a, b] = a * b``."""

    names: tuple[str, ...]
    table: np.ndarray
    classes: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        table = np.asarray(self.table, dtype=int)
        n = len(self.names)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "table", table)
        if table.shape != (n, n):
            raise ValueError(f"table shape {table.shape} does not match {n} elements")
        if table.min() < 0 or table.max() >= n:
            raise ValueError("table entries out of range")
        for row in table:
            if len(set(row.tolist())) != n:
                raise ValueError("table rows must be permutations (Latin square)")
        ident = [e for e in range(n) if np.array_equal(table[e], np.arange(n))]
        if not ident or not np.array_equal(table[:, ident[0]], np.arange(n)):
            raise ValueError("no two-sided identity")
        object.__setattr__(self, "identity", ident[0])
        inv = np.array([int(np.flatnonzero(table[a] == ident[0])[0]) for a in range(n)])
        if not np.all(table[inv, np.arange(n)] == ident[0]):
            raise ValueError("left and right inverses disagree")
        object.__setattr__(self, "inverse", inv)
        if n <= 24:
            ab_c = table[table[:, :, None], np.arange(n)[None, None, :]]
            a_bc = table[np.arange(n)[:, None, None], table[None, :, :]]
            if not np.array_equal(ab_c, a_bc):
                raise ValueError("multiplication is not associative")
        computed = self._conjugacy_classes()
        if self.classes is None:
            object.__setattr__(self, "classes", computed)
        else:
            given = sorted(tuple(sorted(c)) for c in self.classes)
            if given != sorted(computed):
                raise ValueError("given conjugacy classes are wrong")
            object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))

    @property
    def order(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def _conjugacy_classes(self):
        n = self.order
        seen = np.zeros(n, bool)
        out = []
        for g in range(n):
            if seen[g]:
                continue
            cls = sorted({int(self.table[self.table[h, g], self.inverse[h]]) for h in range(n)})
            seen[cls] = True
            out.append(tuple(cls))
        return tuple(out)

    def reordered(self, names: Sequence[str]) -> tuple["FiniteGroup", np.ndarray]:
        """Same group with elements listed in ``names`` order; also returns the permutation."""
        perm = np.array([self.index(x) for x in names])
        if sorted(perm.tolist()) != list(range(self.order)):
            raise ValueError("names must be a permutation of the elements")
        pos = np.argsort(perm)
        table = pos[self.table[np.ix_(perm, perm)]]
        return FiniteGroup(tuple(names), table), perm

    @classmethod
    def from_permutations(cls, names, perms) -> "FiniteGroup":
        perms = [tuple(p) for p in perms]
        look = {p: i for i, p in enumerate(perms)}
        table = [[look[tuple(a[b[x]] for x in range(len(b)))] for b in perms] for a in perms]
        return cls(tuple(names), np.array(table))


@dataclass(frozen=True, eq=False)
class Irrep:
    label: str
    matrices: np.ndarray  # (N, d, d)

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=complex)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError("irrep matrices must have shape (N, d, d)")
        object.__setattr__(self, "matrices", m)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)


@dataclass(frozen=True, eq=False)
class IrrepSet:
    """Pairwise inequivalent unitary irreps of ``group``."""

    group: FiniteGroup
    irreps: tuple[Irrep, ...]

    def __post_init__(self):
        object.__setattr__(self, "irreps", tuple(self.irreps))
        for pi in self.irreps:
            if pi.matrices.shape[0] != self.group.order:
                raise ValueError(f"irrep {pi.label} has wrong number of matrices")

    def __iter__(self):
        return iter(self.irreps)

    def __len__(self):
        return len(self.irreps)

    def by_label(self, label: str) -> Irrep:
        for pi in self.irreps:
            if pi.label == label:
                return pi
        raise KeyError(label)

    @property
    def is_complete(self) -> bool:
        return sum(pi.dim ** 2 for pi in self.irreps) == self.group.order

    def require_complete(self):
        total = sum(pi.dim ** 2 for pi in self.irreps)
        if total != self.group.order:
            raise ValueError(f"incomplete irrep set: sum d^2 = {total} != {self.group.order}")

    def validate(self, tol=1e-12):
        """Raise if any irrep fails homomorphism, unitarity or irreducibility,
        or if characters of different irreps are not orthogonal."""
        g = self.group
        n = g.order
        for pi in self.irreps:
            m = pi.matrices
            prod = np.einsum("aij,bjk->abik", m, m)
            if np.abs(prod - m[g.table]).max() > tol:
                raise ValueError(f"{pi.label} is not a homomorphism")
            eye = np.eye(pi.dim)
            if np.abs(np.einsum("aji,ajk->aik", m.conj(), m) - eye).max() > tol:
                raise ValueError(f"{pi.label} is not unitary")
            chi = pi.character
            if abs(np.vdot(chi, chi) / n - 1) > 1e-10:
                raise ValueError(f"{pi.label} is not irreducible")
        chars = np.array([pi.character for pi in self.irreps])
        gram = chars.conj() @ chars.T / n
        if np.abs(gram - np.eye(len(self.irreps))).max() > 1e-10:
            raise ValueError("characters are not orthonormal (equivalent irreps?)")


# -- built-in groups --------------------------------------------------------

def cyclic_group(n: int) -> tuple[FiniteGroup, IrrepSet]:
    """Z_n with elements 0..n-1 and characters g -> exp(2 pi i k g / n)."""
    idx = np.arange(n)
    group = FiniteGroup(tuple(str(i) for i in range(n)), (idx[:, None] + idx[None, :]) % n)
    irreps = tuple(
        Irrep(f"chi{k}", np.exp(2j * np.pi * k * idx / n).reshape(n, 1, 1))
        for k in range(n)
    )
    return group, IrrepSet(group, irreps)


S3_NAMES = ("id", "(12)", "(23)", "(13)", "(123)", "(132)")
# element order under which the S3 Cayley graphon equals the printed 6x6 model matrix
S3_MODEL_ORDER = ("id", "(23)", "(12)", "(132)", "(123)", "(13)")
S3_GAMMA = (0.6, 0.1, 0.3, 0.0, 0.0, 0.0)


def symmetric_group_3() -> tuple[FiniteGroup, IrrepSet]:
    """S3 with trivial, sign and the 2-dimensional standard representation."""
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    group = FiniteGroup.from_permutations(S3_NAMES, perms)
    h = np.sqrt(3) / 2
    standard = np.array([
        [[1, 0], [0, 1]],
        [[-0.5, h], [h, 0.5]],
        [[1, 0], [0, -1]],
        [[-0.5, -h], [-h, 0.5]],
        [[-0.5, -h], [h, -0.5]],
        [[-0.5, h], [-h, -0.5]],
    ])
    sign = np.array([1, -1, -1, -1, 1, 1])
    irreps = (
        Irrep("trivial", np.ones((6, 1, 1))),
        Irrep("sign", sign.reshape(6, 1, 1)),
        Irrep("standard", standard),
    )
    return group, IrrepSet(group, irreps)


def reorder_irreps(irreps: IrrepSet, names: Sequence[str]) -> IrrepSet:
    group, perm = irreps.group.reordered(names)
    return IrrepSet(group, tuple(Irrep(pi.label, pi.matrices[perm]) for pi in irreps))


def direct_product(a: tuple[FiniteGroup, IrrepSet],
                   b: tuple[FiniteGroup, IrrepSet]) -> tuple[FiniteGroup, IrrepSet]:
    """G x H with element (g, h) at index g * |H| + h and tensor-product irreps."""
    (ga, ra), (gb, rb) = a, b
    na, nb = ga.order, gb.order
    names = tuple(f"({x},{y})" for x in ga.names for y in gb.names)
    i = np.arange(na * nb)
    ia, ib = i // nb, i % nb
    table = ga.table[np.ix_(ia, ia)] * nb + gb.table[np.ix_(ib, ib)]
    group = FiniteGroup(names, table)
    irreps = tuple(
        Irrep(f"{p.label}x{q.label}",
              np.einsum("aij,akl->aikjl", p.matrices[ia], q.matrices[ib]).reshape(
                  na * nb, p.dim * q.dim, p.dim * q.dim))
        for p in ra for q in rb
    )
    return group, IrrepSet(group, irreps)


# -- Fourier analysis --------------------------------------------------------

def group_fourier(f, irrep: Irrep) -> np.ndarray:
    """``pi(f) = (1/N) sum_g f(g) pi(g)``."""
    f = np.asarray(f)
    return np.einsum("g,gij->ij", f, irrep.matrices) / len(f)


def inverse_fourier(irreps: IrrepSet, transforms: Sequence[np.ndarray]) -> np.ndarray:
    """``f(x) = sum_pi d_pi Tr(pi(x)^* pi(f))``."""
    out = np.zeros(irreps.group.order, dtype=complex)
    for pi, ft in zip(irreps, transforms):
        out += pi.dim * np.einsum("xji,ji->x", pi.matrices.conj(), ft)
    return out


def check(group: FiniteGroup, f) -> np.ndarray:
    """``f(x^-1)``."""
    return np.asarray(f)[group.inverse]


def involution(group: FiniteGroup, f) -> np.ndarray:
    """``f^*(x) = conj(f(x^-1))``."""
    return np.conj(check(group, f))


def group_convolve(group: FiniteGroup, f, g) -> np.ndarray:
    """``(f * g)(x) = (1/N) sum_y f(y) g(y^-1 x)``."""
    f, g = np.asarray(f), np.asarray(g)
    # idx[y, x] = y^-1 x
    idx = group.table[group.inverse][:, :]
    return f @ g[idx] / group.order


def coefficient_function(irrep: Irrep, i: int, j: int) -> np.ndarray:
    """``pi_ij(g) = <pi(g) e_i, e_j>``, i.e. the entry at row j, column i (1-based)."""
    d = irrep.dim
    if not (1 <= i <= d and 1 <= j <= d):
        raise IndexError(f"coefficient ({i}, {j}) outside dimension {d}")
    return irrep.matrices[:, j - 1, i - 1]


@dataclass
class CheckReport:
    passed: bool
    max_violation: float
    details: list = field(default_factory=list)


def schur_check(irreps: IrrepSet, tol=1e-12) -> CheckReport:
    """Schur orthogonality of all coefficient functions in ``irreps``."""
    n = irreps.group.order
    cols, expected = [], []
    for pi in irreps:
        for i in range(1, pi.dim + 1):
            for j in range(1, pi.dim + 1):
                cols.append((pi.label, i, j, coefficient_function(pi, i, j)))
                expected.append(1.0 / pi.dim)
    mat = np.array([c[3] for c in cols])
    gram = mat @ mat.conj().T / n
    diff = np.abs(gram - np.diag(expected))
    bad = np.argwhere(diff > tol)
    details = [(cols[a][:3], cols[b][:3], float(diff[a, b])) for a, b in bad]
    return CheckReport(not details, float(diff.max(initial=0.0)), details)


def parseval_check(f, irreps: IrrepSet) -> CheckReport:
    """Compare ``||f||^2`` with ``sum_pi d_pi Tr(pi(f)^* pi(f))``."""
    irreps.require_complete()
    f = np.asarray(f)
    lhs = float(np.mean(np.abs(f) ** 2))
    rhs = 0.0
    for pi in irreps:
        ft = group_fourier(f, pi)
        rhs += pi.dim * float(np.real(np.trace(ft.conj().T @ ft)))
    diff = abs(lhs - rhs)
    return CheckReport(diff <= 1e-12 * max(1.0, lhs), diff, [("lhs", lhs), ("rhs", rhs)])


# -- Cayley graphons ---------------------------------------------------------

def is_cayley_function(group: FiniteGroup, gamma, tol=1e-12) -> bool:
    gamma = np.asarray(gamma)
    return bool(np.abs(gamma - gamma[group.inverse]).max() <= tol)


def cayley_graphon(group: FiniteGroup, gamma) -> StepGraphon:
    """Step graphon with value ``gamma(s t^-1)`` on cell pair (s, t)."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (group.order,):
        raise ValueError("gamma must have one value per group element")
    if not is_cayley_function(group, gamma):
        raise ValueError("gamma(g) != gamma(g^-1): not a Cayley function")
    idx = group.table[:, group.inverse]  # idx[s, t] = s t^-1
    return StepGraphon(gamma[idx], uniform_measures(group.order))


def cayley_apply(group: FiniteGroup, gamma, f) -> np.ndarray:
    """``T_w f`` through convolution: ``T_w f (x) = (f_check * gamma_check)(x^-1)``."""
    conv = group_convolve(group, check(group, f), check(group, gamma))
    return conv[group.inverse]


def left_regular_apply(group: FiniteGroup, gamma, f) -> np.ndarray:
    """``L(gamma) f (x) = (1/N) sum_y gamma(y) f(y^-1 x)``."""
    return group_convolve(group, gamma, f)


@dataclass(frozen=True)
class SpectralLine:
    value: float
    multiplicity: int
    provenance: tuple[tuple[str, int], ...]


def _merge_lines(entries, tol=MERGE_TOL):
    """entries: (value, multiplicity, label, m).  Merge values within ``tol``."""
    entries = sorted(entries, key=lambda e: -e[0])
    lines: list[list] = []
    for val, mult, label, m in entries:
        if lines and abs(lines[-1][0][-1] - val) <= tol:
            line = lines[-1]
            line[0].append(val)
            line[1] += mult
            line[2].append((label, m))
        else:
            lines.append([[val], mult, [(label, m)]])
    return [SpectralLine(float(np.mean(v)), mult, tuple(prov)) for v, mult, prov in lines]


def spectrum_via_reps(irreps: IrrepSet, gamma) -> list[SpectralLine]:
    """Eigenvalues of the Cayley graphon from the matrices ``pi(gamma)``.

    An eigenvalue of ``pi(gamma)`` with multiplicity m contributes
    ``d_pi * m`` to the graphon multiplicity.  Zero eigenvalues are kept.
    """
    irreps.require_complete()
    exact = []
    for pi in irreps:
        vals, _ = eigh_hermitian(group_fourier(gamma, pi))
        i = 0
        while i < len(vals):
            j = i + 1
            while j < len(vals) and abs(vals[j] - vals[i]) <= MERGE_TOL:
                j += 1
            exact.append((float(np.mean(vals[i:j])), pi.dim * (j - i), pi.label, j - i))
            i = j
    return _merge_lines(exact)


@dataclass(frozen=True, eq=False)
class BasisVector:
    value: float
    label: str
    row: int
    z: np.ndarray
    vector: np.ndarray


def eigenbasis_vectors(irreps: IrrepSet, gamma) -> list[BasisVector]:
    """Eigenvectors ``sqrt(d) sum_j z_j pi_ij`` for eigenvectors z of conj(pi(gamma)).

    Unit norm under the normalized counting measure.
    """
    irreps.require_complete()
    out = []
    for pi in irreps:
        vals, zs = eigh_hermitian(np.conj(group_fourier(gamma, pi)))
        coeff = [[coefficient_function(pi, i, j) for j in range(1, pi.dim + 1)]
                 for i in range(1, pi.dim + 1)]
        for a in range(pi.dim):
            z = zs[:, a]
            for i in range(pi.dim):
                v = np.sqrt(pi.dim) * sum(z[j] * coeff[i][j] for j in range(pi.dim))
                out.append(BasisVector(float(vals[a]), pi.label, i + 1, z, v))
    return out


def eigenbasis_via_reps(irreps: IrrepSet, gamma) -> SignedSpectrum:
    """Signed spectrum of the Cayley graphon built from representation data."""
    basis = eigenbasis_vectors(irreps, gamma)
    n = irreps.group.order
    values = np.array([b.value for b in basis])
    vectors = np.column_stack([b.vector for b in basis])
    radius = np.abs(values).max(initial=0.0)
    return SignedSpectrum.from_pairs(values, vectors, uniform_measures(n),
                                     zero_threshold=1e-10 * radius)


def is_class_function(group: FiniteGroup, gamma, tol=1e-12) -> bool:
    gamma = np.asarray(gamma)
    return bool(np.abs(gamma[group.table] - gamma[group.table.T]).max() <= tol)


@dataclass(frozen=True, eq=False)
class QuasiAbelianLine:
    value: float
    multiplicity: int
    label: str
    vectors: np.ndarray  # (N, d^2), columns sqrt(d) pi_ij


def quasi_abelian_spectrum(irreps: IrrepSet, gamma) -> list[QuasiAbelianLine]:
    """Class-function case: ``lambda_pi = Tr(pi(gamma)) / d_pi`` on all coefficient functions."""
    if not is_class_function(irreps.group, gamma):
        raise ValueError("gamma is not constant on conjugacy classes")
    irreps.require_complete()
    out = []
    for pi in irreps:
        lam = float(np.real(np.trace(group_fourier(gamma, pi)))) / pi.dim
        vecs = np.column_stack([
            np.sqrt(pi.dim) * coefficient_function(pi, i, j)
            for i in range(1, pi.dim + 1) for j in range(1, pi.dim + 1)
        ])
        out.append(QuasiAbelianLine(lam, pi.dim ** 2, pi.label, vecs))
    return out


@dataclass(frozen=True, eq=False)
class AbelianSpectrum:
    values: np.ndarray           # eigenvalue of character k, k = 0..n-1
    characters: np.ndarray       # (n, n), column k is chi_k
    eigenspaces: list[tuple[float, tuple[int, ...]]]


def abelian_spectrum(n: int, gamma) -> AbelianSpectrum:
    """Cyclic group: eigenvalue ``(1/n) sum_g gamma(g) chi_k(g)`` on character chi_k."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (n,):
        raise ValueError("gamma must have n values")
    g = np.arange(n)
    if np.abs(gamma - gamma[(-g) % n]).max() > 1e-12:
        raise ValueError("gamma is not symmetric")
    chars = np.exp(2j * np.pi * np.outer(g, g) / n)
    vals = gamma @ chars / n
    values = vals.real
    order = np.argsort(-values, kind="stable")
    spaces = []
    for k in order:
        if spaces and abs(spaces[-1][0] - values[k]) <= MERGE_TOL:
            spaces[-1] = (spaces[-1][0], spaces[-1][1] + (int(k),))
        else:
            spaces.append((float(values[k]), (int(k),)))
    return AbelianSpectrum(values, chars, spaces)


# -- the circle ---------------------------------------------------------------

@dataclass(frozen=True)
class TorusBandParams:
    """Band graphon on the circle: ``1 - p`` within circular distance d, ``p`` elsewhere."""

    d: float
    p: float

    def __post_init__(self):
        if not 0 < self.d < 0.5:
            raise ValueError("d must lie in (0, 1/2)")
        if not 0 < self.p < 0.5:
            raise ValueError("p must lie in (0, 1/2)")

    def kernel(self, x, y):
        u = np.abs(np.asarray(x) - np.asarray(y))
        near = (u <= self.d) | (u >= 1 - self.d)
        return np.where(near, 1 - self.p, self.p)


def ws_closed_form_spectrum(params: TorusBandParams, max_freq: int) -> np.ndarray:
    """``p + 2d - 4pd`` followed by ``(1-2p) sin(2 pi k d) / (pi k)`` twice for k = 1..K."""
    if max_freq < 1:
        raise ValueError("max_freq must be at least 1")
    d, p = params.d, params.p
    k = np.arange(1, max_freq + 1)
    band = (1 - 2 * p) * np.sin(2 * np.pi * k * d) / (np.pi * k)
    return np.concatenate([[p + 2 * d - 4 * p * d], np.repeat(band, 2)])


def _tri_cdf(t):
    t = np.clip(t, -1.0, 1.0)
    return np.where(t <= 0, 0.5 * (1 + t) ** 2, 1 - 0.5 * (1 - t) ** 2)


def discretize_torus_graphon(params: TorusBandParams, k: int) -> StepGraphon:
    """Exact cell averages of the band kernel on k equal cells.

    Over a cell pair with offset ``delta`` the difference ``x - y`` is
    ``(delta + tau) / k`` with tau triangular on [-1, 1], so the band
    fraction is a sum of triangular-CDF differences.
    """
    if k < 2:
        raise ValueError("need at least 2 cells")
    d, p = params.d, params.p
    delta = np.arange(k, dtype=float)
    frac = np.zeros(k)
    for m in (-1, 0, 1, 2):
        frac += _tri_cdf((m + d) * k - delta) - _tri_cdf((m - d) * k - delta)
    row = p + (1 - 2 * p) * frac
    idx = (np.arange(k)[:, None] - np.arange(k)[None, :]) % k
    vals = row[idx]
    return StepGraphon(0.5 * (vals + vals.T), uniform_measures(k))
