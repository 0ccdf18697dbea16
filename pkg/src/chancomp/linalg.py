"""Dense complex linear algebra used throughout the package.

Composite indices are flattened first-factor-most-significant: the basis
vector ``|i> (x) |j>`` of a ``d_a * d_b`` space sits at index ``i * d_b + j``.
This matches ``numpy.kron`` and row-major reshaping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .exceptions import DimensionError, NotPSDError, ParameterRangeError
from .validation import as_matrix, check_hermitian, check_pnorm, check_square

CLUSTER_TOL = 1e-8
PSD_CLAMP = 1e-8


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues in descending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues grouped into ``(value, multiplicity)`` clusters."""

    clusters: list[tuple[float, int]]
    cluster_tol: float = CLUSTER_TOL

    @property
    def dimension(self) -> int:
        return sum(m for _, m in self.clusters)

    def multiplicity(self, value: float, tol: float | None = None) -> int:
        tol = self.cluster_tol if tol is None else tol
        return sum(m for v, m in self.clusters if abs(v - value) <= tol)

    def values(self) -> list[float]:
        return [v for v, _ in self.clusters]

    def as_list(self) -> list[list]:
        return [[v, m] for v, m in self.clusters]


def tensor_product(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, first factor most significant."""
    if not factors:
        raise DimensionError("tensor_product needs at least one factor")
    mats = [as_matrix(f) for f in factors]
    return reduce(np.kron, mats)


def partial_trace(m, dims: tuple[int, int], keep: str = "first") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : array_like
        Operator on ``C^d1 (x) C^d2``.
    dims : (int, int)
        Factor dimensions ``(d1, d2)``.
    keep : {"first", "second"}
        Which factor survives.
    """
    d1, d2 = (int(x) for x in dims)
    arr = check_square(m, name="m")
    if arr.shape[0] != d1 * d2:
        raise DimensionError(f"operator of size {arr.shape[0]} does not match dims {dims}")
    t = arr.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ijkj->ik", t)
    if keep == "second":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def hermitian_eig(a, tol: float = 1e-10) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    arr = check_hermitian(a, tol=tol * max(1.0, np.max(np.abs(as_matrix(a)), initial=0.0)), name="a")
    arr = (arr + arr.conj().T) / 2
    w, v = np.linalg.eigh(arr)
    return HermitianSpectrum(w[::-1].copy(), v[:, ::-1].copy())


def eigvalsh_desc(a) -> np.ndarray:
    arr = as_matrix(a)
    return np.linalg.eigvalsh((arr + arr.conj().T) / 2)[::-1]


def cluster_eigenvalues(values, cluster_tol: float = CLUSTER_TOL) -> SpectrumReport:
    """Group sorted values whose gap to the running cluster mean is within ``cluster_tol``."""
    vals = sorted((float(np.real(x)) for x in np.ravel(values)), reverse=True)
    groups: list[list[float]] = []
    for x in vals:
        if groups and abs(np.mean(groups[-1]) - x) <= cluster_tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    clusters = []
    for g in groups:
        rep = float(np.mean(g))
        if abs(rep) <= cluster_tol:
            rep = 0.0
        clusters.append((rep, len(g)))
    return SpectrumReport(clusters, cluster_tol)


def spectrum_report(a, cluster_tol: float = CLUSTER_TOL) -> SpectrumReport:
    return cluster_eigenvalues(hermitian_eig(a).eigenvalues, cluster_tol)


def psd_sqrt(a) -> np.ndarray:
    """Positive square root of a Hermitian PSD matrix.

    Eigenvalues within ``1e-8 * max|lambda|`` below zero are clamped to
    zero; anything more negative raises :class:`NotPSDError`.
    """
    spec = hermitian_eig(a)
    w = spec.eigenvalues
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    if w.size and w[-1] < -PSD_CLAMP * scale:
        raise NotPSDError(f"matrix has eigenvalue {w[-1]:.3e}, not positive semidefinite")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = spec.eigenvectors
    out = (v * root) @ v.conj().T
    return (out + out.conj().T) / 2


def polar_decompose(t) -> tuple[np.ndarray, np.ndarray]:
    """Right polar decomposition ``t = u @ s`` with ``s = sqrt(t^H t)``.

    ``u`` is an isometry on the range of ``s`` and vanishes on its kernel.
    """
    arr = as_matrix(t, "t")
    m, n = arr.shape
    if m < n:
        raise DimensionError(f"polar_decompose expects rows >= cols, got {arr.shape}")
    # SVD avoids squaring the condition number through t^H t
    w, sv, vh = np.linalg.svd(arr, full_matrices=False)
    keep = sv > 1e-12 * max(1.0, float(np.max(sv, initial=0.0)))
    u = w[:, keep] @ vh[keep]
    s = (vh.conj().T * sv) @ vh
    s = (s + s.conj().T) / 2
    return u, s


def schatten_norm(sigma, p: float) -> float:
    """Schatten p-norm of a PSD matrix from its eigenvalues."""
    p = check_pnorm(p)
    w = np.clip(eigvalsh_desc(sigma), 0.0, None)
    if p == 1.0:
        return float(np.sum(w))
    top = float(w[0]) if w.size else 0.0
    if top == 0.0:
        return 0.0
    # factor out the largest eigenvalue to avoid underflow at large p
    return top * float(np.sum((w / top) ** p)) ** (1.0 / p)


def maximally_entangled(d: int) -> np.ndarray:
    """``d^{-1/2} sum_j |j>|j>`` as a ``d^2 x 1`` column."""
    if d < 1:
        raise ParameterRangeError("d must be >= 1")
    v = np.zeros((d * d, 1), dtype=np.complex128)
    v[np.arange(d) * (d + 1), 0] = 1.0 / np.sqrt(d)
    return v


def flip_operator(d: int) -> np.ndarray:
    """Swap operator ``F|ij> = |ji>`` on ``C^d (x) C^d``."""
    if d < 1:
        raise ParameterRangeError("d must be >= 1")
    f = np.zeros((d * d, d * d), dtype=np.complex128)
    i, j = np.divmod(np.arange(d * d), d)
    f[j * d + i, i * d + j] = 1.0
    return f


def permute_factors(dims, perm) -> np.ndarray:
    """Permutation matrix P with ``P (x)_k v_k = (x)_k v_{perm[k]}``.

    Output factor ``k`` is input factor ``perm[k]``.
    """
    dims = [int(x) for x in dims]
    n = int(np.prod(dims))
    idx = np.arange(n).reshape(dims)
    src = np.transpose(idx, perm).reshape(-1)
    p = np.zeros((n, n), dtype=np.complex128)
    p[np.arange(n), src] = 1.0
    return p


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
