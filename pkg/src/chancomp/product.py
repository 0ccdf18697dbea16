"""The Werner-Holevo channel tensored with its complement.

``Phi (x) Phi~`` maps ``C^d (x) C^d`` to ``C^d (x) (C^d (x) C^d)``; the three
output factors are labelled 1 (from ``Phi``) and 2, 3 (from ``Phi~``).
By local unitary covariance every pure input reduces to a Schmidt-diagonal
vector ``sum_j sqrt(lambda_j) |jj>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import ParameterRangeError
from .linalg import (
    SpectrumReport,
    cluster_eigenvalues,
    eigvalsh_desc,
    flip_operator,
    tensor_product,
)
from .purity import wh_nu_closed
from .validation import check_dim, check_pnorm
from .zoo import wh_apply, wh_complement_apply

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtVector:
    d: int
    lambdas: np.ndarray

    def __post_init__(self):
        check_dim(self.d, 1)
        lam = np.asarray(self.lambdas, dtype=float).reshape(-1)
        if lam.size != self.d:
            raise ParameterRangeError(f"expected {self.d} Schmidt weights, got {lam.size}")
        if np.any(lam < -WEIGHT_TOL) or abs(lam.sum() - 1.0) > WEIGHT_TOL:
            raise ParameterRangeError("Schmidt weights must be nonnegative and sum to 1")
        lam = np.clip(lam, 0.0, None)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def uniform(cls, d: int) -> "SchmidtVector":
        return cls(d, np.full(d, 1.0 / d))

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "SchmidtVector":
        lam = rng.dirichlet(np.ones(d))
        return cls(d, lam / lam.sum())

    @property
    def purity(self) -> float:
        return float(np.sum(self.lambdas**2))

    def reduced_state(self) -> np.ndarray:
        return np.diag(self.lambdas).astype(np.complex128)

    def vector(self) -> np.ndarray:
        psi = np.zeros(self.d * self.d, dtype=np.complex128)
        psi[np.arange(self.d) * (self.d + 1)] = np.sqrt(self.lambdas)
        return psi


def f12(d: int) -> np.ndarray:
    """``F (x) I``: swaps factors 1 and 2 of ``(C^d)^{(x)3}``."""
    return tensor_product(flip_operator(d), np.eye(d))


def f23(d: int) -> np.ndarray:
    return tensor_product(np.eye(d), flip_operator(d))


def p1_projector(d: int) -> np.ndarray:
    """``(I - F_23)/2``, antisymmetric on factors 2 and 3."""
    return (np.eye(d**3) - f23(d)) / 2


def omega_from_schmidt(d: int, schmidt: SchmidtVector) -> np.ndarray:
    """Closed-form output of ``Phi (x) Phi~`` on a Schmidt-diagonal pure input."""
    if schmidt.d != d:
        raise ParameterRangeError(f"Schmidt vector has d={schmidt.d}, expected {d}")
    eye = np.eye(d)
    rho = schmidt.reduced_state()
    root = np.diag(np.sqrt(schmidt.lambdas)).astype(np.complex128)
    a12, a23 = f12(d), f23(d)
    cross = a12 @ tensor_product(root, root, eye)
    bracket = (
        tensor_product(eye, rho, eye)
        + tensor_product(eye, eye, rho)
        - cross
        - a23 @ cross @ a23
    )
    return p1_projector(d) @ bracket / (d - 1) ** 2


def _unit(d: int, a: int, b: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=np.complex128)
    e[a, b] = 1.0
    return e


def bipartite_output(d: int, psi, left, right) -> np.ndarray:
    """``(left (x) right)(|psi><psi|)`` by linearity over matrix units ``|a><b|``."""
    psi = np.asarray(psi, dtype=np.complex128).reshape(d, d)
    lmaps = {(a, b): left(_unit(d, a, b)) for a in range(d) for b in range(d)}
    rmaps = {(a, b): right(_unit(d, a, b)) for a in range(d) for b in range(d)}
    n = lmaps[0, 0].shape[0] * rmaps[0, 0].shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for a in range(d):
        for ap in range(d):
            for b in range(d):
                for bp in range(d):
                    c = psi[a, b] * np.conj(psi[ap, bp])
                    if c != 0:
                        out += c * np.kron(lmaps[a, ap], rmaps[b, bp])
    return out


def product_output(d: int, psi) -> np.ndarray:
    """``(Phi (x) Phi~)(|psi><psi|)`` from the channel actions directly.

    Independent of :func:`omega_from_schmidt`; serves as its oracle.
    """
    return bipartite_output(d, psi, lambda e: wh_apply(d, e), lambda e: wh_complement_apply(d, e))


def tr_omega_sq_closed(d: int, purity: float) -> float:
    """``[(d^2 - 4d + 5) tr rho^2 + 2(d-2)] / (d-1)^4``."""
    check_dim(d, 2)
    if not (1.0 / d - 1e-12 <= purity <= 1.0 + 1e-12):
        raise ParameterRangeError(f"purity must lie in [1/d, 1] = [{1 / d:.6g}, 1], got {purity}")
    return float(((d * d - 4 * d + 5) * purity + 2 * (d - 2)) / (d - 1) ** 4)


def antisym_vectors(d: int) -> np.ndarray:
    """Orthonormal totally antisymmetric vectors, one column per triple ``i<j<k``."""
    triples = list(combinations(range(d), 3))
    out = np.zeros((d**3, len(triples)), dtype=np.complex128)

    def idx(a, b, c):
        return (a * d + b) * d + c

    for col, (i, j, k) in enumerate(triples):
        for (a, b, c), sign in (
            ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
            ((j, i, k), -1), ((k, j, i), -1), ((i, k, j), -1),
        ):
            out[idx(a, b, c), col] += sign
    return out / np.sqrt(6)


def antisym_projector(d: int) -> np.ndarray:
    """``P_2``, the projector onto the totally antisymmetric subspace of ``(C^d)^{(x)3}``."""
    v = antisym_vectors(d)
    return v @ v.conj().T


def omega_me_closed(d: int) -> np.ndarray:
    """``(P_1 + 3 P_2) / (d (d-1)^2)``."""
    check_dim(d, 2)
    return (p1_projector(d) + 3 * antisym_projector(d)) / (d * (d - 1) ** 2)


def omega_me_closed_table(d: int) -> SpectrumReport:
    """Exact spectrum of the maximally entangled output.

    ``4/(d(d-1)^2)`` with multiplicity ``C(d,3)``, ``1/(d(d-1)^2)`` with
    multiplicity ``d(d^2-1)/3`` and zero on the remaining
    ``d^3 - d^2(d-1)/2 = d^2(d+1)/2`` dimensions.
    """
    check_dim(d, 2)
    scale = 1.0 / (d * (d - 1) ** 2)
    rows = [(4 * scale, comb(d, 3)), (scale, d * (d * d - 1) // 3), (0.0, d * d * (d + 1) // 2)]
    return SpectrumReport([(v, m) for v, m in rows if m > 0])


def omega_me_spectrum(d: int, cluster_tol: float = 1e-8) -> SpectrumReport:
    """Numerical spectrum of ``(Phi (x) Phi~)`` on the maximally entangled input."""
    check_dim(d, 2)
    omega = omega_from_schmidt(d, SchmidtVector.uniform(d))
    return cluster_eigenvalues(eigvalsh_desc(omega), cluster_tol)


def wh_square_me_spectrum(d: int, cluster_tol: float = 1e-8) -> SpectrumReport:
    """Spectrum of ``(Phi (x) Phi)`` on the maximally entangled input, for comparison."""
    psi = SchmidtVector.uniform(d).vector()
    out = bipartite_output(d, psi, lambda e: wh_apply(d, e), lambda e: wh_apply(d, e))
    return cluster_eigenvalues(eigvalsh_desc(out), cluster_tol)


# --- violation scan -------------------------------------------------------


def me_power_sum(d: int, p: float) -> float:
    """``||Omega^me||_p^p`` from the exact spectrum."""
    return float(sum(m * v**p for v, m in omega_me_closed_table(d).clusters if v > 0))


def me_ratio(d: int, p: float) -> float:
    """``||Omega^me||_p / nu_p(Phi)^2``, a lower bound on the multiplicativity ratio."""
    p = check_pnorm(p)
    return me_power_sum(d, p) ** (1.0 / p) / wh_nu_closed(d, p) ** 2


def me_ratio_pow(d: int, p: float) -> float:
    """``ratio^p = (1/(d-1)^2) [C(d,3)(4/d)^p + d(d^2-1)/3 (1/d)^p]``."""
    p = check_pnorm(p)
    return float((comb(d, 3) * (4 / d) ** p + d * (d * d - 1) / 3 * (1 / d) ** p) / (d - 1) ** 2)


def crossing_function(d: int, p: float) -> float:
    """``||Omega^me||_p^p - nu_p(Phi)^(2p)``; positive where multiplicativity fails."""
    return me_power_sum(d, p) - float((d - 1) ** (2 * (1 - p)))


def find_crossing(d: int, lo: float = 2.0, hi: float = 8.0, tol: float = 1e-10) -> float | None:
    """Onset of ME-witnessed violation: bisection root of :func:`crossing_function` on ``[lo, hi]``.

    Only a change from negative at ``lo`` to positive at ``hi`` counts; the
    touching point ``p = 1`` (where the ratio is exactly 1) is not a crossing.
    """
    flo, fhi = crossing_function(d, lo), crossing_function(d, hi)
    if not (flo < 0 < fhi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crossing_function(d, mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ViolationScanResult:
    d: int
    p_grid: list[float]
    ratio_lower_bounds: list[float]
    crossing: float | None

    @property
    def log_ratios(self) -> list[float]:
        return [float(np.log(r)) for r in self.ratio_lower_bounds]

    @property
    def any_violation(self) -> bool:
        return any(r > 1 + 1e-12 for r in self.ratio_lower_bounds)


def violation_scan(d: int, p_grid) -> ViolationScanResult:
    """ME-witnessed multiplicativity ratio on a p grid, with the crossing point.

    The crossing is searched by bisection on ``[2, 8]``; it exists for
    ``d = 3`` and is absent for ``d >= 4``.
    """
    check_dim(d, 2)
    grid = [check_pnorm(p) for p in np.ravel(np.asarray(p_grid, dtype=float))]
    if not grid:
        raise ParameterRangeError("p grid is empty")
    ratios = [me_ratio(d, p) for p in grid]
    return ViolationScanResult(d, grid, ratios, find_crossing(d))
