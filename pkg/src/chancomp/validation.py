"""Input validation helpers shared by the public functions and estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, NotHermitianError, ParameterRangeError

HERMITIAN_TOL = 1e-10


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def check_square(a, dim: int | None = None, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"{name} must be {dim}x{dim}, got shape {arr.shape}")
    return arr


def check_hermitian(a, tol: float = HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    arr = check_square(a, name=name)
    resid = np.max(np.abs(arr - arr.conj().T), initial=0.0)
    if resid > tol:
        raise NotHermitianError(f"{name} is not Hermitian (max|A-A^H| = {resid:.3e})")
    return arr


def check_density(rho, dim: int | None = None, tol: float = 1e-8, name: str = "rho") -> np.ndarray:
    """Validate a density matrix: square, Hermitian, PSD and unit trace."""
    arr = check_square(rho, dim, name)
    check_hermitian(arr, tol=tol, name=name)
    tr = np.trace(arr).real
    if abs(tr - 1.0) > tol:
        raise ParameterRangeError(f"{name} must have unit trace, got {tr!r}")
    lo = np.linalg.eigvalsh((arr + arr.conj().T) / 2)[0]
    if lo < -tol:
        raise ParameterRangeError(f"{name} has negative eigenvalue {lo:.3e}")
    return arr


def check_unitary(u, tol: float = 1e-10, name: str = "u") -> np.ndarray:
    arr = check_square(u, name=name)
    resid = np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])))
    if resid > tol:
        raise ParameterRangeError(f"{name} is not unitary (residual {resid:.3e})")
    return arr


def check_pnorm(p: float, name: str = "p") -> float:
    p = float(p)
    if not np.isfinite(p) or p < 1.0:
        raise ParameterRangeError(f"{name} must be a finite real >= 1, got {p!r}")
    return p


def check_dim(d: int, minimum: int = 1, name: str = "d") -> int:
    if int(d) != d or d < minimum:
        raise ParameterRangeError(f"{name} must be an integer >= {minimum}, got {d!r}")
    return int(d)


def unit_vector(psi, dim: int | None = None, name: str = "psi") -> np.ndarray:
    """Return ``psi`` flattened and normalized; rejects the zero vector."""
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if dim is not None and vec.size != dim:
        raise DimensionError(f"{name} must have length {dim}, got {vec.size}")
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ParameterRangeError(f"{name} is the zero vector")
    return vec / nrm
