"""Output purity: Renyi entropies and maximal output p-norms.

The maximal output p-norm of a channel is searched over pure inputs only;
``rho -> ||Phi(rho)||_p`` is convex, so its maximum over states sits at an
extreme point. The search is projected gradient ascent on the complex unit
sphere with adaptive step halving and seeded restarts. Results are lower
bounds on the true optimum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from .channels import KrausSet, dual_apply, apply, tensor_kraus
from .exceptions import DimensionError, OptimizationError, ParameterRangeError
from .linalg import eigvalsh_desc, schatten_norm
from .validation import check_dim, check_hermitian, check_pnorm, unit_vector

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-16
MIN_STEP = 1e-14
STEP_GROWTH = 2.0
MAX_STEP = 1e6
GRAD_TOL = 1e-6


@dataclass(frozen=True)
class PuritySearchConfig:
    p: float = 2.0
    restarts: int = 64
    max_iters: int = 500
    step: float = 0.1
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        check_pnorm(self.p)
        if self.restarts < 1:
            raise ParameterRangeError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1 or self.step <= 0 or self.tol <= 0:
            raise ParameterRangeError("max_iters, step and tol must be positive")


@dataclass(frozen=True)
class RestartRecord:
    index: int
    seed: int
    value: float
    iterations: int
    converged: bool
    grad_norm: float

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
        }


@dataclass(frozen=True)
class PurityResult:
    """Best restart of a purity search.

    For ``p > 1`` ``value`` is the maximal output p-norm estimate and
    ``renyi`` the matching minimal output Renyi entropy. For ``p = 1``
    ``value`` is 1 (the trace norm) and ``renyi`` is the minimal output
    von Neumann entropy.
    """

    p: float
    value: float
    renyi: float
    argmax_state: np.ndarray
    restarts: list[RestartRecord] = field(default_factory=list)

    @property
    def n_converged(self) -> int:
        return sum(r.converged for r in self.restarts)

    @property
    def best_restart(self) -> int:
        if not self.restarts:
            return -1
        # p = 1 records hold entropies, where lower is better
        sign = 1.0 if self.p > 1 else -1.0
        return max(self.restarts, key=lambda r: (sign * r.value, -r.index)).index

    def renyi_in(self, base: float | None = None) -> float:
        return self.renyi if base is None else self.renyi / np.log(base)


# --- entropies ------------------------------------------------------------


def _density_eigs(sigma) -> np.ndarray:
    sigma = check_hermitian(sigma, tol=1e-8, name="sigma")
    w = np.clip(eigvalsh_desc(sigma), 0.0, None)
    tr = float(np.real(np.trace(sigma)))
    if abs(tr - 1.0) > 1e-8:
        raise ParameterRangeError(f"sigma must have unit trace, got {tr!r}")
    return w


def von_neumann_entropy(sigma, base: float | None = None) -> float:
    w = _density_eigs(sigma)
    w = w[w > 0]
    h = float(-np.sum(w * np.log(w)))
    return h if base is None else h / np.log(base)


def renyi_entropy(sigma, p: float, base: float | None = None) -> float:
    """Renyi p-entropy ``-log(Tr sigma^p)/(p-1)``; von Neumann entropy at ``p = 1``.

    Natural log unless ``base`` is given (``base=2`` for bits).
    """
    p = check_pnorm(p)
    if p == 1.0:
        return von_neumann_entropy(sigma, base)
    w = _density_eigs(sigma)
    h = float(-np.log(np.sum(w**p)) / (p - 1))
    return h if base is None else h / np.log(base)


def renyi_from_norm(value: float, p: float) -> float:
    return float(-p / (p - 1) * np.log(value))


def wh_nu_closed(d: int, p: float) -> float:
    """Maximal output p-norm ``(d-1)^((1-p)/p)`` of the Werner-Holevo channel."""
    check_dim(d, 2)
    p = check_pnorm(p)
    return float((d - 1) ** ((1 - p) / p))


def wh_min_entropy_closed(d: int) -> float:
    """Minimal output Renyi entropy ``log(d-1)``, the same for every ``p >= 1``."""
    check_dim(d, 2)
    return float(np.log(d - 1))


# --- objective ------------------------------------------------------------


def _output(channel, psi) -> np.ndarray:
    return apply(channel, np.outer(psi, psi.conj()))


def _objective(channel, psi, p: float) -> tuple[float, np.ndarray]:
    """Objective and Euclidean ascent operator ``G`` with ``grad = G psi``.

    ``p > 1``: objective ``||sigma||_p`` and ``G = Phi*(sigma^(p-1)) / Tr sigma^p``
    (the gradient of ``log ||sigma||_p`` up to a positive factor).
    ``p = 1``: objective ``-H(sigma)`` and ``G = Phi*(log sigma)``.
    """
    sigma = _output(channel, psi)
    sigma = (sigma + sigma.conj().T) / 2
    w, v = np.linalg.eigh(sigma)
    w = np.clip(w, 0.0, None)
    if p == 1.0:
        pos = w[w > 0]
        value = float(np.sum(pos * np.log(pos)))
        logw = np.log(np.maximum(w, LOG_FLOOR))
        g_out = (v * logw) @ v.conj().T
        return value, dual_apply(channel, g_out)
    top = float(w[-1])
    if top <= 0:
        return 0.0, np.zeros((channel.d_in, channel.d_in), dtype=np.complex128)
    r = w / top
    s = float(np.sum(r**p))
    value = top * s ** (1.0 / p)
    g_out = (v * (r ** (p - 1))) @ v.conj().T / (top * s)
    return value, dual_apply(channel, g_out)


def _ascend(channel, psi0, p: float, cfg: PuritySearchConfig, basis=None, real=False):
    """Run one restart; returns ``(value, psi, iterations, converged, grad_norm)``.

    With ``basis`` the search is restricted to ``psi = basis @ x`` over unit
    ``x`` (real when ``real``), ``basis`` having orthonormal columns.
    """

    def embed(x):
        return x if basis is None else basis @ x

    def tangent(x, gop):
        gx = gop @ embed(x)
        if basis is not None:
            gx = basis.conj().T @ gx
        if real:
            gx = gx.real.astype(np.complex128)
        return gx - np.vdot(x, gx).real * x

    x = psi0
    f, gop = _objective(channel, embed(x), p)
    step = cfg.step
    converged = False
    gnorm = np.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = tangent(x, gop)
        gnorm = float(np.linalg.norm(g))
        if gnorm < 1e-12:
            converged = True
            break
        accepted = False
        while step >= MIN_STEP:
            cand = x + step * g
            cand = cand / np.linalg.norm(cand)
            fc, gc = _objective(channel, embed(cand), p)
            if fc > f:
                accepted = True
                break
            step /= 2
        if not accepted:
            # no ascent direction survives at machine step size: stationary point
            converged = gnorm < 1e-6
            break
        delta = fc - f
        x, f, gop = cand, fc, gc
        step = min(step * STEP_GROWTH, MAX_STEP)
        if delta <= cfg.tol * max(1.0, abs(f)):
            gnorm = float(np.linalg.norm(tangent(x, gop)))
            if gnorm <= GRAD_TOL:
                converged = True
                break
    return f, embed(x), it, converged, gnorm


def _random_start(dim: int, rng: np.random.Generator, real: bool) -> np.ndarray:
    x = rng.standard_normal(dim).astype(np.complex128)
    if not real:
        x = x + 1j * rng.standard_normal(dim)
    return x / np.linalg.norm(x)


def _search(channel, cfg: PuritySearchConfig, basis=None, real=False, start=None) -> PurityResult:
    p = cfg.p
    dim = channel.d_in if basis is None else basis.shape[1]
    best = None
    records = []
    for r in range(cfg.restarts):
        seed = cfg.seed + r
        rng = np.random.default_rng(seed)
        x0 = _random_start(dim, rng, real)
        if start is not None and r == 0:
            x0 = unit_vector(start, dim)
        f, psi, iters, conv, gnorm = _ascend(channel, x0, p, cfg, basis, real)
        if not conv:
            logger.debug("restart %d (seed %d) stopped without converging, value %.12g", r, seed, f)
        # p = 1 records carry the entropy reached, not the negated objective
        records.append(RestartRecord(r, seed, float(f if p > 1 else -f), iters, conv, gnorm))
        # first strictly better restart wins, so ties go to the lowest index
        if best is None or f > best[0]:
            best = (f, psi)
    f, psi = best
    if p > 1:
        value = float(min(f, 1.0))
        renyi = renyi_from_norm(value, p)
    else:
        value = 1.0
        renyi = float(max(-f, 0.0))
    return PurityResult(p, value, renyi, psi, records)


def nu_p(channel: KrausSet, config: PuritySearchConfig | None = None, **overrides) -> PurityResult:
    """Maximal output p-norm by restarted sphere ascent over pure inputs.

    At ``p = 1`` the search minimizes the output von Neumann entropy instead.
    """
    cfg = replace(config or PuritySearchConfig(), **overrides)
    return _search(channel, cfg)


def schmidt_basis(d: int) -> np.ndarray:
    """Columns ``|jj>``, the Schmidt-diagonal subspace of ``C^d (x) C^d``."""
    b = np.zeros((d * d, d), dtype=np.complex128)
    b[np.arange(d) * (d + 1), np.arange(d)] = 1.0
    return b


def nu_p_product(
    channel1: KrausSet,
    channel2: KrausSet,
    config: PuritySearchConfig | None = None,
    restrict: str = "none",
    **overrides,
) -> PurityResult:
    """Maximal output p-norm of ``channel1 (x) channel2`` over pure bipartite inputs.

    ``restrict="schmidt"`` searches only ``sum_j sqrt(lambda_j) |jj>``, which
    is exhaustive for channels whose product is covariant under local unitaries.
    """
    cfg = replace(config or PuritySearchConfig(), **overrides)
    prod = tensor_kraus(channel1, channel2)
    if restrict == "none":
        return _search(prod, cfg)
    if restrict == "schmidt":
        if channel1.d_in != channel2.d_in:
            raise DimensionError("Schmidt-restricted search needs equal input dimensions")
        return _search(prod, cfg, basis=schmidt_basis(channel1.d_in), real=True)
    raise ValueError(f"restrict must be 'none' or 'schmidt', got {restrict!r}")


@dataclass(frozen=True)
class MultiplicativityReport:
    p: float
    nu1: float
    nu2: float
    nu12: float
    ratio: float
    violation: bool
    product_result: PurityResult

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "nu1": self.nu1,
            "nu2": self.nu2,
            "nu12": self.nu12,
            "ratio": self.ratio,
            "violation": self.violation,
        }


def multiplicativity_report(
    channel1: KrausSet,
    channel2: KrausSet,
    p: float,
    config: PuritySearchConfig | None = None,
    violation_tol: float = 1e-6,
    **overrides,
) -> MultiplicativityReport:
    """Compare ``nu_p(Phi1 (x) Phi2)`` with ``nu_p(Phi1) nu_p(Phi2)``.

    The product optimizer is seeded with the tensor product of the single
    optimizers, so ``ratio >= 1`` up to roundoff.
    """
    cfg = replace(config or PuritySearchConfig(), p=check_pnorm(p), **overrides)
    if cfg.p == 1.0:
        raise ParameterRangeError("multiplicativity is defined for p > 1")
    r1 = _search(channel1, cfg)
    r2 = _search(channel2, cfg)
    prod = tensor_kraus(channel1, channel2)
    start = np.kron(r1.argmax_state, r2.argmax_state)
    r12 = _search(prod, cfg, start=start)
    ratio = r12.value / (r1.value * r2.value)
    return MultiplicativityReport(cfg.p, r1.value, r2.value, r12.value, float(ratio), bool(ratio > 1 + violation_tol), r12)


# --- estimator ------------------------------------------------------------


class MaxOutputNorm(BaseEstimator):
    """Estimator wrapper around :func:`nu_p`.

    ``fit`` takes a :class:`KrausSet` (or a fitted ``ChannelTransformer``),
    optionally a second one to search the tensor product.

    Attributes
    ----------
    value_ : float
        Best maximal output p-norm found (1 at ``p=1``).
    renyi_ : float
        Matching minimal output Renyi entropy (natural log).
    argmax_state_ : ndarray
        Unit input vector attaining ``value_``.
    restarts_ : list of RestartRecord
    """

    def __init__(self, p=2.0, restarts=64, max_iter=500, step=0.1, tol=1e-10, seed=0, restrict="none"):
        self.p = p
        self.restarts = restarts
        self.max_iter = max_iter
        self.step = step
        self.tol = tol
        self.seed = seed
        self.restrict = restrict

    def _config(self) -> PuritySearchConfig:
        return PuritySearchConfig(self.p, self.restarts, self.max_iter, self.step, self.tol, self.seed)

    def fit(self, X, y=None):
        channel = _as_kraus(X)
        if y is None:
            if self.restrict != "none":
                raise ValueError("restrict applies only to product searches (pass a second channel as y)")
            result = nu_p(channel, self._config())
        else:
            result = nu_p_product(channel, _as_kraus(y), self._config(), restrict=self.restrict)
        if result.n_converged == 0:
            raise OptimizationError("no restart converged")
        self.result_ = result
        self.value_ = result.value
        self.renyi_ = result.renyi
        self.argmax_state_ = result.argmax_state
        self.restarts_ = result.restarts
        return self

    def score(self, X=None, y=None) -> float:
        return self.value_


def _as_kraus(obj) -> KrausSet:
    if isinstance(obj, KrausSet):
        return obj
    kraus = getattr(obj, "kraus_", None)
    if isinstance(kraus, KrausSet):
        return kraus
    raise TypeError(f"expected a KrausSet or fitted channel transformer, got {type(obj).__name__}")


def probe_norm(channel: KrausSet, psi, p: float) -> float:
    psi = unit_vector(psi, channel.d_in)
    return schatten_norm(_output(channel, psi), p)
