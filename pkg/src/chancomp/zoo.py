"""Closed-form channel families and their complementary channels.

Depolarizing ``(1-p) rho + p Tr(rho) I/d`` and transpose-depolarizing
``t rho^T + (1-t) Tr(rho) I/d``; the latter at ``t = -1/(d-1)`` is the
Werner-Holevo channel. Transposition and complex conjugation are taken
in the computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as _ch
from .channels import KrausSet, choi_from_action, conjugate_ancilla, kraus_from_choi, kraus_from_dual_rep
from .exceptions import ParameterRangeError
from .linalg import flip_operator, maximally_entangled, tensor_product
from .validation import check_dim, check_square, check_unitary

RANGE_TOL = 1e-12


@dataclass(frozen=True)
class DepolarizingParams:
    d: int
    p: float

    def __post_init__(self):
        check_dim(self.d, 2)
        hi = self.d**2 / (self.d**2 - 1)
        if not (-RANGE_TOL <= self.p <= hi + RANGE_TOL):
            raise ParameterRangeError(f"depolarizing p must lie in [0, {hi:.6g}] for d={self.d}, got {self.p}")

    @property
    def p_max(self) -> float:
        return self.d**2 / (self.d**2 - 1)

    @property
    def kraus_constructible(self) -> bool:
        return self.p <= 1.0 + RANGE_TOL

    def require_kraus_range(self, what: str = "Kraus form") -> None:
        if not self.kraus_constructible:
            raise ParameterRangeError(
                f"{what} needs sqrt(1-p) and is restricted to p <= 1 (got p={self.p}); "
                "use the direct action or the minimal complement form"
            )


@dataclass(frozen=True)
class TransposeDepolarizingParams:
    d: int
    t: float

    def __post_init__(self):
        check_dim(self.d, 2)
        lo, hi = -1.0 / (self.d - 1), 1.0 / (self.d + 1)
        if not (lo - RANGE_TOL <= self.t <= hi + RANGE_TOL):
            raise ParameterRangeError(
                f"transpose-depolarizing t must lie in [{lo:.6g}, {hi:.6g}] for d={self.d}, got {self.t}"
            )

    @property
    def c_plus(self) -> float:
        d = self.d
        return max(0.0, (d * d - 1) / (2 * d) * (1 / (d - 1) + self.t))

    @property
    def c_minus(self) -> float:
        d = self.d
        return max(0.0, (d * d - 1) / (2 * d) * (1 / (d + 1) - self.t))

    @property
    def a_plus(self) -> float:
        return float(np.sqrt(self.c_plus / (2 * (self.d + 1))))

    @property
    def a_minus(self) -> float:
        return float(np.sqrt(self.c_minus / (2 * (self.d - 1))))


def werner_holevo(d: int) -> TransposeDepolarizingParams:
    return TransposeDepolarizingParams(d, -1.0 / (d - 1))


# --- depolarizing ---------------------------------------------------------


def depolarizing_apply(params: DepolarizingParams, rho) -> np.ndarray:
    d, p = params.d, params.p
    rho = check_square(rho, d, "rho")
    return (1 - p) * rho + (p / d) * np.trace(rho) * np.eye(d)


def depolarizing_kraus(params: DepolarizingParams) -> KrausSet:
    """``sqrt(1-p) I`` followed by ``sqrt(p/d) |j><i|`` at slot ``1 + i*d + j``."""
    params.require_kraus_range("depolarizing Kraus set")
    d, p = params.d, min(params.p, 1.0)
    ops = np.zeros((d * d + 1, d, d), dtype=np.complex128)
    ops[0] = np.sqrt(1 - p) * np.eye(d)
    c = np.sqrt(p / d)
    for i in range(d):
        for j in range(d):
            ops[1 + i * d + j, j, i] = c
    return KrausSet(ops)


def depolarizing_t_matrix(params: DepolarizingParams) -> np.ndarray:
    """Non-minimal operator ``T`` of size ``(d^2+1) x d^2``: rows ``sqrt(d(1-p)) <Omega|`` over ``sqrt(p/d) I``."""
    params.require_kraus_range("depolarizing matrix form")
    d, p = params.d, min(params.p, 1.0)
    top = np.sqrt(d * (1 - p)) * maximally_entangled(d).conj().T
    return np.vstack([top, np.sqrt(p / d) * np.eye(d * d)])


def depolarizing_s_matrix(params: DepolarizingParams) -> np.ndarray:
    """Minimal ``S = sqrt(p/d) I + sqrt(d) (sqrt(1 - p(d^2-1)/d^2) - sqrt(p)/d) |Omega><Omega|``."""
    d, p = params.d, params.p
    radicand = max(0.0, 1 - p * (d * d - 1) / (d * d))
    omega = maximally_entangled(d)
    coef = np.sqrt(d) * (np.sqrt(radicand) - np.sqrt(p) / d)
    return np.sqrt(p / d) * np.eye(d * d) + coef * (omega @ omega.conj().T)


def depolarizing_complement(params: DepolarizingParams, rho, form: str = "minimal") -> np.ndarray:
    """Complementary output in ``matrix`` ((d^2+1)-dim) or ``minimal`` (d^2-dim) form.

    In matrix form entry ``(0, 1 + i*d + j)`` is ``sqrt(p(1-p)/d) rho_{ji}``
    and the lower block is ``(p/d) rho (x) I``.
    """
    d = params.d
    rho = check_square(rho, d, "rho")
    if form == "matrix":
        params.require_kraus_range("depolarizing matrix form")
        p = min(params.p, 1.0)
        n = d * d
        out = np.zeros((n + 1, n + 1), dtype=np.complex128)
        out[0, 0] = (1 - p) * np.trace(rho)
        off = np.sqrt(p * (1 - p) / d)
        row = rho.T.reshape(-1)  # index i*d + j -> rho[j, i]
        out[0, 1:] = off * row
        out[1:, 0] = off * rho.reshape(-1)  # rho_{ij} at (i, j)
        out[1:, 1:] = (p / d) * tensor_product(rho, np.eye(d))
        return out
    if form == "minimal":
        return conjugate_ancilla(depolarizing_s_matrix(params), rho, d)
    raise ValueError(f"form must be 'matrix' or 'minimal', got {form!r}")


def depolarizing_complement_kraus(params: DepolarizingParams) -> KrausSet:
    return kraus_from_dual_rep(depolarizing_s_matrix(params), params.d, params.d)


def depolarizing_channel_kraus(params: DepolarizingParams) -> KrausSet:
    """Kraus set valid on the whole parameter range.

    For ``p > 1`` the relabeled set does not exist over the reals, so a
    minimal set is read off the Choi matrix of the direct action instead.
    """
    if params.kraus_constructible:
        return depolarizing_kraus(params)
    d = params.d
    choi = choi_from_action(lambda r: depolarizing_apply(params, r), d, d)
    return kraus_from_choi(choi, d, d)


# --- transpose-depolarizing -----------------------------------------------


def td_apply(params: TransposeDepolarizingParams, rho) -> np.ndarray:
    d, t = params.d, params.t
    rho = check_square(rho, d, "rho")
    return t * rho.T + (1 - t) * np.trace(rho) * np.eye(d) / d


def td_branch_apply(d: int, sign: int, rho) -> np.ndarray:
    """Extreme channels ``(I Tr rho +/- rho^T) / (d +/- 1)``."""
    rho = check_square(rho, d, "rho")
    return (np.trace(rho) * np.eye(d) + sign * rho.T) / (d + sign)


def _vpm(d: int, sign: int, i: int, j: int) -> np.ndarray:
    v = np.zeros((d, d), dtype=np.complex128)
    v[i, j] += 1
    v[j, i] += sign
    return v / np.sqrt(2 * (d + sign))


def td_kraus(params: TransposeDepolarizingParams, drop_zero: bool = False) -> KrausSet:
    """``2 d^2`` operators: ``sqrt(c+) V+_{ji}`` at ``i*d + j``, then ``sqrt(c-) V-_{ji}`` at ``d^2 + i*d + j``.

    With this ordering the environment output equals the block form
    ``T (rho (x) I) T^H`` entrywise.
    """
    d = params.d
    cp, cm = np.sqrt(params.c_plus), np.sqrt(params.c_minus)
    ops = np.zeros((2 * d * d, d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            ops[i * d + j] = cp * _vpm(d, +1, j, i)
            ops[d * d + i * d + j] = cm * _vpm(d, -1, j, i)
    if drop_zero:
        keep = np.array([np.any(op != 0) for op in ops])
        ops = ops[keep]
    return KrausSet(ops)


def td_t_matrix(params: TransposeDepolarizingParams) -> np.ndarray:
    """Block operator ``T`` (``2d^2 x d^2``) stacking ``a+ (I+F)`` over ``a- (I-F)``."""
    d = params.d
    eye, f = np.eye(d * d), flip_operator(d)
    return np.vstack([params.a_plus * (eye + f), params.a_minus * (eye - f)])


def td_s_matrix(params: TransposeDepolarizingParams) -> np.ndarray:
    d = params.d
    ap, am = params.a_plus, params.a_minus
    return (ap + am) * np.eye(d * d) + (ap - am) * flip_operator(d)


def td_complement(params: TransposeDepolarizingParams, rho, form: str = "minimal") -> np.ndarray:
    d = params.d
    rho = check_square(rho, d, "rho")
    if form == "blockT":
        return conjugate_ancilla(td_t_matrix(params), rho, d)
    if form == "minimal":
        return conjugate_ancilla(td_s_matrix(params), rho, d)
    raise ValueError(f"form must be 'blockT' or 'minimal', got {form!r}")


def td_complement_kraus(params: TransposeDepolarizingParams) -> KrausSet:
    return kraus_from_dual_rep(td_s_matrix(params), params.d, params.d)


def wh_apply(d: int, rho) -> np.ndarray:
    return td_branch_apply(d, -1, rho)


def wh_complement_apply(d: int, rho) -> np.ndarray:
    """``(I - F)(rho (x) I)(I - F) / (2(d-1))``."""
    g = np.eye(d * d) - flip_operator(d)
    return conjugate_ancilla(g, rho, d) / (2 * (d - 1))


def wh_kraus(d: int) -> KrausSet:
    """Minimal Kraus set ``(|i><j| - |j><i|)/sqrt(d-1)``, ``i < j``, for the WH channel."""
    check_dim(d, 2)
    ops = []
    for i in range(d):
        for j in range(i + 1, d):
            v = np.zeros((d, d), dtype=np.complex128)
            v[i, j], v[j, i] = 1.0, -1.0
            ops.append(v / np.sqrt(d - 1))
    return KrausSet(np.stack(ops))


def wh_complement_kraus(d: int) -> KrausSet:
    return td_complement_kraus(werner_holevo(d))


# --- covariance -----------------------------------------------------------

COVARIANCE_RULES = {
    "dep": "Phi(U rho U^H) = U Phi(rho) U^H",
    "dep_complement": "Phi~(U rho U^H) = (U (x) conj U) Phi~(rho) (U (x) conj U)^H",
    "dep_complement_matrix": "as dep_complement with (1 (+) U (x) conj U) on the (d^2+1)-dim form",
    "td": "Phi(U rho U^H) = conj U Phi(rho) conj U^H",
    "td_complement": "Phi~(U rho U^H) = (U (x) U) Phi~(rho) (U (x) U)^H",
}


def covariance_residual(channel_tag: str, params, u, rho) -> float:
    """Max-entry gap between the two sides of a covariance identity.

    ``channel_tag`` selects one of :data:`COVARIANCE_RULES`.
    """
    u = check_unitary(u)
    rho = check_square(rho, params.d, "rho")
    moved = u @ rho @ u.conj().T
    if channel_tag == "dep":
        lhs = depolarizing_apply(params, moved)
        w = u
        rhs = w @ depolarizing_apply(params, rho) @ w.conj().T
    elif channel_tag == "dep_complement":
        lhs = depolarizing_complement(params, moved, "minimal")
        w = np.kron(u, u.conj())
        rhs = w @ depolarizing_complement(params, rho, "minimal") @ w.conj().T
    elif channel_tag == "dep_complement_matrix":
        lhs = depolarizing_complement(params, moved, "matrix")
        n = params.d**2
        w = np.zeros((n + 1, n + 1), dtype=np.complex128)
        w[0, 0] = 1
        w[1:, 1:] = np.kron(u, u.conj())
        rhs = w @ depolarizing_complement(params, rho, "matrix") @ w.conj().T
    elif channel_tag == "td":
        lhs = td_apply(params, moved)
        w = u.conj()
        rhs = w @ td_apply(params, rho) @ w.conj().T
    elif channel_tag == "td_complement":
        lhs = td_complement(params, moved, "minimal")
        w = np.kron(u, u)
        rhs = w @ td_complement(params, rho, "minimal") @ w.conj().T
    else:
        raise KeyError(f"unknown covariance tag {channel_tag!r}; expected one of {sorted(COVARIANCE_RULES)}")
    return float(np.max(np.abs(lhs - rhs)))



# --- tagged families ------------------------------------------------------

FAMILIES = ("dep", "td", "wh", "id", "kraus")
COMPLEMENT_FORMS = {"dep": ("minimal", "matrix"), "td": ("minimal", "blockT"), "wh": ("minimal", "blockT")}


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """A channel family with its parameters, resolvable to Kraus sets and actions.

    ``family`` is one of ``dep`` (needs ``p``), ``td`` (needs ``t``), ``wh``,
    ``id`` or ``kraus`` (needs ``operators``).
    """

    family: str
    d: int | None = None
    p: float | None = None
    t: float | None = None
    operators: KrausSet | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterRangeError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "kraus":
            if not isinstance(self.operators, KrausSet):
                raise ParameterRangeError("family 'kraus' needs a KrausSet")
            object.__setattr__(self, "d", self.operators.d_A)
            return
        if self.d is None:
            raise ParameterRangeError(f"family {self.family!r} needs d")
        check_dim(self.d, 1 if self.family == "id" else 2)
        if self.family == "dep":
            if self.p is None:
                raise ParameterRangeError("family 'dep' needs p")
            DepolarizingParams(self.d, float(self.p))
        if self.family == "td":
            if self.t is None:
                raise ParameterRangeError("family 'td' needs t")
            TransposeDepolarizingParams(self.d, float(self.t))

    @property
    def params(self):
        if self.family == "dep":
            return DepolarizingParams(self.d, float(self.p))
        if self.family == "td":
            return TransposeDepolarizingParams(self.d, float(self.t))
        if self.family == "wh":
            return werner_holevo(self.d)
        return None

    def describe(self) -> dict:
        out = {"family": self.family, "d": self.d}
        if self.family == "dep":
            out["p"] = float(self.p)
        elif self.family == "td":
            out["t"] = float(self.t)
        elif self.family == "kraus":
            out["d_out"] = self.operators.d_B
            out["n_kraus"] = self.operators.d_C
        return out

    def kraus(self) -> KrausSet:
        """Kraus set of the channel itself (relabeled, non-minimal where the family has one)."""
        if self.family == "dep":
            return depolarizing_channel_kraus(self.params)
        if self.family == "td":
            return td_kraus(self.params)
        if self.family == "wh":
            return td_kraus(self.params)
        if self.family == "id":
            return KrausSet(np.eye(self.d, dtype=np.complex128)[None])
        return self.operators

    def minimal_kraus(self) -> KrausSet:
        if self.family == "wh":
            return wh_kraus(self.d)
        return _ch.minimal_kraus(self.kraus())

    def apply(self, rho) -> np.ndarray:
        if self.family == "dep":
            return depolarizing_apply(self.params, rho)
        if self.family in ("td", "wh"):
            return td_apply(self.params, rho)
        return _ch.apply(self.kraus(), rho)

    def s_matrix(self) -> np.ndarray | None:
        """Minimal dual-representation operator of the complement, when the family has one."""
        if self.family == "dep":
            return depolarizing_s_matrix(self.params)
        if self.family in ("td", "wh"):
            return td_s_matrix(self.params)
        return None

    def t_matrix(self) -> np.ndarray | None:
        if self.family == "dep":
            return depolarizing_t_matrix(self.params)
        if self.family in ("td", "wh"):
            return td_t_matrix(self.params)
        return None

    def complement_apply(self, rho, form: str = "minimal") -> np.ndarray:
        if self.family == "dep":
            return depolarizing_complement(self.params, rho, form)
        if self.family in ("td", "wh"):
            return td_complement(self.params, rho, form)
        if form != "kraus":
            raise ParameterRangeError(f"family {self.family!r} has only the 'kraus' complement form")
        return _ch.complement_apply(self.kraus(), rho)

    def complement_kraus(self) -> KrausSet:
        """Kraus set of the minimal complementary channel."""
        s = self.s_matrix()
        if s is not None:
            return kraus_from_dual_rep(s, self.d, self.d)
        return _ch.complement_kraus(_ch.minimal_kraus(self.kraus()))
