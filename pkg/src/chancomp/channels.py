"""Generic CP-map machinery built on Kraus operators.

A map ``Phi(rho) = sum_j V_j rho V_j^H`` is stored as a :class:`KrausSet`.
The environment basis is the computational basis in operator order, so
reordering the operators conjugates the complementary output by a
permutation and leaves its spectrum unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError
from .linalg import maximally_entangled, partial_trace, psd_sqrt, tensor_product
from .validation import as_matrix, check_square

TP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered Kraus operators of shape ``(d_B, d_A)``, stacked on axis 0."""

    operators: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=np.complex128)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] == 0:
            raise DimensionError(f"Kraus operators must stack to (d_C, d_B, d_A), got {ops.shape}")
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @classmethod
    def from_list(cls, ops) -> "KrausSet":
        mats = [as_matrix(k) for k in ops]
        shapes = {m.shape for m in mats}
        if len(shapes) != 1:
            raise DimensionError(f"Kraus operators have mixed shapes {sorted(shapes)}")
        return cls(np.stack(mats))

    @property
    def d_A(self) -> int:
        return self.operators.shape[2]

    @property
    def d_B(self) -> int:
        return self.operators.shape[1]

    @property
    def d_C(self) -> int:
        return self.operators.shape[0]

    @property
    def d_in(self) -> int:
        return self.d_A

    @property
    def d_out(self) -> int:
        return self.d_B

    def __len__(self) -> int:
        return self.d_C

    def __iter__(self):
        return iter(self.operators)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def dual(self, x) -> np.ndarray:
        return dual_apply(self, x)

    @property
    def is_trace_preserving(self) -> bool:
        return validate(self, "tp") <= TP_TOL

    @property
    def is_unital(self) -> bool:
        return validate(self, "unital") <= TP_TOL

    def __repr__(self) -> str:
        return f"KrausSet(d_A={self.d_A}, d_B={self.d_B}, d_C={self.d_C})"


@dataclass(frozen=True, eq=False)
class StinespringIsometry:
    """``V : H_A -> H_B (x) H_C`` with B the most significant factor."""

    v: np.ndarray
    d_A: int
    d_B: int
    d_C: int

    def isometry_residual(self) -> float:
        return float(np.max(np.abs(self.v.conj().T @ self.v - np.eye(self.d_A))))

    def kraus(self) -> KrausSet:
        # <e_j^C| V, for each j
        t = self.v.reshape(self.d_B, self.d_C, self.d_A)
        return KrausSet(np.transpose(t, (1, 0, 2)))


@dataclass(frozen=True, eq=False)
class DualRepOperator:
    """``S_C : H_A (x) H_B -> H_C`` with ``Phi~(rho) = S_C (rho (x) I_B) S_C^H``."""

    s: np.ndarray
    d_A: int
    d_B: int

    @property
    def d_C(self) -> int:
        return self.s.shape[0]

    def __call__(self, rho) -> np.ndarray:
        return conjugate_ancilla(self.s, rho, self.d_B)

    def trace_condition_residual(self) -> float:
        """max|Tr_B S^H S - I_A|; zero for a channel."""
        red = partial_trace(self.s.conj().T @ self.s, (self.d_A, self.d_B), keep="first")
        return float(np.max(np.abs(red - np.eye(self.d_A))))


def validate(kraus: KrausSet, mode: str = "tp") -> float:
    """Max-entry residual of ``sum V^H V - I`` (``tp``) or ``sum V V^H - I`` (``unital``)."""
    ops = kraus.operators
    if mode == "tp":
        acc = np.einsum("kba,kbc->ac", ops.conj(), ops)
        return float(np.max(np.abs(acc - np.eye(kraus.d_A))))
    if mode == "unital":
        acc = np.einsum("kab,kcb->ac", ops, ops.conj())
        return float(np.max(np.abs(acc - np.eye(kraus.d_B))))
    raise ValueError(f"mode must be 'tp' or 'unital', got {mode!r}")


def apply(kraus: KrausSet, rho) -> np.ndarray:
    rho = check_square(rho, kraus.d_A, "rho")
    ops = kraus.operators
    return np.sum(ops @ rho @ np.conj(np.swapaxes(ops, 1, 2)), axis=0)


def dual_apply(kraus: KrausSet, x) -> np.ndarray:
    """Heisenberg-picture map ``X -> sum V^H X V``."""
    x = check_square(x, kraus.d_B, "x")
    ops = kraus.operators
    return np.sum(np.conj(np.swapaxes(ops, 1, 2)) @ x @ ops, axis=0)


def stinespring_from_kraus(kraus: KrausSet) -> StinespringIsometry:
    """``V = sum_j V_j (x) |e_j^C>``."""
    v = np.transpose(kraus.operators, (1, 0, 2)).reshape(kraus.d_B * kraus.d_C, kraus.d_A)
    return StinespringIsometry(v.copy(), kraus.d_A, kraus.d_B, kraus.d_C)


def complement_apply(kraus: KrausSet, rho) -> np.ndarray:
    """Environment output ``[Tr V_j rho V_k^H]_{jk}``."""
    rho = check_square(rho, kraus.d_A, "rho")
    ops = kraus.operators
    return np.einsum("jab,bc,kac->jk", ops, rho, ops.conj())


def complement_kraus(kraus: KrausSet) -> KrausSet:
    """Kraus set of the complementary map: ``(W_k)_{j,a} = (V_j)_{k,a}``."""
    return KrausSet(np.transpose(kraus.operators, (1, 0, 2)).copy())


def dual_rep_operator(kraus: KrausSet) -> DualRepOperator:
    """``S_C = sum_k W_k (x) <e_k^B|`` built from the complementary Kraus set."""
    w = complement_kraus(kraus).operators  # (d_B, d_C, d_A)
    # S[c, a*d_B + k] = W_k[c, a]
    s = np.transpose(w, (1, 2, 0)).reshape(kraus.d_C, kraus.d_A * kraus.d_B)
    return DualRepOperator(s.copy(), kraus.d_A, kraus.d_B)


def dual_rep_from_stinespring(iso: StinespringIsometry) -> DualRepOperator:
    """``S_C = sqrt(d_B) <Omega^BB| (V (x) I_B)``, contracting the two B factors."""
    d_A, d_B, d_C = iso.d_A, iso.d_B, iso.d_C
    big = tensor_product(iso.v, np.eye(d_B))  # (B C B) x (A B)
    omega = maximally_entangled(d_B).reshape(d_B, d_B)
    t = big.reshape(d_B, d_C, d_B, d_A * d_B)
    s = np.sqrt(d_B) * np.einsum("ij,icjm->cm", omega.conj(), t)
    return DualRepOperator(s, d_A, d_B)


def stinespring_from_dual_rep(rep: DualRepOperator) -> StinespringIsometry:
    """``V = sqrt(d_B) (I_B (x) S_C) |Omega^BB>``, the B-side of Omega feeding S_C's B input."""
    d_A, d_B, d_C = rep.d_A, rep.d_B, rep.d_C
    omega = maximally_entangled(d_B).reshape(d_B, d_B)
    s = rep.s.reshape(d_C, d_A, d_B)
    v = np.sqrt(d_B) * np.einsum("ij,caj->ica", omega, s)
    return StinespringIsometry(v.reshape(d_B * d_C, d_A), d_A, d_B, d_C)


def conjugate_ancilla(t, rho, d_anc: int) -> np.ndarray:
    """``T (rho (x) I) T^H`` for ``T`` acting on ``H_A (x) H_anc``."""
    t = as_matrix(t, "t")
    d_A = t.shape[1] // d_anc
    if d_A * d_anc != t.shape[1]:
        raise DimensionError(f"operator with {t.shape[1]} columns does not factor with ancilla {d_anc}")
    rho = check_square(rho, d_A, "rho")
    return t @ tensor_product(rho, np.eye(d_anc)) @ t.conj().T


def kraus_from_dual_rep(s, d_A: int, d_anc: int) -> KrausSet:
    """Kraus operators ``S (I_A (x) |k>)`` of ``rho -> S (rho (x) I) S^H``."""
    s = as_matrix(s, "s")
    if s.shape[1] != d_A * d_anc:
        raise DimensionError(f"operator with {s.shape[1]} columns does not match {d_A}x{d_anc}")
    t = s.reshape(s.shape[0], d_A, d_anc)
    return KrausSet(np.transpose(t, (2, 0, 1)).copy())


def choi_matrix(kraus: KrausSet) -> np.ndarray:
    """``sum_ij |i><j| (x) Phi(|i><j|)`` on ``H_A (x) H_B``."""
    ops = kraus.operators
    # vec of each operator in (a, b) order: |i> (x) V|i>
    vecs = np.transpose(ops, (0, 2, 1)).reshape(kraus.d_C, kraus.d_A * kraus.d_B)
    return vecs.T @ vecs.conj()


def choi_rank(kraus: KrausSet, tol: float = 1e-10) -> int:
    w = np.linalg.eigvalsh(choi_matrix(kraus))
    scale = max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(w > tol * scale))


def kraus_from_choi(choi, d_A: int, d_B: int, tol: float = 1e-12) -> KrausSet:
    """Minimal Kraus set from the eigendecomposition of a PSD Choi matrix."""
    choi = check_square(choi, d_A * d_B, "choi")
    w, v = np.linalg.eigh((choi + choi.conj().T) / 2)
    keep = w > tol * max(1.0, float(np.max(np.abs(w))))
    if not np.any(keep):
        return KrausSet(np.zeros((1, d_B, d_A), dtype=np.complex128))
    vecs = v[:, keep] * np.sqrt(w[keep])
    ops = vecs.T.reshape(-1, d_A, d_B).transpose(0, 2, 1)
    return KrausSet(ops.copy())


def minimal_kraus(kraus: KrausSet, tol: float = 1e-12) -> KrausSet:
    return kraus_from_choi(choi_matrix(kraus), kraus.d_A, kraus.d_B, tol)


def minimalize(t, dims: tuple[int, int]) -> np.ndarray:
    """Minimal dual representation ``S = sqrt(T^H T)`` of ``rho -> T (rho (x) I) T^H``.

    ``T = U S`` with ``U`` an isometry on the range of ``S``, so the minimal
    output ``S (rho (x) I) S^H`` is the non-minimal one conjugated by ``U^H``:
    the two agree up to an isometry on the output, not entrywise.
    """
    t = as_matrix(t, "t")
    d_A, d_B = (int(x) for x in dims)
    if t.shape[1] != d_A * d_B:
        raise DimensionError(f"T has {t.shape[1]} columns, expected d_A*d_B = {d_A * d_B}")
    return psd_sqrt(t.conj().T @ t)


def tensor_kraus(k1: KrausSet, k2: KrausSet) -> KrausSet:
    """Kraus set of ``Phi_1 (x) Phi_2`` (pairwise Kronecker products)."""
    a, b = k1.operators, k2.operators
    ops = np.einsum("iab,jcd->ijacbd", a, b).reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
    )
    return KrausSet(ops)


def identity_channel(d: int) -> KrausSet:
    return KrausSet(np.eye(d, dtype=np.complex128)[None])


def choi_from_action(action, d_A: int, d_B: int) -> np.ndarray:
    """Choi matrix of an arbitrary linear map given as a callable on ``d_A x d_A`` arrays."""
    choi = np.zeros((d_A * d_B, d_A * d_B), dtype=np.complex128)
    for i in range(d_A):
        for j in range(d_A):
            e = np.zeros((d_A, d_A), dtype=np.complex128)
            e[i, j] = 1.0
            choi[i * d_B:(i + 1) * d_B, j * d_B:(j + 1) * d_B] = action(e)
    return choi
