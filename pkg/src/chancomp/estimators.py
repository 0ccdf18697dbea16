"""scikit-learn style wrappers so channels compose with pipelines and grid searches."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .channels import choi_rank, validate
from .exceptions import DimensionError
from .purity import MaxOutputNorm
from .zoo import COMPLEMENT_FORMS, ChannelSpec

__all__ = ["ChannelTransformer", "MaxOutputNorm"]


class ChannelTransformer(TransformerMixin, BaseEstimator):
    """Apply a channel (or its complement) to a batch of density matrices.

    Parameters
    ----------
    family : {"dep", "td", "wh", "id"}
    d : int
    p : float, optional
        Depolarizing parameter.
    t : float, optional
        Transpose-depolarizing parameter.
    complement : bool
        Output the environment instead of the channel output.
    form : str
        Complement representation: ``minimal``, ``matrix`` (dep) or ``blockT`` (td, wh).

    ``transform`` accepts an array of shape ``(n, d, d)`` or a single
    ``(d, d)`` matrix; the returned array has the same leading layout.
    """

    def __init__(self, family="wh", d=3, p=None, t=None, complement=False, form="minimal"):
        self.family = family
        self.d = d
        self.p = p
        self.t = t
        self.complement = complement
        self.form = form

    def fit(self, X=None, y=None):
        spec = ChannelSpec(self.family, self.d, p=self.p, t=self.t)
        if self.complement and self.family in COMPLEMENT_FORMS:
            if self.form not in COMPLEMENT_FORMS[self.family]:
                raise ValueError(f"form must be one of {COMPLEMENT_FORMS[self.family]} for family {self.family!r}")
            if self.form == "matrix":
                spec.params.require_kraus_range("depolarizing matrix form")
        self.spec_ = spec
        self.kraus_ = spec.complement_kraus() if self.complement else spec.minimal_kraus()
        self.tp_residual_ = validate(self.kraus_, "tp")
        self.choi_rank_ = choi_rank(self.kraus_)
        return self

    def _one(self, rho):
        if self.complement:
            form = self.form if self.family in COMPLEMENT_FORMS else "kraus"
            return self.spec_.complement_apply(rho, form)
        return self.spec_.apply(rho)

    def transform(self, X):
        check_is_fitted(self, "spec_")
        arr = np.asarray(X, dtype=np.complex128)
        d = self.spec_.d
        if arr.ndim == 2:
            return self._one(arr)
        if arr.ndim != 3 or arr.shape[1:] != (d, d):
            raise DimensionError(f"expected shape (n, {d}, {d}) or ({d}, {d}), got {arr.shape}")
        return np.stack([self._one(r) for r in arr])
