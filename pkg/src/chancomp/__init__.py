"""Complementary quantum channels, minimal Kraus representations and output purity."""

from .channels import (
    DualRepOperator,
    KrausSet,
    StinespringIsometry,
    apply,
    choi_matrix,
    choi_rank,
    complement_apply,
    complement_kraus,
    dual_apply,
    dual_rep_operator,
    minimalize,
    stinespring_from_kraus,
    tensor_kraus,
    validate,
)
from .estimators import ChannelTransformer, MaxOutputNorm
from .linalg import (
    HermitianSpectrum,
    SpectrumReport,
    flip_operator,
    hermitian_eig,
    maximally_entangled,
    partial_trace,
    polar_decompose,
    psd_sqrt,
    schatten_norm,
    tensor_product,
)
from .product import SchmidtVector, ViolationScanResult, omega_me_spectrum, violation_scan
from .purity import PurityResult, PuritySearchConfig, multiplicativity_report, nu_p, nu_p_product, renyi_entropy
from .zoo import ChannelSpec, DepolarizingParams, TransposeDepolarizingParams

__version__ = "0.1.0"
