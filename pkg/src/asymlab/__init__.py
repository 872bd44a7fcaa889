"""Computational toolkit for polyhedral asymmetric norms and quasi-metric spaces."""
import sys

__version__ = "0.1.0"

from .covering import (
    CoverCertificate,
    EpsilonNet,
    EpsNetCertificate,
    diameter,
    exact_cover,
    exact_net,
    greedy_net,
    is_precompact_sample,
    is_totally_bounded_sample,
    min_cover_size,
    min_net_size,
)
from .duality import (
    DualSpace,
    PolarBall,
    WFlatNeighborhood,
    dual_continuity_radius,
    dual_operator,
    dual_qdist,
    func_norm,
    polar,
    schauder_certificate,
    wflat_contains,
    wflat_pullback,
)
from .errors import (
    AsymlabError,
    DimensionMismatch,
    InvalidInstance,
    PreconditionFailed,
    UnresolvedReference,
)
from .norms import PolyAsymNorm, ball_support, sample_ball, validate_norm, variant
from .operators import (
    LinOperator,
    combine_nets,
    is_bounded,
    is_compact,
    limit_of_compacts_net,
    norm_report,
    op_norm,
    operator_net,
    operator_qdist,
    saturation_oracle,
    sym_op_norm,
)
from .quasimetric import (
    Entourage,
    InducedQuasiMetric,
    TabularQuasiMetric,
    ball,
    check_qu2,
)
from .sequences import SequencePrefix, check_chain, classify, converges_to

__all__ = [name for name, obj in list(globals().items())
           if not name.startswith("_") and not isinstance(obj, type(sys))]
