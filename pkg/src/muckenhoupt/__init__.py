"""Muckenhoupt weights and Hardy-Littlewood maximal functions on finite metric measure spaces."""

from .space import (
    Ball,
    BallFamily,
    FiniteMetricMeasureSpace,
    InvalidSpaceError,
    critical_radii,
    doubling_constant,
    enumerate_distinct_balls,
    from_points,
    generate,
    validate_metric,
)
from .weights import (
    ap_constant,
    ap_lower_bound_witness,
    dual_weight,
    lognormal_weight,
    power_weight,
    weight_doubling_check,
    weight_measure,
    weighted_holder_check,
)
from .maxop import lerner_pointwise_check, maximal, maximal_weighted, norm_ratio
from .whitney import check_truncation_bounds, level_set, truncate, whitney_cover
from .selfimprove import (
    SelfImprovementConfig,
    epsilon_from_constants,
    epsilon_search,
    estar_constant,
    layer_cake_identity_check,
    self_improve,
    standard_family,
)
from . import oracle

__version__ = "0.1.0"
