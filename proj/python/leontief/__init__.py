"""Leontief, residual-Leontief and CES production surfaces with stochastic demand."""

from ._leontief import (
    ClampPolicy,
    CesParams,
    DemandModel,
    ExpectationEstimate,
    ExpectationMethod,
    GridSpec,
    IsoquantTrace,
    LeontiefError,
    Point,
    RtsClassification,
    ScaleProfile,
    Support,
    TechnologyMatrix,
    TraceMethod,
    amh_cdf,
    amh_density,
    amh_kendall_tau,
    ces_eval,
    classify_rts,
    expected_output_closed_form,
    expected_output_mc,
    expected_output_quadrature,
    hausdorff_distance,
    leontief_eval,
    residual_leontief,
    sample_demand,
    scale_profile,
    trace_isoquant_analytic,
    trace_isoquant_grid,
    trace_isoquant_rayscan,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
