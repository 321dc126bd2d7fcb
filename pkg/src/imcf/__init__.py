"""Inverse mean curvature flow of graph hypersurfaces in warped cylinders.

A desk-scale simulator and verification harness: warping-profile
construction and admissibility checks, ambient and graph geometry, explicit
time integration of the scalar flow du/dt = v/H, exact round reference
solutions, and decay-rate diagnostics for the monitored quantities.
"""

__version__ = "0.1.0"

from .diagnostics import (
    DecayFit,
    SharpnessResult,
    TimeSeriesRecord,
    fit_decay,
    record,
    series_from_run,
    sharpness_experiment,
)
from .errors import DomainExit, FitUndefined, MeanConvexityLost, ProfileError
from .flow import (
    FlowConfig,
    RunResult,
    adaptive_dt,
    evolution_residual,
    rhs,
    run,
    step,
)
from .geometry import (
    AmbientCurvature,
    ambient_curvature,
    barrier,
    barrier_exit_time,
    barrier_ratio_bound,
    rescaling_integrability,
    slice_geometry,
)
from .profiles import (
    AssumptionReport,
    ProfileSpec,
    WarpingProfile,
    build_profile,
    check_assumptions,
    invert_theta,
    theta_bar,
)
from .surface import (
    GraphState,
    ShapeData,
    SphereGrid,
    derivatives,
    legendre_state,
    make_initial,
    off_center_euclidean_sphere,
    off_center_hyperbolic_sphere,
    round_state,
    shape_operator,
    shape_operator_alt,
    state_from_csv,
    umbilicity_deficit,
)

__all__ = [
    "__version__",
    "AmbientCurvature",
    "AssumptionReport",
    "DecayFit",
    "DomainExit",
    "FitUndefined",
    "FlowConfig",
    "GraphState",
    "MeanConvexityLost",
    "ProfileError",
    "ProfileSpec",
    "RunResult",
    "ShapeData",
    "SharpnessResult",
    "SphereGrid",
    "TimeSeriesRecord",
    "WarpingProfile",
    "adaptive_dt",
    "ambient_curvature",
    "barrier",
    "barrier_exit_time",
    "barrier_ratio_bound",
    "build_profile",
    "check_assumptions",
    "derivatives",
    "evolution_residual",
    "fit_decay",
    "invert_theta",
    "legendre_state",
    "make_initial",
    "off_center_euclidean_sphere",
    "off_center_hyperbolic_sphere",
    "record",
    "rescaling_integrability",
    "rhs",
    "round_state",
    "run",
    "series_from_run",
    "shape_operator",
    "shape_operator_alt",
    "sharpness_experiment",
    "slice_geometry",
    "state_from_csv",
    "step",
    "theta_bar",
    "umbilicity_deficit",
]
