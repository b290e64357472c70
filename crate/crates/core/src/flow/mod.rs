//! Ricci-flow evolution of radial metrics: the angle-preserving flow in
//! geodesic polar coordinates, and the conformal smoothening flow for
//! truncated cones.

mod conformal;
mod polar;

pub use conformal::{
    barrier_lambda, barrier_log_coefficient, log_grid, run_conformal_flow, smoothed_min,
    truncate_cone, ConformalControl, ConformalHistory, OuterBc, Scheme, SmoothFlowState,
};
pub use polar::{
    angle_drift, defect_monotonicity_series, normalized_polar_flow_rhs, polar_flow_rhs,
    run_polar_flow, soliton_defect, DiagnosticsRow, FlowHistory, FlowState, StepControl,
    Termination,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("profile collapsed: h <= 0 at interior index {0}")]
    ProfileCollapsed(usize),
    #[error("time step policy violates explicit stability (cfl = {0}, limit 0.5)")]
    StabilityViolation(f64),
    #[error("state is not a closed surface and no outer condition applies")]
    NotClosed,
    #[error("cone exponent beta = {0} outside (-1, 0)")]
    BetaOutOfRange(f64),
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
}
