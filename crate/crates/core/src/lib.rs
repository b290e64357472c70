//! Numerical laboratory for gradient Ricci solitons and Ricci flows on
//! rotationally symmetric smooth and cone surfaces, plus the asymptotically
//! cusped 3D expanding soliton on ℝ×T².
//!
//! The crate is organized around the reduced planar soliton system
//! (`soliton`), radial and conformal cone geometry (`geom`), the two-angle
//! football boundary-value problem (`football`), the angle-preserving and
//! smoothening flows (`flow`), and the 3D warped-product soliton (`cusp`).
//! Everything is deterministic: no randomness, no time-dependent state.

pub mod cusp;
pub mod fd;
pub mod flow;
pub mod football;
pub mod geom;
pub mod io;
pub mod ode;
pub mod soliton;

pub use cusp::{asymptotics_check, build_metric, cusp_rhs, linearize, shoot_separatrix};
pub use flow::{
    angle_drift, barrier_lambda, run_conformal_flow, run_polar_flow, soliton_defect, truncate_cone,
    FlowState, SmoothFlowState,
};
pub use football::{positive_roots, psi, solve_angles, verify_orbit, FootballSolution};
pub use geom::{
    canonical_cone_metric, cone_angles, conformal_to_polar, conic_euler, curvature, embed_profile,
    gauss_bonnet, troyanov_admissible, ConformalProfile, ConicEuler, RadialProfile,
};
pub use soliton::{
    classify, first_integral, integrate, phase_portrait, potential_along, rhs, steady_closed_form,
    SolitonFamily, SolitonSign, SolitonSpec, Trajectory,
};
