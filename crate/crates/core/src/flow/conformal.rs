//! The conformal flow `u_t = e^{-2u}(u_rr + u_r/r)` on the punctured disc,
//! used for the smoothening experiment: truncate the cone's conformal
//! factor with a smoothed minimum, flow the truncations, and compare the
//! family against the logarithmic upper barrier.
//!
//! Two steppers are provided. The explicit one is the plain scheme with the
//! stability-limited step. The truncation family needs long horizons on
//! log grids whose inner cells make the explicit step collapse by several
//! orders of magnitude, so a coefficient-frozen backward Euler stepper with
//! a shared time schedule is used there; its update matrix is an M-matrix,
//! which keeps the family ordering intact to roundoff.

use super::FlowError;
use crate::fd;
use crate::geom::ConformalProfile;

/// Smoothed minimum profile ψ: `ψ(s) = s` for `s ≤ -1`, `ψ(s) = 0` for
/// `s ≥ 1`, and the unique quintic (degenerating to a quartic) on `[-1, 1]`
/// matching value, slope and curvature at both ends; `ψ' ≥ 0`, `ψ'' ≤ 0`.
pub fn smoothed_min(s: f64) -> f64 {
    if s <= -1.0 {
        s
    } else if s >= 1.0 {
        0.0
    } else {
        let t = 0.5 * (s + 1.0);
        -1.0 + 2.0 * t - 2.0 * t.powi(3) + t.powi(4)
    }
}

/// One time slice of the conformal flow on a fixed log-spaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFlowState {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub time: f64,
    /// Truncation level, if this state came from `truncate_cone`.
    pub k_level: Option<f64>,
}

impl SmoothFlowState {
    pub fn sup_u(&self) -> f64 {
        self.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Log-spaced grid on `[r_min, r_max]`.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Truncate a cone's conformal factor at level `k` with the smoothed
/// minimum: `u_k = ψ(u₀ - k) + k`.
pub fn truncate_cone(c: &ConformalProfile, k: f64, grid: &[f64]) -> SmoothFlowState {
    let u = grid.iter().map(|&r| smoothed_min(c.u(r) - k) + k).collect();
    SmoothFlowState {
        grid: grid.to_vec(),
        u,
        time: 0.0,
        k_level: Some(k),
    }
}

/// Outer boundary treatment at `r = r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterBc {
    /// Hold the initial value.
    Frozen,
    /// Prescribe `u(r_max, t) = u(r_max, 0) + offset(t)` (used to drive the
    /// boundary along a known exact solution).
    Offset,
}

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Forward Euler at the stability-limited step (`Δt = cfl·bound`).
    Explicit,
    /// Coefficient-frozen backward Euler with the deterministic schedule
    /// `Δt = max(dt_init, dt_over_t · t)`, shared across family runs.
    SemiImplicit { dt_init: f64, dt_over_t: f64 },
}

#[derive(Debug, Clone)]
pub struct ConformalControl {
    /// Explicit stability fraction; must lie in (0, 1/2].
    pub cfl: f64,
    pub outer: OuterBc,
    /// Record the state at these times (sorted ascending).
    pub sample_times: Vec<f64>,
    pub scheme: Scheme,
}

impl Default for ConformalControl {
    fn default() -> Self {
        Self {
            cfl: 0.25,
            outer: OuterBc::Frozen,
            sample_times: vec![],
            scheme: Scheme::Explicit,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConformalHistory {
    pub samples: Vec<SmoothFlowState>,
    /// (t, sup u) at every accepted step.
    pub sup_series: Vec<(f64, f64)>,
}

struct Operator {
    cm: Vec<f64>,
    c0: Vec<f64>,
    cp: Vec<f64>,
    d0: f64,
}

impl Operator {
    fn build(grid: &[f64]) -> Self {
        let n = grid.len();
        let mut cm = vec![0.0; n];
        let mut c0 = vec![0.0; n];
        let mut cp = vec![0.0; n];
        for i in 1..n - 1 {
            let w2 = fd::fd_weights(grid[i], &grid[i - 1..i + 2], 2);
            let w1 = fd::fd_weights(grid[i], &grid[i - 1..i + 2], 1);
            cm[i] = w2[0] + w1[0] / grid[i];
            c0[i] = w2[1] + w1[1] / grid[i];
            cp[i] = w2[2] + w1[2] / grid[i];
        }
        Operator {
            cm,
            c0,
            cp,
            d0: grid[1] - grid[0],
        }
    }

    /// `u_rr + u_r/r` with the inner regularity closure `u_r(r₀) = 0`.
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        out[0] = 2.0 * (u[1] - u[0]) / (self.d0 * self.d0);
        for i in 1..n - 1 {
            out[i] = self.cm[i] * u[i - 1] + self.c0[i] * u[i] + self.cp[i] * u[i + 1];
        }
        out[n - 1] = 0.0;
    }
}

/// Solve the tridiagonal system in place (Thomas algorithm).
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

/// Step the conformal flow to `t_end`, sampling at the requested times.
/// `offset` supplies the outer boundary motion for `OuterBc::Offset`.
pub fn run_conformal_flow(
    initial: &SmoothFlowState,
    t_end: f64,
    control: &ConformalControl,
    offset: Option<fn(f64) -> f64>,
) -> Result<ConformalHistory, FlowError> {
    if control.cfl <= 0.0 || control.cfl > 0.5 {
        return Err(FlowError::StabilityViolation(control.cfl));
    }
    let n = initial.grid.len();
    let op = Operator::build(&initial.grid);
    let u_outer0 = *initial.u.last().unwrap();
    let mut state = initial.clone();
    state.time = 0.0;
    let mut history = ConformalHistory {
        samples: Vec::new(),
        sup_series: vec![(0.0, state.sup_u())],
    };
    let mut next_sample = 0_usize;
    let mut lap = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];

    while state.time < t_end - 1e-15 {
        let mut dt = match control.scheme {
            Scheme::Explicit => {
                let mut bound = f64::INFINITY;
                for i in 1..n - 1 {
                    let d = (-2.0 * state.u[i]).exp();
                    bound = bound.min(1.0 / (d * (op.cm[i].abs() + op.cp[i].abs())));
                }
                bound = bound.min(1.0 / ((-2.0 * state.u[0]).exp() * 2.0 / (op.d0 * op.d0)));
                2.0 * control.cfl * bound
            }
            Scheme::SemiImplicit { dt_init, dt_over_t } => dt_init.max(dt_over_t * state.time),
        };
        dt = dt.min(t_end - state.time);
        if let Some(&ts) = control.sample_times.get(next_sample) {
            if state.time < ts {
                dt = dt.min(ts - state.time);
            }
        }

        match control.scheme {
            Scheme::Explicit => {
                op.apply(&state.u, &mut lap);
                for (u, &l) in state.u[..n - 1].iter_mut().zip(&lap[..n - 1]) {
                    *u += dt * (-2.0 * *u).exp() * l;
                }
            }
            Scheme::SemiImplicit { .. } => {
                // (I - Δt D L) u^{new} = u^{old}, with D frozen at u^{old}.
                for i in 1..n - 1 {
                    let d = dt * (-2.0 * state.u[i]).exp();
                    sub[i] = -d * op.cm[i];
                    diag[i] = 1.0 - d * op.c0[i];
                    sup[i] = -d * op.cp[i];
                }
                let d_in = dt * (-2.0 * state.u[0]).exp() * 2.0 / (op.d0 * op.d0);
                sub[0] = 0.0;
                diag[0] = 1.0 + d_in;
                sup[0] = -d_in;
                sub[n - 1] = 0.0;
                diag[n - 1] = 1.0;
                sup[n - 1] = 0.0;
                thomas(&sub, &mut diag, &sup, &mut state.u);
            }
        }
        state.time += dt;
        let last = n - 1;
        state.u[last] = match (control.outer, offset) {
            (OuterBc::Frozen, _) | (OuterBc::Offset, None) => u_outer0,
            (OuterBc::Offset, Some(f)) => u_outer0 + f(state.time),
        };
        history.sup_series.push((state.time, state.sup_u()));
        if let Some(&ts) = control.sample_times.get(next_sample) {
            if state.time >= ts - 1e-13 {
                history.samples.push(state.clone());
                next_sample += 1;
            }
        }
    }
    if control.sample_times.is_empty() {
        history.samples.push(state);
    }
    Ok(history)
}

/// The upper-barrier cap radius `λ̄(t) = (−t e^{−2C} / (4β(β+1)))^{1/(2(β+1))}`
/// (positive radicand for β ∈ (−1, 0)).
pub fn barrier_lambda(t: f64, beta: f64, c: f64) -> Result<f64, FlowError> {
    if !(-1.0 < beta && beta < 0.0) {
        return Err(FlowError::BetaOutOfRange(beta));
    }
    assert!(t > 0.0, "barrier defined for t > 0");
    let radicand = -t * (-2.0 * c).exp() / (4.0 * beta * (beta + 1.0));
    Ok(radicand.powf(1.0 / (2.0 * (beta + 1.0))))
}

/// Barrier decay coefficient `β/(2(β+1))` multiplying `ln t`.
pub fn barrier_log_coefficient(beta: f64) -> f64 {
    beta / (2.0 * (beta + 1.0))
}
