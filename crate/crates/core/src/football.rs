//! Two-angle boundary-value problem for compact shrinking solitons.
//!
//! Crossing slopes of a closed orbit are tied to the two positive roots of
//! `|y| = k e^{y-1}`: with `y₁ = 1-p ∈ (0,1)` and `y₂ = 1+q ∈ (1,∞)` the
//! cone angles are `α₁ = πp/a` and `α₂ = πq/a`, so the ratio `α₁/α₂ = p/q`
//! determines `k` (the map Ψ below is injective) and the scale fixes `a`.

use crate::ode::OdeError;
use crate::soliton::{
    first_integral, integrate_with, IntegrateOptions, SolitonError, SolitonSign, SolitonSpec,
    Trajectory,
};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FootballError {
    #[error("roots merge at y = 1 for k = {0} >= 1 (line tangent to the exponential)")]
    DegenerateTangency(f64),
    #[error("cone angles must be positive, got ({0}, {1})")]
    NonPositiveAngles(f64, f64),
    #[error("angle ratio {0:.3e} too extreme to resolve k = Ψ⁻¹ in f64")]
    RatioUnresolvable(f64),
    #[error("orbit closure residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ClosureResidualTooLarge { residual: f64, tol: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
}

/// A solved two-angle boundary-value problem.
#[derive(Debug, Clone)]
pub struct FootballSolution {
    /// Cone angles in radians, `alpha1 <= alpha2`.
    pub alpha1: f64,
    pub alpha2: f64,
    pub k: f64,
    pub p: f64,
    pub q: f64,
    /// Gradient constant; 0 is the constant-curvature sentinel for the
    /// equal-angle spherical branch.
    pub a: f64,
    /// Meridian length (second tip crossing position).
    pub big_a: f64,
    /// `|u(A) + α₂/2π|` of the solved orbit.
    pub closure_residual: f64,
    pub orbit: Trajectory,
}

/// Roots of `ln y = t + y - 1` (i.e. `y = k e^{y-1}` with `t = ln k`),
/// bisected to relative resolution ~1e-14. Working from `ln k` keeps
/// extreme angle ratios (tiny k) representable.
fn roots_from_log_k(t: f64) -> (f64, f64) {
    debug_assert!(t < 0.0);
    let g = |y: f64| y.ln() - t - y + 1.0;
    // y₁ ∈ (0, 1): g(0⁺) = -∞, g(1) = -t > 0.
    let mut lo = f64::MIN_POSITIVE;
    let mut hi = 1.0;
    // Walk the lower bracket up to where g < 0 to keep bisection tight.
    while g(hi / 2.0) > 0.0 {
        hi /= 2.0;
        if hi < 1e-290 {
            break;
        }
    }
    let y1 = bisect(g, lo, hi.min(1.0), true);
    // y₂ ∈ (1, ∞): g(1) > 0, g → -∞; expand the bracket by doubling q.
    lo = 1.0;
    hi = 2.0;
    while g(hi) > 0.0 {
        hi = 1.0 + 2.0 * (hi - 1.0);
    }
    let y2 = bisect(g, lo, hi, false);
    (y1, y2)
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, log_split: bool) -> f64 {
    // g(lo) > 0 is not guaranteed in sign; orient by endpoint evaluation.
    let mut glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = if log_split {
            (lo.ln() + hi.ln()).mul_add(0.5, 0.0).exp()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The two positive solutions of `y = k e^{y-1}`: `y₁ ∈ (0,1)` by bisection,
/// `y₂ ∈ (1,∞)` by bracket doubling then bisection.
pub fn positive_roots(k: f64) -> Result<(f64, f64), FootballError> {
    assert!(k > 0.0, "k must be positive");
    if k >= 1.0 {
        return Err(FootballError::DegenerateTangency(k));
    }
    Ok(roots_from_log_k(k.ln()))
}

/// `Ψ(k) = p/q = (1-y₁)/(y₂-1)`, the injective angle-ratio map on (0,1).
pub fn psi(k: f64) -> Result<f64, FootballError> {
    let (y1, y2) = positive_roots(k)?;
    Ok((1.0 - y1) / (y2 - 1.0))
}

fn psi_from_log_k(t: f64) -> f64 {
    let (y1, y2) = roots_from_log_k(t);
    (1.0 - y1) / (y2 - 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    /// Bisection target for |Ψ(k) - α₁/α₂|.
    pub psi_tol: f64,
    /// Closure tolerance on the second-crossing slope.
    pub closure_tol: f64,
    /// Relative angle difference below which the equal-angle spherical
    /// branch is taken (Ψ⁻¹ degenerates as k → 1).
    pub equal_angle_rel: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            psi_tol: 1e-10,
            closure_tol: 1e-6,
            equal_angle_rel: 1e-12,
        }
    }
}

/// Solve the boundary-value problem for cone angles `(α₁, α₂)` in radians,
/// in either order. Equal angles route to the explicit spherical branch
/// (`h = c sin(r/√2)`, realized here as the `a = 0` trajectory).
///
/// Conditioning: as the ratio α₁/α₂ falls, k → 0 and the orbit's starting
/// slope approaches the flat separatrix like k/e. Below a ratio of about
/// 1:15 the separation drops under what the integrator can track, and the
/// closure check fails with `ClosureResidualTooLarge` instead of handing
/// back an unverified orbit.
pub fn solve_angles(alpha1: f64, alpha2: f64) -> Result<FootballSolution, FootballError> {
    solve_angles_with(alpha1, alpha2, &SolveOptions::default())
}

pub fn solve_angles_with(
    alpha1: f64,
    alpha2: f64,
    opts: &SolveOptions,
) -> Result<FootballSolution, FootballError> {
    if alpha1 <= 0.0 || alpha2 <= 0.0 {
        return Err(FootballError::NonPositiveAngles(alpha1, alpha2));
    }
    let (lo, hi) = if alpha1 <= alpha2 {
        (alpha1, alpha2)
    } else {
        (alpha2, alpha1)
    };

    if (hi - lo) / hi <= opts.equal_angle_rel {
        // Spherical football: K = 1/2, h = (√2 α/2π) sin(r/√2).
        let b = lo / (2.0 * PI);
        let spec = SolitonSpec::new(SolitonSign::Shrinking, 0.0, b);
        let orbit = integrate_with(
            &spec,
            [0.0, b],
            (0.0, 2.0 * PI * 2.0_f64.sqrt()),
            &IntegrateOptions {
                max_tips: 1,
                tol: opts.tol,
                ..Default::default()
            },
        )?;
        let big_a = orbit
            .tip_crossings()
            .first()
            .map(|&(r, _)| r)
            .unwrap_or(PI * 2.0_f64.sqrt());
        return Ok(FootballSolution {
            alpha1: lo,
            alpha2: hi,
            k: 1.0,
            p: 0.0,
            q: 0.0,
            a: 0.0,
            big_a,
            closure_residual: 0.0,
            orbit,
        });
    }

    // Ψ is injective and increasing; invert by bisection in ln k.
    let target = lo / hi;
    let mut t_lo = -700.0;
    let mut t_hi = -1e-13;
    if psi_from_log_k(t_lo) > target {
        return Err(FootballError::RatioUnresolvable(target));
    }
    let mut t = 0.5 * (t_lo + t_hi);
    for _ in 0..200 {
        t = 0.5 * (t_lo + t_hi);
        let v = psi_from_log_k(t);
        if (v - target).abs() <= opts.psi_tol {
            break;
        }
        if v < target {
            t_lo = t;
        } else {
            t_hi = t;
        }
        if t_hi - t_lo < 1e-15 * t_lo.abs().max(1.0) {
            break;
        }
    }
    let k = t.exp();
    let (y1, y2) = roots_from_log_k(t);
    let (p, q) = (1.0 - y1, y2 - 1.0);
    // α₁ = (π/a) p, so a = π p / α₁ (equivalently π q / α₂).
    let a = PI * p / lo;

    // Integrate the orbit from the small-angle tip and verify closure.
    let b = lo / (2.0 * PI);
    let spec = SolitonSpec::new(SolitonSign::Shrinking, a, b);
    let orbit = integrate_with(
        &spec,
        [0.0, b],
        (0.0, 1e4),
        &IntegrateOptions {
            max_tips: 1,
            tol: opts.tol,
            ..Default::default()
        },
    )?;
    let (big_a, u_a) =
        orbit
            .tip_crossings()
            .first()
            .copied()
            .ok_or(FootballError::ClosureResidualTooLarge {
                residual: f64::INFINITY,
                tol: opts.closure_tol,
            })?;
    let residual = (u_a + hi / (2.0 * PI)).abs();
    if residual > opts.closure_tol {
        return Err(FootballError::ClosureResidualTooLarge {
            residual,
            tol: opts.closure_tol,
        });
    }
    Ok(FootballSolution {
        alpha1: lo,
        alpha2: hi,
        k,
        p,
        q,
        a,
        big_a,
        closure_residual: residual,
        orbit,
    })
}

/// Independent closure check: re-integrate at 10× tighter tolerance and
/// return `|u(A) + α₂/2π| + |H-drift|` over the orbit. The spherical
/// degenerate branch reports 0 by convention.
pub fn verify_orbit(sol: &FootballSolution) -> Result<f64, FootballError> {
    if sol.a == 0.0 {
        return Ok(0.0);
    }
    let b = sol.alpha1 / (2.0 * PI);
    let spec = SolitonSpec::new(SolitonSign::Shrinking, sol.a, b);
    let orbit = integrate_with(
        &spec,
        [0.0, b],
        (0.0, 1e4),
        &IntegrateOptions {
            max_tips: 1,
            tol: 1e-11,
            ..Default::default()
        },
    )?;
    let Some(&(_, u_a)) = orbit.tip_crossings().first() else {
        return Ok(f64::INFINITY);
    };
    let slope_residual = (u_a + sol.alpha2 / (2.0 * PI)).abs();
    let h0 = first_integral(&spec, orbit.states[0]).expect("tip state off separatrix");
    let drift = orbit
        .states
        .iter()
        .map(|&y| (first_integral(&spec, y).unwrap() - h0).abs())
        .fold(0.0_f64, f64::max);
    Ok(slope_residual + drift)
}
