//! Trajectory classification into the soliton families.

use super::{integrate_with, Event, IntegrateOptions, SolitonError, SolitonSign, SolitonSpec};
use std::f64::consts::PI;

/// The families of complete gradient solitons on smooth and cone surfaces
/// with curvature bounded below, plus the unbounded-curvature catch-all.
/// Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolitonFamily {
    ConstantCurvature,
    Cigar,
    ConeCigar { alpha: f64 },
    Football { alpha1: f64, alpha2: f64 },
    Teardrop { alpha: f64 },
    ShrinkGaussianCone { alpha: f64 },
    ExpandGaussianCone { alpha: f64 },
    AlphaBetaCone { alpha: f64, beta: f64 },
    BluntCone { alpha: f64 },
    CuspedCone { alpha: f64 },
    UnboundedCurvature,
}

impl std::fmt::Display for SolitonFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let deg = |a: f64| a * 180.0 / PI;
        match *self {
            SolitonFamily::ConstantCurvature => write!(f, "ConstantCurvature"),
            SolitonFamily::Cigar => write!(f, "Cigar"),
            SolitonFamily::ConeCigar { alpha } => {
                write!(f, "ConeCigar alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::Football { alpha1, alpha2 } => {
                write!(
                    f,
                    "Football alpha1={:.4}deg alpha2={:.4}deg",
                    deg(alpha1),
                    deg(alpha2)
                )
            }
            SolitonFamily::Teardrop { alpha } => {
                write!(f, "Teardrop alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::ShrinkGaussianCone { alpha } => {
                write!(f, "ShrinkGaussianCone alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::ExpandGaussianCone { alpha } => {
                write!(f, "ExpandGaussianCone alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::AlphaBetaCone { alpha, beta } => {
                write!(
                    f,
                    "AlphaBetaCone alpha={:.4}deg beta={:.4}deg",
                    deg(alpha),
                    deg(beta)
                )
            }
            SolitonFamily::BluntCone { alpha } => {
                write!(f, "BluntCone alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::CuspedCone { alpha } => {
                write!(f, "CuspedCone alpha={:.4}deg", deg(alpha))
            }
            SolitonFamily::UnboundedCurvature => write!(f, "UnboundedCurvature"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    /// Absolute tolerance for slope matches against the named values
    /// (±1, ±1/(2a), 0).
    pub slope_tol: f64,
    pub integrate: IntegrateOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            slope_tol: 1e-6,
            integrate: IntegrateOptions::default(),
        }
    }
}

pub fn classify(spec: &SolitonSpec) -> Result<SolitonFamily, SolitonError> {
    classify_with(spec, &ClassifyOptions::default())
}

/// Integrate from the tip `(0, b)` and sort the trajectory into its family
/// by the event pattern and the named slope values.
pub fn classify_with(
    spec: &SolitonSpec,
    opts: &ClassifyOptions,
) -> Result<SolitonFamily, SolitonError> {
    let tol = opts.slope_tol;
    let (a, b) = (spec.a, spec.b);

    // a = 0 is the degenerate family: no gradient, constant curvature.
    if a == 0.0 {
        return Ok(SolitonFamily::ConstantCurvature);
    }

    match spec.epsilon {
        SolitonSign::Steady => {
            if b.abs() <= tol {
                return Err(SolitonError::Unclassifiable { events: vec![] });
            }
            if b > 0.0 {
                // Rising parabola branch: curvature unbounded below.
                return Ok(SolitonFamily::UnboundedCurvature);
            }
            if (b + 1.0).abs() <= tol {
                Ok(SolitonFamily::Cigar)
            } else {
                Ok(SolitonFamily::ConeCigar {
                    alpha: -2.0 * PI * b,
                })
            }
        }
        SolitonSign::Expanding => {
            if b.abs() <= tol {
                // Separatrix limit b → 0⁻.
                return Ok(SolitonFamily::CuspedCone { alpha: PI / a });
            }
            if b > 0.0 {
                return Ok(SolitonFamily::UnboundedCurvature);
            }
            let alpha = PI / a;
            if (b + 1.0 / (2.0 * a)).abs() <= tol {
                Ok(SolitonFamily::ExpandGaussianCone { alpha })
            } else if (b + 1.0).abs() <= tol {
                Ok(SolitonFamily::BluntCone { alpha })
            } else {
                Ok(SolitonFamily::AlphaBetaCone {
                    alpha,
                    beta: -2.0 * PI * b,
                })
            }
        }
        SolitonSign::Shrinking => {
            if b.abs() <= tol {
                return Err(SolitonError::Unclassifiable { events: vec![] });
            }
            // Only u ≡ +1/(2a) is the invariant flat line; trajectories
            // above it run to unbounded w, every other crossing value
            // (including all b < 0) closes into a football-type orbit.
            if (b - 1.0 / (2.0 * a)).abs() <= tol {
                return Ok(SolitonFamily::ShrinkGaussianCone { alpha: PI / a });
            }
            if b > 1.0 / (2.0 * a) {
                return Ok(SolitonFamily::UnboundedCurvature);
            }
            let t = integrate_with(
                spec,
                [0.0, b],
                (0.0, 1e4),
                &IntegrateOptions {
                    max_tips: 1,
                    ..opts.integrate
                },
            )?;
            if t.events.iter().any(|e| matches!(e, Event::BlowUp { .. })) {
                return Ok(SolitonFamily::UnboundedCurvature);
            }
            let tips = t.tip_crossings();
            let Some(&(_, u_a)) = tips.first() else {
                return Err(SolitonError::Unclassifiable { events: t.events });
            };
            let s1 = b.abs();
            let s2 = u_a.abs();
            let smooth1 = (s1 - 1.0).abs() <= tol;
            let smooth2 = (s2 - 1.0).abs() <= tol;
            let (alpha1, alpha2) = (2.0 * PI * s1.min(s2), 2.0 * PI * s1.max(s2));
            match (smooth1, smooth2) {
                (true, true) => Ok(SolitonFamily::ConstantCurvature),
                (true, false) => Ok(SolitonFamily::Teardrop {
                    alpha: 2.0 * PI * s2,
                }),
                (false, true) => Ok(SolitonFamily::Teardrop {
                    alpha: 2.0 * PI * s1,
                }),
                (false, false) => Ok(SolitonFamily::Football { alpha1, alpha2 }),
            }
        }
    }
}
