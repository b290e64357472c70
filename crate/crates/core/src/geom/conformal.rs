//! Conformal cone metrics `e^{2u}(dr² + r²dθ²)` on the punctured disc, with
//! `u(r) = a(r) + β ln r`, and the coordinate change to geodesic polar form.

use super::{GeomError, RadialProfile};
use crate::fd;

/// The bounded part `a(r)` of a conformal factor.
#[derive(Debug, Clone, PartialEq)]
enum BoundedPart {
    Constant(f64),
    /// `ln(2(β+1)) - ln(1 + r^{2(β+1)})`
    Spherical {
        beta: f64,
    },
    /// `ln(2(β+1)) - ln|1 - r^{2(β+1)}|`, domain r < 1
    Hyperbolic {
        beta: f64,
    },
    /// Cusp limit: `a(r) = -ln|ln r|` with β = -1 (not a bounded function;
    /// kept as the degenerate α → 0 member of the canonical family).
    Cusp,
    Samples {
        r: Vec<f64>,
        a: Vec<f64>,
    },
}

/// A conformal factor `u(r) = a(r) + β ln r` with cone exponent
/// `β = α/2π - 1 ∈ (-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalProfile {
    beta: f64,
    a: BoundedPart,
}

/// Canonical constant-curvature cone models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalCone {
    Euclidean,
    Spherical,
    Hyperbolic,
    /// Hyperbolic cusp `(1/(r ln r))² (dr² + r²dθ²)`; ignores β.
    Cusp,
}

/// Closed-form conformal factors of the canonical cone metrics.
pub fn canonical_cone_metric(
    kind: CanonicalCone,
    beta: f64,
) -> Result<ConformalProfile, GeomError> {
    if kind != CanonicalCone::Cusp && !(-1.0 < beta && beta <= 0.0) {
        return Err(GeomError::BetaOutOfRange(beta));
    }
    let a = match kind {
        CanonicalCone::Euclidean => BoundedPart::Constant((beta + 1.0).ln()),
        CanonicalCone::Spherical => BoundedPart::Spherical { beta },
        CanonicalCone::Hyperbolic => BoundedPart::Hyperbolic { beta },
        CanonicalCone::Cusp => BoundedPart::Cusp,
    };
    let beta = if kind == CanonicalCone::Cusp {
        -1.0
    } else {
        beta
    };
    Ok(ConformalProfile { beta, a })
}

impl ConformalProfile {
    /// From samples of the bounded part on `(0, 1]`.
    pub fn from_samples(beta: f64, r: Vec<f64>, a: Vec<f64>) -> Result<Self, GeomError> {
        if !(-1.0 < beta && beta <= 0.0) {
            return Err(GeomError::BetaOutOfRange(beta));
        }
        assert_eq!(r.len(), a.len());
        Ok(Self {
            beta,
            a: BoundedPart::Samples { r, a },
        })
    }

    /// Constant bounded part (`a(r) ≡ c`); the Euclidean cone is `c = ln(β+1)`.
    pub fn with_constant(beta: f64, c: f64) -> Result<Self, GeomError> {
        if !(-1.0 < beta && beta <= 0.0) {
            return Err(GeomError::BetaOutOfRange(beta));
        }
        Ok(Self {
            beta,
            a: BoundedPart::Constant(c),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The cone angle `2π(β+1)`.
    pub fn cone_angle(&self) -> f64 {
        2.0 * std::f64::consts::PI * (self.beta + 1.0)
    }

    /// The bounded part `a(r)`; linear interpolation between samples.
    pub fn a(&self, r: f64) -> f64 {
        match &self.a {
            BoundedPart::Constant(c) => *c,
            BoundedPart::Spherical { beta } => {
                (2.0 * (beta + 1.0)).ln() - (1.0 + r.powf(2.0 * (beta + 1.0))).ln()
            }
            BoundedPart::Hyperbolic { beta } => {
                (2.0 * (beta + 1.0)).ln() - (1.0 - r.powf(2.0 * (beta + 1.0))).abs().ln()
            }
            BoundedPart::Cusp => -r.ln().abs().ln(),
            BoundedPart::Samples { r: rs, a } => {
                match rs.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
                    Ok(i) => a[i],
                    Err(0) => a[0],
                    Err(i) if i >= rs.len() => *a.last().unwrap(),
                    Err(i) => {
                        let t = (r - rs[i - 1]) / (rs[i] - rs[i - 1]);
                        a[i - 1] + t * (a[i] - a[i - 1])
                    }
                }
            }
        }
    }

    /// The full conformal factor `u(r) = a(r) + β ln r`.
    pub fn u(&self, r: f64) -> f64 {
        self.a(r) + self.beta * r.ln()
    }

    fn integrable_at_zero(&self) -> bool {
        // e^u ~ e^a r^β is integrable iff β > -1; the cusp (β = -1) is not.
        self.beta > -1.0
    }
}

/// Change a conformal metric to geodesic polar form: `ρ(r) = ∫₀^r e^u`,
/// `h(ρ(r)) = r e^{u(r)}`. The first cell uses the local model
/// `ρ ≈ e^{a(0⁺)} r^{β+1}/(β+1)` because the trapezoid underestimates across
/// an `r^β` endpoint; the rest is composite trapezoid on a log-spaced grid.
pub fn conformal_to_polar(
    c: &ConformalProfile,
    r_max: f64,
    n: usize,
) -> Result<RadialProfile, GeomError> {
    if !c.integrable_at_zero() {
        return Err(GeomError::NonIntegrableFactor);
    }
    assert!(n >= 8, "grid too small");
    let beta = c.beta;
    // Push the analytic-stub boundary deep enough that a(r) is flat below
    // it. The recovered tip angle sees the stub error undiluted, and the
    // canonical forms vary like a(r) - a(0⁺) ~ r^{2(β+1)}, so
    // r_min^{2(β+1)} ≤ 3e-8 pins the relative angle error under 1e-6.
    let decades = (3.75 / (beta + 1.0)).clamp(6.0, 60.0);
    let r_min = r_max * 10.0_f64.powf(-decades);
    let m = n - 1; // sampled nodes; one extra for the tip
    let rs: Vec<f64> = (0..m)
        .map(|i| r_min * (r_max / r_min).powf(i as f64 / (m - 1) as f64))
        .collect();
    let eu: Vec<f64> = rs.iter().map(|&r| c.u(r).exp()).collect();
    if !eu.iter().all(|v| v.is_finite()) {
        return Err(GeomError::NonIntegrableFactor);
    }
    // Arc length: analytic stub on (0, r_min], quadratic panels beyond
    // (plain trapezoid bias on the log grid is just visible at the 1e-6
    // angle-recovery scale).
    let stub = c.a(r_min).exp() * r_min.powf(beta + 1.0) / (beta + 1.0);
    let mut rho = fd::cumulative_quadratic(&rs, &eu);
    for v in &mut rho {
        *v += stub;
    }
    let mut grid = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    grid.push(0.0);
    values.push(0.0);
    for i in 0..m {
        grid.push(rho[i]);
        values.push(rs[i] * eu[i]);
    }
    RadialProfile::from_samples(grid, values)
}
