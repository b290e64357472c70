//! Conic Euler characteristic and the Troyanov angle-admissibility check.

use super::GeomError;

/// Topological Euler characteristic plus cone exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicEuler {
    chi: i32,
    betas: Vec<f64>,
}

impl ConicEuler {
    pub fn new(chi: i32, betas: Vec<f64>) -> Result<Self, GeomError> {
        for &b in &betas {
            if !(-1.0 < b && b <= 0.0) {
                return Err(GeomError::BetaOutOfRange(b));
            }
        }
        Ok(Self { chi, betas })
    }

    pub fn chi(&self) -> i32 {
        self.chi
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `χ̂ = χ + Σ βᵢ`.
pub fn conic_euler(ce: &ConicEuler) -> f64 {
    ce.chi as f64 + ce.betas.iter().sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    NotAdmissible,
    /// Equality in the angle inequality. The strict statement excludes it,
    /// but equal-angle footballs do carry constant curvature, so the case is
    /// surfaced rather than folded into either side.
    BoundaryCase,
}

/// Existence test for a constant-curvature cone metric with the given data:
/// admissible when `χ̂ ≤ 0`, or when `χ̂ > 0` and `βᵢ > Σ_{j≠i} βⱼ` for every i.
pub fn troyanov_admissible(ce: &ConicEuler) -> Admissibility {
    let chi_hat = conic_euler(ce);
    if chi_hat <= 0.0 {
        return Admissibility::Admissible;
    }
    let total: f64 = ce.betas.iter().sum();
    let mut boundary = false;
    for &b in &ce.betas {
        let others = total - b;
        if b < others {
            return Admissibility::NotAdmissible;
        }
        if b == others {
            boundary = true;
        }
    }
    if boundary {
        Admissibility::BoundaryCase
    } else {
        Admissibility::Admissible
    }
}
