//! Radial surface metrics `dρ² + h(ρ)² dθ²`, their curvature, total
//! curvature, cone angles, and embedding into ℝ³ as surfaces of revolution.

mod cone;
mod conformal;

pub use cone::{conic_euler, troyanov_admissible, Admissibility, ConicEuler};
pub use conformal::{canonical_cone_metric, conformal_to_polar, CanonicalCone, ConformalProfile};

use crate::fd;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("profile needs at least 4 grid points, got {0}")]
    GridTooCoarse(usize),
    #[error("grid not strictly increasing at index {0}")]
    GridNotIncreasing(usize),
    #[error("profile not strictly positive in the interior (index {0})")]
    NonPositiveProfile(usize),
    #[error("profile has no end with h = 0")]
    NoTip,
    #[error("cone exponent beta = {0} outside (-1, 0]")]
    BetaOutOfRange(f64),
    #[error("conformal factor not integrable near r = 0")]
    NonIntegrableFactor,
    #[error("not embeddable: |h'| = {slope:.6} > 1 first at grid index {index}")]
    NotEmbeddable { index: usize, slope: f64 },
}

/// Analytic profiles with exact derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `h = R sin(ρ/R)`, constant curvature `1/R²`.
    Sphere { radius: f64 },
    /// `h = s·ρ`, flat; cone angle `2πs`.
    FlatCone { slope: f64 },
    /// `h = √(2/a) tanh(√(a/2) ρ)`, the steady cigar with gradient constant `a`.
    Cigar { a: f64 },
}

impl ClosedForm {
    pub fn h(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::Sphere { radius } => radius * (rho / radius).sin(),
            ClosedForm::FlatCone { slope } => slope * rho,
            ClosedForm::Cigar { a } => (2.0 / a).sqrt() * ((a / 2.0).sqrt() * rho).tanh(),
        }
    }

    pub fn dh(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::Sphere { radius } => (rho / radius).cos(),
            ClosedForm::FlatCone { slope } => slope,
            ClosedForm::Cigar { a } => {
                let c = ((a / 2.0).sqrt() * rho).cosh();
                1.0 / (c * c)
            }
        }
    }

    pub fn d2h(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::Sphere { radius } => -(rho / radius).sin() / radius,
            ClosedForm::FlatCone { .. } => 0.0,
            ClosedForm::Cigar { a } => {
                let n = (a / 2.0).sqrt();
                let t = (n * rho).tanh();
                let c = (n * rho).cosh();
                -2.0 * n * t / (c * c)
            }
        }
    }

    /// Gaussian curvature `K = -h''/h`, with the tip limit taken analytically.
    pub fn curvature(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::Sphere { radius } => 1.0 / (radius * radius),
            ClosedForm::FlatCone { .. } => 0.0,
            ClosedForm::Cigar { a } => {
                let c = ((a / 2.0).sqrt() * rho).cosh();
                a / (c * c)
            }
        }
    }
}

/// A rotationally symmetric metric `dρ² + h(ρ)² dθ²` sampled on a grid,
/// with cone-angle metadata at profile zeros and an optional closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    angle0: Option<f64>,
    angle_a: Option<f64>,
    closed_form: Option<ClosedForm>,
}

impl RadialProfile {
    /// Build from samples; detects tips (exact zeros at the ends) and fits
    /// their cone angles.
    pub fn from_samples(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, GeomError> {
        if grid.len() < 4 {
            return Err(GeomError::GridTooCoarse(grid.len()));
        }
        assert_eq!(grid.len(), values.len(), "grid/values length mismatch");
        for i in 1..grid.len() {
            if grid[i] <= grid[i - 1] {
                return Err(GeomError::GridNotIncreasing(i));
            }
        }
        for (i, &v) in values.iter().enumerate().take(grid.len() - 1).skip(1) {
            if v <= 0.0 {
                return Err(GeomError::NonPositiveProfile(i));
            }
        }
        let mut p = Self {
            grid,
            values,
            angle0: None,
            angle_a: None,
            closed_form: None,
        };
        if p.values[0] == 0.0 {
            p.angle0 = Some(2.0 * PI * p.tip_slope_left());
        }
        if *p.values.last().unwrap() == 0.0 {
            p.angle_a = Some(-2.0 * PI * p.tip_slope_right());
        }
        Ok(p)
    }

    /// Sample `h(ρ)` on a uniform grid `[0, rho_max]`; values with magnitude
    /// below `1e-13 · max|h|` are snapped to exact zeros so tips register.
    pub fn from_fn(h: impl Fn(f64) -> f64, rho_max: f64, n: usize) -> Result<Self, GeomError> {
        let grid: Vec<f64> = (0..n)
            .map(|i| rho_max * i as f64 / (n - 1) as f64)
            .collect();
        let mut values: Vec<f64> = grid.iter().map(|&r| h(r)).collect();
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for v in &mut values {
            if v.abs() < 1e-13 * scale {
                *v = 0.0;
            }
        }
        Self::from_samples(grid, values)
    }

    fn from_closed_form(cf: ClosedForm, rho_max: f64, n: usize) -> Self {
        let mut p = Self::from_fn(|r| cf.h(r), rho_max, n).expect("closed form is a valid profile");
        p.closed_form = Some(cf);
        p
    }

    /// Unit-curvature round sphere scaled to `radius`, on `[0, πR]`.
    pub fn sphere(radius: f64, n: usize) -> Self {
        Self::from_closed_form(ClosedForm::Sphere { radius }, PI * radius, n)
    }

    /// Flat cone of slope `s` (angle `2πs`).
    pub fn flat_cone(slope: f64, rho_max: f64, n: usize) -> Self {
        Self::from_closed_form(ClosedForm::FlatCone { slope }, rho_max, n)
    }

    /// The steady cigar profile for gradient constant `a`.
    pub fn cigar(a: f64, rho_max: f64, n: usize) -> Self {
        Self::from_closed_form(ClosedForm::Cigar { a }, rho_max, n)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn angle0(&self) -> Option<f64> {
        self.angle0
    }

    pub fn angle_a(&self) -> Option<f64> {
        self.angle_a
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    /// One-sided slope at the left tip: 3-point fit through interior nodes,
    /// excluding the tip node itself (h''/h is 0/0 there). Stencil nodes
    /// are spread by distance doubling so that clustered (log-spaced) grids
    /// don't amplify sample noise in the extrapolation.
    pub fn tip_slope_left(&self) -> f64 {
        match self.closed_form {
            Some(cf) => cf.dh(self.grid[0]),
            None => {
                let [i1, i2, i3] = tip_stencil(&self.grid, true);
                let xs = [self.grid[i1], self.grid[i2], self.grid[i3]];
                let ys = [self.values[i1], self.values[i2], self.values[i3]];
                let w = fd::fd_weights(self.grid[0], &xs, 1);
                fd::apply(&w, &ys)
            }
        }
    }

    /// One-sided slope at the right tip, same construction.
    pub fn tip_slope_right(&self) -> f64 {
        match self.closed_form {
            Some(cf) => cf.dh(*self.grid.last().unwrap()),
            None => {
                let [i1, i2, i3] = tip_stencil(&self.grid, false);
                let xs = [self.grid[i1], self.grid[i2], self.grid[i3]];
                let ys = [self.values[i1], self.values[i2], self.values[i3]];
                let w = fd::fd_weights(*self.grid.last().unwrap(), &xs, 1);
                fd::apply(&w, &ys)
            }
        }
    }

    /// `h'` on the grid (exact for closed forms).
    pub fn derivative(&self) -> Vec<f64> {
        match self.closed_form {
            Some(cf) => self.grid.iter().map(|&r| cf.dh(r)).collect(),
            None => fd::derivative(&self.grid, &self.values),
        }
    }

    /// `h''` on the grid (exact for closed forms).
    pub fn second_derivative(&self) -> Vec<f64> {
        match self.closed_form {
            Some(cf) => self.grid.iter().map(|&r| cf.d2h(r)).collect(),
            None => fd::second_derivative(&self.grid, &self.values),
        }
    }

    /// Total area `2π ∫ h dρ`.
    pub fn area(&self) -> f64 {
        2.0 * PI * fd::trapezoid(&self.grid, &self.values)
    }
}

/// Interior stencil for a one-sided tip fit: distances from the tip double
/// node to node, which keeps the extrapolation conditioned on any grid.
fn tip_stencil(grid: &[f64], from_left: bool) -> [usize; 3] {
    let n = grid.len();
    let dist = |i: usize| {
        if from_left {
            grid[i] - grid[0]
        } else {
            grid[n - 1] - grid[i]
        }
    };
    let idx = |j: usize| if from_left { j } else { n - 1 - j };
    let mut picks = [idx(1); 3];
    let mut j = 1;
    for slot in 1..3 {
        let target = 2.0 * dist(picks[slot - 1]);
        let mut next = j + 1;
        while next < n - 2 && dist(idx(next)) < target {
            next += 1;
        }
        picks[slot] = idx(next.min(n - 2));
        j = next;
    }
    if from_left {
        picks
    } else {
        [picks[2], picks[1], picks[0]]
    }
}

/// Gaussian curvature `K = -h''/h` at every grid node. Tips are filled by
/// linear extrapolation from the two innermost interior nodes.
pub fn curvature(p: &RadialProfile) -> Result<Vec<f64>, GeomError> {
    if p.len() < 4 {
        return Err(GeomError::GridTooCoarse(p.len()));
    }
    if let Some(cf) = p.closed_form {
        return Ok(p.grid.iter().map(|&r| cf.curvature(r)).collect());
    }
    for i in 1..p.len() - 1 {
        if p.values[i] <= 0.0 {
            return Err(GeomError::NonPositiveProfile(i));
        }
    }
    let d2 = p.second_derivative();
    let n = p.len();
    let mut k = vec![0.0; n];
    for i in 1..n - 1 {
        k[i] = -d2[i] / p.values[i];
    }
    let extrapolate =
        |x: f64, x1: f64, k1: f64, x2: f64, k2: f64| k1 + (k2 - k1) * (x - x1) / (x2 - x1);
    k[0] = if p.values[0] == 0.0 {
        extrapolate(p.grid[0], p.grid[1], k[1], p.grid[2], k[2])
    } else {
        -d2[0] / p.values[0]
    };
    k[n - 1] = if p.values[n - 1] == 0.0 {
        extrapolate(
            p.grid[n - 1],
            p.grid[n - 2],
            k[n - 2],
            p.grid[n - 3],
            k[n - 3],
        )
    } else {
        -d2[n - 1] / p.values[n - 1]
    };
    Ok(k)
}

/// Cone angles at the profile's zero ends: `α₀ = 2π h'(0⁺)` on the left and
/// `α_A = -2π h'(A⁻)` on the right.
pub fn cone_angles(p: &RadialProfile) -> Result<(f64, Option<f64>), GeomError> {
    match (p.angle0, p.angle_a) {
        (Some(a0), aa) => Ok((a0, aa)),
        (None, Some(aa)) => Ok((aa, None)), // right-only tip, reported first
        (None, None) => Err(GeomError::NoTip),
    }
}

/// Total curvature `∫ K dμ = 2π ∫ K h dρ`. For a profile closed at both
/// ends this approximates `2π χ̂`.
pub fn gauss_bonnet(p: &RadialProfile) -> Result<f64, GeomError> {
    let k = curvature(p)?;
    let integrand: Vec<f64> = k.iter().zip(&p.values).map(|(k, h)| k * h).collect();
    Ok(2.0 * PI * fd::trapezoid(&p.grid, &integrand))
}

/// An isometric embedding of a radial profile into ℝ³ as a surface of
/// revolution: parallel radius `h(ρᵢ)` at height `z(ρᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub rho: Vec<f64>,
    pub h: Vec<f64>,
    pub z: Vec<f64>,
}

/// Embed the profile: `z' = √(1 - h'²)`, `z(start) = 0`. Each cell advances
/// `z` by the exact chord `√(Δρ² - Δh²)`, so meridian arc lengths are
/// preserved cell by cell. The slope guard is the cell slope |Δh|/Δρ: by
/// the mean value theorem it stays ≤ 1 on a truly embeddable profile,
/// whereas nodal difference formulas overshoot |h'| = 1 by O(Δρ²) at
/// smooth tips of sampled data and would reject valid profiles.
pub fn embed_profile(p: &RadialProfile) -> Result<Embedding, GeomError> {
    let n = p.len();
    let mut z = vec![0.0; n];
    for i in 1..n {
        let drho = p.grid[i] - p.grid[i - 1];
        let dh = p.values[i] - p.values[i - 1];
        if dh.abs() > drho * (1.0 + 1e-12) {
            return Err(GeomError::NotEmbeddable {
                index: i,
                slope: (dh / drho).abs(),
            });
        }
        let cell = drho * drho - dh * dh;
        z[i] = z[i - 1] + cell.max(0.0).sqrt();
    }
    Ok(Embedding {
        rho: p.grid.clone(),
        h: p.values.clone(),
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_curvature_is_one() {
        let p = RadialProfile::sphere(1.0, 101);
        let k = curvature(&p).unwrap();
        for &ki in &k {
            assert!((ki - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_sphere_curvature_is_one() {
        // Same profile without the closed-form tag: finite differences.
        let p = RadialProfile::from_fn(|r| r.sin(), PI, 2001).unwrap();
        let k = curvature(&p).unwrap();
        let worst = k.iter().map(|k| (k - 1.0).abs()).fold(0.0_f64, f64::max);
        assert!(worst < 1e-4, "worst curvature error {worst:.2e}");
    }

    #[test]
    fn flat_cone_curvature_is_zero() {
        let p = RadialProfile::flat_cone(0.5, 3.0, 64);
        for ki in curvature(&p).unwrap() {
            assert!(ki.abs() < 1e-13);
        }
    }

    #[test]
    fn cigar_tip_curvature_equals_a() {
        let p = RadialProfile::cigar(1.0, 8.0, 128);
        let k = curvature(&p).unwrap();
        assert!((k[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cone_angle_of_half_slope_is_pi() {
        let p = RadialProfile::from_fn(|r| 0.5 * r, 1.0, 32).unwrap();
        let (a0, _) = cone_angles(&p).unwrap();
        assert!((a0 - PI).abs() < 1e-10);
    }

    #[test]
    fn smooth_profile_angle_is_two_pi() {
        let p = RadialProfile::from_fn(|r| r.sin(), PI, 501).unwrap();
        let (a0, aa) = cone_angles(&p).unwrap();
        // Tip fit is second order with an 11Δ²/6 constant; at Δ = π/500
        // the angle error is ≈ 4.5e-4.
        assert!((a0 - 2.0 * PI).abs() < 1e-3);
        assert!((aa.unwrap() - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn no_tip_is_an_error() {
        let p = RadialProfile::from_fn(|r| 1.0 + r, 1.0, 16).unwrap();
        assert_eq!(cone_angles(&p), Err(GeomError::NoTip));
    }

    #[test]
    fn grid_too_coarse() {
        let r = RadialProfile::from_samples(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]);
        assert!(matches!(r, Err(GeomError::GridTooCoarse(3))));
    }

    #[test]
    fn nonpositive_interior_rejected() {
        let r = RadialProfile::from_samples(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, -0.5, 1.0]);
        assert!(matches!(r, Err(GeomError::NonPositiveProfile(2))));
    }

    #[test]
    fn gauss_bonnet_sphere() {
        let p = RadialProfile::sphere(1.0, 10_000);
        let total = gauss_bonnet(&p).unwrap();
        assert!((total - 4.0 * PI).abs() < 1e-6, "got {total}");
    }

    #[test]
    fn gauss_bonnet_flat_cone_is_zero() {
        let p = RadialProfile::flat_cone(0.7, 2.0, 256);
        assert!(gauss_bonnet(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gauss_bonnet_cigar_tends_to_two_pi() {
        // ∫ -h'' dρ · 2π = 2π (h'(0) - h'(R)) → 2π for large R.
        let p = RadialProfile::cigar(1.0, 30.0, 40_000);
        let total = gauss_bonnet(&p).unwrap();
        let expected = 2.0 * PI * (1.0 - ClosedForm::Cigar { a: 1.0 }.dh(30.0));
        assert!(
            (total - expected).abs() < 1e-6,
            "got {total}, expected {expected}"
        );
        assert!((total - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn gauss_bonnet_second_order_in_step() {
        let total =
            |n: usize| gauss_bonnet(&RadialProfile::from_fn(|r| r.sin(), PI, n).unwrap()).unwrap();
        let e1 = (total(1001) - 4.0 * PI).abs();
        let e2 = (total(2001) - 4.0 * PI).abs();
        assert!(e1 / e2 >= 3.0, "refinement ratio {}", e1 / e2);
    }

    #[test]
    fn embed_sphere_height() {
        let p = RadialProfile::sphere(1.0, 4001);
        let e = embed_profile(&p).unwrap();
        for (i, &r) in e.rho.iter().enumerate() {
            assert!((e.z[i] - (1.0 - r.cos())).abs() < 1e-5);
        }
    }

    #[test]
    fn embed_flat_cone_is_straight() {
        let p = RadialProfile::flat_cone(0.5, 2.0, 64);
        let e = embed_profile(&p).unwrap();
        let c = (3.0_f64).sqrt() / 2.0;
        for (i, &r) in e.rho.iter().enumerate() {
            assert!((e.z[i] - c * r).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_cell_isometry() {
        let p = RadialProfile::sphere(1.0, 500);
        let e = embed_profile(&p).unwrap();
        for i in 1..e.rho.len() {
            let drho = e.rho[i] - e.rho[i - 1];
            let dh = e.h[i] - e.h[i - 1];
            let dz = e.z[i] - e.z[i - 1];
            let ratio = (dz * dz + dh * dh) / (drho * drho);
            assert!((ratio - 1.0).abs() < 1e-8, "cell {i}: ratio {ratio}");
        }
    }

    #[test]
    fn steep_profile_not_embeddable() {
        let p = RadialProfile::from_fn(|r| 1.5 * r, 1.0, 16).unwrap();
        match embed_profile(&p) {
            Err(GeomError::NotEmbeddable { slope, .. }) => assert!(slope > 1.0),
            other => panic!("expected NotEmbeddable, got {other:?}"),
        }
    }
}
