//! The reduced planar ODE system for rotationally symmetric gradient
//! solitons: `h' = u`, `u' = (a·u + ε/2)·h`, with the potential slaved by
//! `f' = a·h`. Integration with event annotation, first integrals, the
//! steady closed forms, and reconstruction of potential and curvature along
//! trajectories.

mod classify;
mod portrait;

pub use classify::{classify, classify_with, ClassifyOptions, SolitonFamily};
pub use portrait::{
    phase_portrait, CriticalKind, CriticalPointInfo, IsoclineInfo, LineSpec, PhasePortrait,
    PortraitOptions,
};

use crate::fd;
use crate::geom::{GeomError, RadialProfile};
use crate::ode::{Control, DenseStep, Dopri5, OdeError, OdeSystem};
use thiserror::Error;

/// Soliton sign ε: shrinking −1, steady 0, expanding +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonSign {
    Shrinking,
    Steady,
    Expanding,
}

impl SolitonSign {
    pub fn epsilon(self) -> f64 {
        match self {
            SolitonSign::Shrinking => -1.0,
            SolitonSign::Steady => 0.0,
            SolitonSign::Expanding => 1.0,
        }
    }

    pub fn from_int(i: i32) -> Option<Self> {
        match i {
            -1 => Some(SolitonSign::Shrinking),
            0 => Some(SolitonSign::Steady),
            1 => Some(SolitonSign::Expanding),
            _ => None,
        }
    }
}

/// Parameters fixing one trajectory of the reduced system: sign ε, gradient
/// constant `a` (`f' = a·h`), and initial tip slope `b = u(0)` (cone angle
/// `2π|b|`). `a = 0` is the constant-curvature degenerate convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonSpec {
    pub epsilon: SolitonSign,
    pub a: f64,
    pub b: f64,
}

impl SolitonSpec {
    pub fn new(epsilon: SolitonSign, a: f64, b: f64) -> Self {
        assert!(a >= 0.0, "gradient constant a must be nonnegative, got {a}");
        Self { epsilon, a, b }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("state lies on a separatrix: log argument {0:.3e} vanishes")]
    OnSeparatrix(f64),
    #[error("closed-form branch does not match sign of C = {c}")]
    BranchMismatch { c: f64 },
    #[error("trajectory could not be classified; {} events recorded", events.len())]
    Unclassifiable { events: Vec<Event> },
}

/// Events annotated on an integrated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// `h = 0` crossing at `r` with slope `u`.
    TipCrossing { r: f64, u: f64 },
    /// Crossing of the vertical isocline `u = 0` (widest parallel).
    IsoclineTouch { r: f64, h: f64 },
    /// `|u|` exceeded the blow-up ceiling; integration halted.
    BlowUp { r: f64 },
    /// Entered the asymptotic band of the horizontal isocline.
    AsymptoteReached { r: f64 },
}

/// An event-annotated sampled solution curve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: Vec<f64>,
    pub states: Vec<[f64; 2]>,
    pub events: Vec<Event>,
    pub spec: SolitonSpec,
    segments: Vec<DenseStep<2>>,
}

impl Trajectory {
    /// Dense-output evaluation of `(h, u)` anywhere inside the integrated span.
    pub fn eval(&self, r: f64) -> [f64; 2] {
        if self.segments.is_empty() || r == self.params[0] {
            return self.states[0];
        }
        let seg = self
            .segments
            .iter()
            .find(|s| s.contains(r))
            .unwrap_or_else(|| {
                if self.forward() {
                    self.segments.last().unwrap()
                } else {
                    self.segments.first().unwrap()
                }
            });
        seg.eval(r)
    }

    fn forward(&self) -> bool {
        self.params.last().unwrap() >= &self.params[0]
    }

    pub fn tip_crossings(&self) -> Vec<(f64, f64)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::TipCrossing { r, u } => Some((*r, *u)),
                _ => None,
            })
            .collect()
    }

    /// Resample `|h|` on a uniform grid over `[r_start, r_end]` as a radial
    /// profile (the metric only uses `h²`, so the sign is dropped). End
    /// values at event-localization residual level are snapped to tips.
    pub fn to_profile(&self, r_end: f64, n: usize) -> Result<RadialProfile, GeomError> {
        let r0 = self.params[0];
        let span = r_end - r0;
        let grid: Vec<f64> = (0..n)
            .map(|i| span.abs() * i as f64 / (n - 1) as f64)
            .collect();
        let mut values: Vec<f64> = grid
            .iter()
            .map(|&s| self.eval(r0 + span.signum() * s)[0].abs())
            .collect();
        let scale = values.iter().cloned().fold(0.0_f64, f64::max);
        if values[0] <= 1e-9 * scale {
            values[0] = 0.0;
        }
        if *values.last().unwrap() <= 1e-9 * scale {
            *values.last_mut().unwrap() = 0.0;
        }
        RadialProfile::from_samples(grid, values)
    }
}

/// Exact right-hand side `(u, (a·u + ε/2)·h)`.
pub fn rhs(spec: &SolitonSpec, state: [f64; 2]) -> [f64; 2] {
    let [h, u] = state;
    [u, (spec.a * u + 0.5 * spec.epsilon.epsilon()) * h]
}

struct System {
    a: f64,
    half_eps: f64,
}

impl OdeSystem<2> for System {
    fn rhs(&self, _r: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], (self.a * y[1] + self.half_eps) * y[0]]
    }
}

/// Integration controls beyond the basic tolerance.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// Terminate with a BlowUp event when |u| exceeds this.
    pub blowup_ceiling: f64,
    /// Stop after this many tip crossings (0 = never stop on crossings).
    pub max_tips: usize,
    /// Band half-width for AsymptoteReached detection.
    pub asym_tol: f64,
    /// Absolute resolution of event positions in r.
    pub event_r_tol: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            blowup_ceiling: 1e6,
            max_tips: 0,
            asym_tol: 1e-3,
            event_r_tol: 1e-12,
        }
    }
}

/// Adaptive integration of the reduced system with event detection.
pub fn integrate(
    spec: &SolitonSpec,
    init: [f64; 2],
    r_span: (f64, f64),
    tol: f64,
) -> Result<Trajectory, SolitonError> {
    integrate_with(
        spec,
        init,
        r_span,
        &IntegrateOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn integrate_with(
    spec: &SolitonSpec,
    init: [f64; 2],
    r_span: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory, SolitonError> {
    let sys = System {
        a: spec.a,
        half_eps: 0.5 * spec.epsilon.epsilon(),
    };
    let solver = Dopri5::with_tol(opts.tol);
    let mut t = Trajectory {
        params: vec![r_span.0],
        states: vec![init],
        events: Vec::new(),
        spec: *spec,
        segments: Vec::new(),
    };
    let mut tips = 0_usize;
    let mut asym_seen = false;
    // The horizontal isocline of the nonsteady systems sits at u = -ε/(2a);
    // for the steady system the cigar plateau is u → 0.
    let asym_u = if spec.a > 0.0 {
        -spec.epsilon.epsilon() / (2.0 * spec.a)
    } else {
        0.0
    };

    let result = solver.solve(&sys, r_span.0, init, r_span.1, |step| {
        let mut control = Control::Continue;

        // Tip crossing: strict sign change of h across the step.
        if step.y0[0] == 0.0 && step.r0 != r_span.0 && step.y0[0] != step.y1[0] {
            tips += 1;
            t.events.push(Event::TipCrossing {
                r: step.r0,
                u: step.y0[1],
            });
        }
        if step.y0[0] * step.y1[0] < 0.0 {
            if let Some((r, y)) = step.locate_root(|_, y| y[0], opts.event_r_tol) {
                tips += 1;
                t.events.push(Event::TipCrossing { r, u: y[1] });
                if opts.max_tips > 0 && tips >= opts.max_tips {
                    control = Control::Stop;
                }
            }
        }
        // Widest-parallel touch: u crosses zero.
        if step.y0[1] * step.y1[1] < 0.0 {
            if let Some((r, y)) = step.locate_root(|_, y| y[1], opts.event_r_tol) {
                t.events.push(Event::IsoclineTouch { r, h: y[0] });
            }
        }
        // Asymptote band (reported once).
        if !asym_seen
            && spec.epsilon != SolitonSign::Shrinking
            && (step.y1[1] - asym_u).abs() <= opts.asym_tol
            && step.y1[0].abs() > 0.0
        {
            asym_seen = true;
            t.events.push(Event::AsymptoteReached { r: step.r1 });
        }
        // Blow-up ceiling on |u|.
        if step.y1[1].abs() > opts.blowup_ceiling {
            let cross = step
                .locate_root(|_, y| y[1].abs() - opts.blowup_ceiling, opts.event_r_tol)
                .map(|(r, _)| r)
                .unwrap_or(step.r1);
            t.events.push(Event::BlowUp { r: cross });
            control = Control::Stop;
        }

        t.params.push(step.r1);
        t.states.push(step.y1);
        t.segments.push(step.clone());
        control
    });
    result?;
    Ok(t)
}

/// First integral of the reduced system. Steady: `H = a h²/2 − u` in raw
/// coordinates. Homothetic cases use normalized coordinates `v = a h`,
/// `w = a u`: shrinking `H = v² − 2w − ln|2w−1|`, expanding
/// `H = v² − 2w + ln|2w+1|`.
pub fn first_integral(spec: &SolitonSpec, state: [f64; 2]) -> Result<f64, SolitonError> {
    let [h, u] = state;
    match spec.epsilon {
        SolitonSign::Steady => Ok(spec.a * h * h / 2.0 - u),
        SolitonSign::Shrinking => {
            let (v, w) = (spec.a * h, spec.a * u);
            let arg = 2.0 * w - 1.0;
            if arg.abs() < 1e-15 {
                return Err(SolitonError::OnSeparatrix(arg));
            }
            Ok(v * v - 2.0 * w - arg.abs().ln())
        }
        SolitonSign::Expanding => {
            let (v, w) = (spec.a * h, spec.a * u);
            let arg = 2.0 * w + 1.0;
            if arg.abs() < 1e-15 {
                return Err(SolitonError::OnSeparatrix(arg));
            }
            Ok(v * v - 2.0 * w + arg.abs().ln())
        }
    }
}

/// Branches of the steady closed form solving `h' = a h²/2 + C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyBranch {
    /// C > 0: `h = √(2C/a) tan(√(aC/2) r)`.
    Tan,
    /// C < 0: `h = −√(−2C/a) tanh(√(−aC/2) r)`; positive for r ≤ 0 and
    /// satisfies the ODE identically (the tanh inner constant is √(−aC/2),
    /// not its reciprocal, and the leading sign follows the lower parabola
    /// branch through the origin).
    Tanh,
    /// C = 0: `h = 1/(D − (a/2) r)`.
    Rational { d: f64 },
}

/// Closed-form solution of the steady profile equation `h' = a h²/2 + C`.
pub fn steady_closed_form(
    a: f64,
    c: f64,
    branch: SteadyBranch,
    r: f64,
) -> Result<f64, SolitonError> {
    match branch {
        SteadyBranch::Tan => {
            if c <= 0.0 {
                return Err(SolitonError::BranchMismatch { c });
            }
            Ok((2.0 * c / a).sqrt() * ((a * c / 2.0).sqrt() * r).tan())
        }
        SteadyBranch::Tanh => {
            if c >= 0.0 {
                return Err(SolitonError::BranchMismatch { c });
            }
            Ok(-(-2.0 * c / a).sqrt() * ((-a * c / 2.0).sqrt() * r).tanh())
        }
        SteadyBranch::Rational { d } => {
            if c != 0.0 {
                return Err(SolitonError::BranchMismatch { c });
            }
            Ok(1.0 / (d - 0.5 * a * r))
        }
    }
}

/// Potential along a trajectory: `f = a ∫ h dr`, `f(r₀) = 0`.
pub fn potential_along(t: &Trajectory) -> Vec<f64> {
    let h: Vec<f64> = t.states.iter().map(|s| s[0]).collect();
    let mut f = fd::cumulative_trapezoid(&t.params, &h);
    for v in &mut f {
        *v *= t.spec.a;
    }
    f
}

/// Curvature along a trajectory: `K = −(a·u + ε/2)` pointwise.
pub fn curvature_along(t: &Trajectory) -> Vec<f64> {
    let half_eps = 0.5 * t.spec.epsilon.epsilon();
    t.states
        .iter()
        .map(|s| -(t.spec.a * s[1] + half_eps))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(eps: i32, a: f64, b: f64) -> SolitonSpec {
        SolitonSpec::new(SolitonSign::from_int(eps).unwrap(), a, b)
    }

    #[test]
    fn rhs_direct_substitution() {
        let s = spec(1, 1.0, 0.0);
        assert_eq!(rhs(&s, [0.0, 0.0]), [0.0, 0.0]);
        assert_eq!(rhs(&s, [1.0, 0.0]), [0.0, 0.5]);
        let s = spec(-1, 1.0, 0.3);
        assert_eq!(rhs(&s, [0.0, 0.3]), [0.3, 0.0]);
        let s = spec(0, 1.0, 0.0);
        assert_eq!(rhs(&s, [2.0, 1.0]), [1.0, 2.0]);
    }

    #[test]
    fn football_orbit_second_crossing() {
        // Cone angles 108° and 183.38°: second crossing near r = 4.56 with
        // slope magnitude 183.38/360.
        let s = spec(-1, 1.0, 0.3);
        let t = integrate_with(
            &s,
            [0.0, 0.3],
            (0.0, 50.0),
            &IntegrateOptions {
                max_tips: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let tips = t.tip_crossings();
        assert_eq!(tips.len(), 1);
        let (big_a, u_a) = tips[0];
        assert!((big_a - 4.56).abs() < 0.02, "A = {big_a}");
        assert!((u_a + 183.38 / 360.0).abs() < 5e-4, "u(A) = {u_a}");
    }

    #[test]
    fn teardrop_orbit_from_smooth_end() {
        let s = spec(-1, 0.8, -1.0);
        let t = integrate_with(
            &s,
            [0.0, -1.0],
            (0.0, 50.0),
            &IntegrateOptions {
                max_tips: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let (big_a, u_a) = t.tip_crossings()[0];
        assert!((big_a - 4.68).abs() < 0.02, "A = {big_a}");
        assert!((u_a.abs() - 169.36 / 360.0).abs() < 5e-4, "u(A) = {u_a}");
    }

    #[test]
    fn cigar_backward_plateau() {
        // Steady, integrated backwards: h rises monotonically to √2, u → 0.
        let s = spec(0, 1.0, -1.0);
        let t = integrate(&s, [0.0, -1.0], (0.0, -12.0), 1e-10).unwrap();
        let [h_end, u_end] = *t.states.last().unwrap();
        assert!((h_end - 2.0_f64.sqrt()).abs() < 1e-6, "h = {h_end}");
        assert!(u_end.abs() < 1e-5);
        for w in t.states.windows(2) {
            assert!(w[1][0] >= w[0][0] - 1e-12, "h not monotone");
        }
        assert!(t.tip_crossings().is_empty());
    }

    #[test]
    fn first_integral_at_origin_and_conservation() {
        let s = spec(-1, 1.0, 0.3);
        assert_eq!(first_integral(&s, [0.0, 0.0]).unwrap(), 0.0);
        let se = spec(1, 1.0, -0.3);
        assert_eq!(first_integral(&se, [0.0, 0.0]).unwrap(), 0.0);

        let t = integrate_with(
            &s,
            [0.0, 0.3],
            (0.0, 50.0),
            &IntegrateOptions {
                max_tips: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let h0 = first_integral(&s, t.states[0]).unwrap();
        let drift = t
            .states
            .iter()
            .map(|&y| (first_integral(&s, y).unwrap() - h0).abs())
            .fold(0.0_f64, f64::max);
        assert!(drift <= 1e-8, "first-integral drift {drift:.2e}");
    }

    #[test]
    fn on_separatrix_detected() {
        let s = spec(-1, 1.0, 0.5);
        assert!(matches!(
            first_integral(&s, [1.0, 0.5]),
            Err(SolitonError::OnSeparatrix(_))
        ));
    }

    #[test]
    fn steady_closed_form_residual_vanishes() {
        // h' = a h²/2 + C must hold identically for each branch.
        let check = |a: f64, c: f64, branch: SteadyBranch, r: f64| {
            let dr = 1e-6;
            let hm = steady_closed_form(a, c, branch, r - dr).unwrap();
            let hp = steady_closed_form(a, c, branch, r + dr).unwrap();
            let h = steady_closed_form(a, c, branch, r).unwrap();
            let lhs = (hp - hm) / (2.0 * dr);
            let rhs = a * h * h / 2.0 + c;
            assert!(
                (lhs - rhs).abs() < 1e-6 * rhs.abs().max(1.0),
                "a={a} c={c} r={r}"
            );
        };
        for r in [-2.0, -1.0, -0.3, 0.4] {
            check(1.0, -1.0, SteadyBranch::Tanh, r);
            check(0.7, -0.4, SteadyBranch::Tanh, r);
            check(1.0, 0.5, SteadyBranch::Tan, 0.3 * r);
            check(1.0, 0.0, SteadyBranch::Rational { d: 1.0 }, r.min(0.0));
        }
    }

    #[test]
    fn steady_closed_form_examples() {
        assert_eq!(
            steady_closed_form(1.0, -1.0, SteadyBranch::Tanh, 0.0).unwrap(),
            0.0
        );
        let h = steady_closed_form(1.0, 0.0, SteadyBranch::Rational { d: 1.0 }, 1.0).unwrap();
        assert!((h - 2.0).abs() < 1e-14); // 1/(1 - 1/2)
        assert!(matches!(
            steady_closed_form(1.0, 1.0, SteadyBranch::Tanh, 0.5),
            Err(SolitonError::BranchMismatch { .. })
        ));
        assert!(matches!(
            steady_closed_form(1.0, -1.0, SteadyBranch::Tan, 0.5),
            Err(SolitonError::BranchMismatch { .. })
        ));
    }

    #[test]
    fn potential_of_flat_shrinking_separatrix() {
        // h = r/(2a) on the shrinking separatrix gives f = r²/4.
        let a = 0.8;
        let s = spec(-1, a, 1.0 / (2.0 * a));
        let t = integrate(&s, [0.0, 1.0 / (2.0 * a)], (0.0, 5.0), 1e-11).unwrap();
        let f = potential_along(&t);
        for (i, &r) in t.params.iter().enumerate() {
            assert!((f[i] - r * r / 4.0).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn potential_vanishes_in_constant_curvature_limit() {
        // a = 0: no gradient, f ≡ 0.
        let s = SolitonSpec::new(SolitonSign::Shrinking, 0.0, 0.3);
        let t = integrate(&s, [0.0, 0.3], (0.0, 4.0), 1e-10).unwrap();
        assert!(potential_along(&t).iter().all(|&f| f == 0.0));
    }

    #[test]
    fn potential_monotone_where_h_positive() {
        let s = spec(-1, 1.0, 0.3);
        let t = integrate_with(
            &s,
            [0.0, 0.3],
            (0.0, 50.0),
            &IntegrateOptions {
                max_tips: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let f = potential_along(&t);
        for i in 1..f.len() {
            assert!(f[i] >= f[i - 1] - 1e-12);
        }
    }

    #[test]
    fn curvature_along_named_lines() {
        // Shrinking separatrix u = 1/(2a): flat. Cigar tip u(0) = −1: K = 1.
        let a = 0.7;
        let s = spec(-1, a, 1.0 / (2.0 * a));
        let t = integrate(&s, [0.0, 1.0 / (2.0 * a)], (0.0, 3.0), 1e-10).unwrap();
        for k in curvature_along(&t) {
            assert!(k.abs() < 1e-9);
        }
        let s = spec(0, 1.0, -1.0);
        let t = integrate(&s, [0.0, -1.0], (0.0, -1.0), 1e-10).unwrap();
        assert!((curvature_along(&t)[0] - 1.0).abs() < 1e-12);
        // Expanding isocline u = −1/(2a): flat.
        let s = spec(1, a, -1.0 / (2.0 * a));
        let t = integrate(&s, [0.0, -1.0 / (2.0 * a)], (0.0, -3.0), 1e-10).unwrap();
        for k in curvature_along(&t) {
            assert!(k.abs() < 1e-9);
        }
    }

    #[test]
    fn blowup_terminates_cleanly() {
        // Steady with b > 0 runs away; the ceiling must stop it.
        let s = spec(0, 1.0, 0.5);
        let t = integrate_with(
            &s,
            [0.0, 0.5],
            (0.0, 100.0),
            &IntegrateOptions {
                blowup_ceiling: 1e4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(t.events.last(), Some(Event::BlowUp { .. })));
        assert!(t.params.last().unwrap() < &100.0);
    }

    #[test]
    fn even_derivatives_vanish_at_tip() {
        // 5-point fit of h near the tip: |h''(0)| at fit-noise level.
        for (eps, a, b) in [(-1, 1.0, 0.3), (0, 1.0, -1.0), (1, 0.75, -0.25)] {
            let s = spec(eps, a, b);
            let t = integrate(&s, [0.0, b], (0.0, 0.5), 1e-12).unwrap();
            let dr = 0.05;
            let xs: Vec<f64> = (0..5).map(|j| j as f64 * dr).collect();
            let hs: Vec<f64> = xs.iter().map(|&r| t.eval(r)[0]).collect();
            let w = fd::fd_weights(0.0, &xs, 2);
            let h2 = fd::apply(&w, &hs);
            // Fit noise: dense-output error (≈10·tol) times the weight mass,
            // plus the r³ truncation term of the quadratic-degree fit.
            let wsum: f64 = w.iter().map(|x| x.abs()).sum();
            let noise = wsum * 10.0 * 1e-12 + dr.powi(3);
            assert!(
                h2.abs() <= 10.0 * noise,
                "eps={eps}: h''(0) = {h2:.2e}, noise {noise:.2e}"
            );
        }
    }

    #[test]
    fn scaling_covariance_to_normalized_system() {
        // (ε, a, b) and (ε, 1, a·b) produce identical normalized trajectories.
        let a = 0.8;
        let b = 0.3;
        let s1 = spec(-1, a, b);
        let s2 = spec(-1, 1.0, a * b);
        let t1 = integrate(&s1, [0.0, b], (0.0, 3.0), 1e-11).unwrap();
        let t2 = integrate(&s2, [0.0, a * b], (0.0, 3.0), 1e-11).unwrap();
        for &r in &[0.5, 1.0, 2.0, 3.0] {
            let y1 = t1.eval(r);
            let y2 = t2.eval(r);
            assert!((a * y1[0] - y2[0]).abs() < 1e-8, "v mismatch at r={r}");
            assert!((a * y1[1] - y2[1]).abs() < 1e-8, "w mismatch at r={r}");
        }
    }
}
