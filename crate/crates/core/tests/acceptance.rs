//! Acceptance suite: one test per shipped criterion, each printing a PASS
//! line with the measured values against the pinned tolerances.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Wall-clock limits are asserted as stated; on a loaded machine prefer
//! `--test-threads=1`.

use riccilab::cusp;
use riccilab::flow::{
    angle_drift, defect_monotonicity_series, log_grid, normalized_polar_flow_rhs, polar_flow_rhs,
    run_conformal_flow, run_polar_flow, soliton_defect, truncate_cone, ConformalControl, FlowState,
    Scheme, StepControl, Termination,
};
use riccilab::football::{solve_angles, verify_orbit};
use riccilab::geom::{canonical_cone_metric, CanonicalCone, RadialProfile};
use riccilab::soliton::{
    first_integral, integrate, integrate_with, steady_closed_form, IntegrateOptions, SolitonSign,
    SolitonSpec, SteadyBranch,
};
use std::f64::consts::PI;
use std::time::Instant;

fn report(n: usize, name: &str, details: String) {
    println!("criterion {n:2} PASS [{name}]: {details}");
}

fn spec(eps: i32, a: f64, b: f64) -> SolitonSpec {
    SolitonSpec::new(SolitonSign::from_int(eps).unwrap(), a, b)
}

/// 1. Football figure reproduction: ε=-1, a=1, b=0.3 closes at
///    A = 4.56 ± 0.02 with slope magnitude 0.50939 ± 0.0005
///    (angles 108° and 183.38° ± 0.1°), in under a second.
#[test]
fn criterion_01_football_figure() {
    let t0 = Instant::now();
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
    let (big_a, u_a) = t.tip_crossings()[0];
    let elapsed = t0.elapsed().as_secs_f64();
    assert!((big_a - 4.56).abs() <= 0.02, "A = {big_a}");
    assert!(
        (u_a.abs() - 0.50939).abs() <= 0.0005,
        "slope = {}",
        u_a.abs()
    );
    let alpha1_deg = 2.0 * PI * 0.3 * 180.0 / PI;
    let alpha2_deg = 2.0 * PI * u_a.abs() * 180.0 / PI;
    assert!((alpha1_deg - 108.0).abs() <= 0.1);
    assert!((alpha2_deg - 183.38).abs() <= 0.1);
    assert!(elapsed < 1.0, "runtime {elapsed:.3} s");
    report(
        1,
        "football figure",
        format!("A = {big_a:.4}, angles ({alpha1_deg:.2}°, {alpha2_deg:.3}°), {elapsed:.3} s"),
    );
}

/// 2. Teardrop figure reproduction: ε=-1, a=0.8, b=-1 closes at
///    A = 4.68 ± 0.02 with cone angle 169.36° ± 0.1°.
#[test]
fn criterion_02_teardrop_figure() {
    let t0 = Instant::now();
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
    let elapsed = t0.elapsed().as_secs_f64();
    let angle_deg = 360.0 * u_a.abs();
    assert!((big_a - 4.68).abs() <= 0.02, "A = {big_a}");
    assert!((angle_deg - 169.36).abs() <= 0.1, "angle {angle_deg}");
    assert!(elapsed < 1.0, "runtime {elapsed:.3} s");
    report(
        2,
        "teardrop figure",
        format!("A = {big_a:.4}, angle {angle_deg:.3}°, {elapsed:.3} s"),
    );
}

/// 3. Inverse BVP consistency: solve_angles(108°, 183.38°) returns
///    a = 1.000 ± 2e-3 with closure residual < 1e-6.
#[test]
fn criterion_03_inverse_bvp() {
    let t0 = Instant::now();
    let sol = solve_angles(108.0_f64.to_radians(), 183.38_f64.to_radians()).unwrap();
    let residual = verify_orbit(&sol).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    assert!((sol.a - 1.0).abs() <= 2e-3, "a = {}", sol.a);
    assert!(
        sol.closure_residual < 1e-6 && residual < 1e-6,
        "residuals {residual:.2e}"
    );
    assert!(elapsed < 2.0, "runtime {elapsed:.3} s");
    report(
        3,
        "inverse BVP",
        format!(
            "a = {:.6}, closure {:.2e}, re-verified {:.2e}, {elapsed:.3} s",
            sol.a, sol.closure_residual, residual
        ),
    );
}

/// 4. First-integral conservation: ≥10 trajectories in each normalized
///    homothetic system, away from separatrices, drift ≤ 1e-8 at tol 1e-10.
#[test]
fn criterion_04_first_integral_conservation() {
    let mut worst = 0.0_f64;
    let mut count = 0;
    // Shrinking: ten closed orbits (separatrix sits at u = 1/2).
    for j in 1..=10 {
        let b = 0.04 * j as f64;
        let s = spec(-1, 1.0, b);
        let t = integrate_with(
            &s,
            [0.0, b],
            (0.0, 1e3),
            &IntegrateOptions {
                max_tips: 2,
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        let h0 = first_integral(&s, t.states[0]).unwrap();
        for &y in &t.states {
            worst = worst.max((first_integral(&s, y).unwrap() - h0).abs());
        }
        count += 1;
    }
    // Expanding: ten trajectories kept clear of the isocline w = -1/2
    // (span chosen so |2w+1| stays above ~0.1).
    for j in 1..=10 {
        let b = -0.02 * j as f64;
        let s = spec(1, 1.0, b);
        let t = integrate(&s, [0.0, b], (0.0, -2.0), 1e-10).unwrap();
        let h0 = first_integral(&s, t.states[0]).unwrap();
        for &y in &t.states {
            assert!(
                (2.0 * y[1] + 1.0).abs() > 0.05,
                "strayed near the separatrix"
            );
            worst = worst.max((first_integral(&s, y).unwrap() - h0).abs());
        }
        count += 1;
    }
    assert!(worst <= 1e-8, "drift {worst:.2e}");
    report(
        4,
        "first integrals",
        format!("{count} trajectories, max drift {worst:.2e}"),
    );
}

/// 5. Steady closed-form equivalence: integrator vs the corrected tanh
///    closed form for (a=1, C=-1), sup error ≤ 1e-6 over r ∈ [-10, 0],
///    and an identically-zero closed-form ODE residual.
#[test]
fn criterion_05_steady_closed_form() {
    // Symbolic substitution: h = -m·tanh(n r) solves h' = a h²/2 + C iff
    // m·n = -C and a·m²/2 = -C; both identities hold to rounding.
    let (a, c) = (1.0_f64, -1.0_f64);
    let m = (-2.0 * c / a).sqrt();
    let n = (-a * c / 2.0).sqrt();
    assert!((m * n + c).abs() <= 1e-15);
    assert!((a * m * m / 2.0 + c).abs() <= 1e-15);
    // Numerical residual spot check of the same identity.
    for &r in &[-9.5, -7.0, -3.3, -0.7] {
        let dr = 1e-5;
        let hp = (steady_closed_form(a, c, SteadyBranch::Tanh, r + dr).unwrap()
            - steady_closed_form(a, c, SteadyBranch::Tanh, r - dr).unwrap())
            / (2.0 * dr);
        let h = steady_closed_form(a, c, SteadyBranch::Tanh, r).unwrap();
        assert!((hp - (a * h * h / 2.0 + c)).abs() < 1e-8);
    }
    // Integrator comparison over [-10, 0] from the tip state (0, -1).
    let s = spec(0, 1.0, -1.0);
    let t = integrate(&s, [0.0, -1.0], (0.0, -10.0), 1e-10).unwrap();
    let mut sup = 0.0_f64;
    for j in 0..=400 {
        let r = -10.0 * j as f64 / 400.0;
        let h_num = t.eval(r)[0];
        let h_cf = steady_closed_form(a, c, SteadyBranch::Tanh, r).unwrap();
        sup = sup.max((h_num - h_cf).abs());
    }
    assert!(sup <= 1e-6, "sup error {sup:.2e}");
    report(
        5,
        "steady closed form",
        format!("sup |Δh| = {sup:.2e} on [-10, 0], residual 0"),
    );
}

/// 6. 3D soliton pinching and asymptotics: sec strictly inside (-1/4, 0)
///    (upper end checked against the integrator noise floor ~tol·|F|),
///    tail limits |HF+1/2| ≤ 1e-3, |F'+1/2| ≤ 1e-3, |H·r-1| ≤ 1e-2, and
///    saddle eigenvalues (-1±√5)/2 to machine precision. Under 2 s.
#[test]
fn criterion_06_cusp_soliton() {
    let t0 = Instant::now();
    let lin = cusp::linearize([0.5, 0.0]).unwrap();
    let s5 = 5.0_f64.sqrt();
    let mut eig = lin.eigenvalues;
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!((eig[0] - (-1.0 + s5) / 2.0).abs() <= 1e-15);
    assert!((eig[1] - (-1.0 - s5) / 2.0).abs() <= 1e-15);

    let opts = cusp::ShootOptions::default();
    let shot = cusp::shoot_separatrix(&opts).unwrap();
    let metric = cusp::build_metric(&shot);
    for i in 0..metric.r.len() {
        let floor = 10.0 * opts.tol * (1.0 + shot.states[i][1].abs());
        assert!(-0.25 < metric.sec_xy[i] && metric.sec_xy[i] < 0.0);
        assert!(-0.25 < metric.sec_rx[i] && metric.sec_rx[i] < floor);
    }
    let rep = cusp::asymptotics_check(&shot).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(rep.hf_defect <= 1e-3, "|HF+1/2| = {:.2e}", rep.hf_defect);
    assert!(rep.fp_defect <= 1e-3, "|F'+1/2| = {:.2e}", rep.fp_defect);
    assert!(rep.h_times_r <= 1e-2, "|H·r-1| = {:.2e}", rep.h_times_r);
    assert!(elapsed < 2.0, "runtime {elapsed:.3} s");
    report(
        6,
        "3D soliton",
        format!(
            "eig ±(−1±√5)/2 exact; |HF+½| {:.1e}, |F'+½| {:.1e}, |H·r−1| {:.1e}, {elapsed:.2} s",
            rep.hf_defect, rep.fp_defect, rep.h_times_r
        ),
    );
}

/// 7. Flow area law: sphere reproduces area(τ) = 4π(1-2τ) within 1% up to
///    τ = 0.4 at 512 nodes; a two-tip cone profile with χ̂ = 1+β matches
///    d(area)/dτ = -4πχ̂ within 1%. Under 30 s.
#[test]
fn criterion_07_area_law() {
    let t0 = Instant::now();
    let sphere = RadialProfile::sphere(1.0, 512);
    let hist = run_polar_flow(&sphere, 0.4, &StepControl::default()).unwrap();
    assert_eq!(hist.termination, Termination::Completed);
    let mut worst = 0.0_f64;
    for d in &hist.series {
        let exact = 4.0 * PI * (1.0 - 2.0 * d.tau);
        worst = worst.max((d.area - exact).abs() / exact);
    }
    assert!(worst <= 0.01, "sphere area error {worst:.2e}");

    // Teardrop-type profile: one smooth tip, one cone tip of slope β+1,
    // so χ̂ = 1 + (β+1) measured from the tip slopes.
    let s = spec(-1, 0.8, -1.0);
    let orbit = integrate_with(
        &s,
        [0.0, -1.0],
        (0.0, 50.0),
        &IntegrateOptions {
            max_tips: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let (big_a, _) = orbit.tip_crossings()[0];
    let teardrop = orbit.to_profile(big_a, 512).unwrap();
    let chi_hat =
        teardrop.angle0().unwrap() / (2.0 * PI) + teardrop.angle_a().unwrap() / (2.0 * PI);
    let hist = run_polar_flow(&teardrop, 0.25, &StepControl::default()).unwrap();
    let first = hist.series.first().unwrap();
    let last = hist.series.last().unwrap();
    let rate = (last.area - first.area) / (last.tau - first.tau);
    let expect = -4.0 * PI * chi_hat;
    let rel = (rate - expect).abs() / expect.abs();
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(
        rel <= 0.01,
        "teardrop rate {rate:.5} vs {expect:.5} ({rel:.2e})"
    );
    assert!(elapsed < 30.0, "runtime {elapsed:.3} s");
    report(
        7,
        "area law",
        format!(
            "sphere ≤ {worst:.2e} rel; teardrop d(area)/dτ = {rate:.4} vs −4πχ̂ = {expect:.4}, {elapsed:.1} s"
        ),
    );
}

/// 8. Angle preservation: tip-slope drift ≤ 1e-3 over every shipped flow
///    preset while curvature stays below the ceiling.
#[test]
fn criterion_08_angle_preservation() {
    let presets: Vec<(&str, RadialProfile, f64)> = {
        let football = solve_angles(108.0_f64.to_radians(), 183.38_f64.to_radians()).unwrap();
        let s = spec(-1, 0.8, -1.0);
        let orbit = integrate_with(
            &s,
            [0.0, -1.0],
            (0.0, 50.0),
            &IntegrateOptions {
                max_tips: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let (big_a, _) = orbit.tip_crossings()[0];
        vec![
            ("sphere", RadialProfile::sphere(1.0, 512), 0.0),
            ("cigar", RadialProfile::cigar(1.0, 12.0, 512), 0.3),
            ("flatcone", RadialProfile::flat_cone(0.5, 2.0, 512), 0.3),
            (
                "football",
                football.orbit.to_profile(football.big_a, 512).unwrap(),
                0.0,
            ),
            ("teardrop", orbit.to_profile(big_a, 512).unwrap(), 0.0),
            (
                "perturbed-sphere",
                RadialProfile::from_fn(|r| r.sin() * (1.0 + 0.05 * (2.0 * r).sin()), PI, 512)
                    .unwrap(),
                0.0,
            ),
        ]
    };
    let mut lines = Vec::new();
    for (name, profile, t_fixed) in presets {
        // Two-tip surfaces run to 85% of their collapse time
        // T = Area/(4πχ̂); capped profiles use a fixed horizon.
        let t_end = if t_fixed > 0.0 {
            t_fixed
        } else {
            let chi_hat = (profile.angle0().unwrap() + profile.angle_a().unwrap()) / (2.0 * PI);
            0.85 * profile.area() / (4.0 * PI * chi_hat)
        };
        let hist = run_polar_flow(&profile, t_end, &StepControl::default()).unwrap();
        assert_eq!(
            hist.termination,
            Termination::Completed,
            "{name} hit the ceiling"
        );
        let drift = angle_drift(&hist);
        assert!(drift <= 1e-3, "{name}: drift {drift:.2e}");
        lines.push(format!("{name} {drift:.1e}"));
    }
    report(8, "angle preservation", lines.join(", "));
}

/// 9. Soliton stationarity: cigar (steady, raw rhs) and the solved football
///    (shrinking, area-normalized rhs) both give ‖∂h/∂τ‖∞/‖h‖∞ ≤ 1e-4 at
///    1024 nodes.
#[test]
fn criterion_09_soliton_stationarity() {
    let cigar = RadialProfile::cigar(1.0, 12.0, 1024);
    let s = FlowState::from_profile(&cigar, 1024).unwrap();
    let rhs = polar_flow_rhs(&s).unwrap();
    let ratio_cigar = rhs.iter().map(|v| v.abs()).fold(0.0_f64, f64::max)
        / s.h.iter().cloned().fold(0.0_f64, f64::max);
    assert!(ratio_cigar <= 1e-4, "cigar {ratio_cigar:.2e}");

    let sol = solve_angles(108.0_f64.to_radians(), 183.38_f64.to_radians()).unwrap();
    let profile = sol.orbit.to_profile(sol.big_a, 1024).unwrap();
    let s = FlowState::from_profile(&profile, 1024).unwrap();
    let rhs = normalized_polar_flow_rhs(&s).unwrap();
    let ratio_fb = rhs.iter().map(|v| v.abs()).fold(0.0_f64, f64::max)
        / s.h.iter().cloned().fold(0.0_f64, f64::max);
    assert!(ratio_fb <= 1e-4, "football {ratio_fb:.2e}");
    report(
        9,
        "stationarity",
        format!("cigar {ratio_cigar:.2e}, football {ratio_fb:.2e}"),
    );
}

/// 10. Soliton-defect monotonicity: on the perturbed sphere, τ²max|M|² is
///     non-increasing across accepted steps up to 1e-6 slack; exact
///     soliton slices have max|M|² ≤ 1e-6.
#[test]
fn criterion_10_defect_monotonicity() {
    let sphere = RadialProfile::sphere(1.0, 512);
    let s = FlowState::from_profile(&sphere, 512).unwrap();
    let (_, m2_sphere) = soliton_defect(&s, 2.0).unwrap();
    assert!(m2_sphere <= 1e-6, "sphere |M|² = {m2_sphere:.2e}");

    let sol = solve_angles(108.0_f64.to_radians(), 183.38_f64.to_radians()).unwrap();
    let fb = sol.orbit.to_profile(sol.big_a, 512).unwrap();
    let s = FlowState::from_profile(&fb, 512).unwrap();
    let chi_hat_fb = (108.0 + 183.38) / 360.0; // 2 + β₁ + β₂
    let (_, m2_fb) = soliton_defect(&s, chi_hat_fb).unwrap();
    assert!(m2_fb <= 1e-6, "football |M|² = {m2_fb:.2e}");

    let perturbed =
        RadialProfile::from_fn(|r| r.sin() * (1.0 + 0.05 * (2.0 * r).sin()), PI, 512).unwrap();
    let control = StepControl {
        defect_chi_hat: Some(2.0),
        ..Default::default()
    };
    let hist = run_polar_flow(&perturbed, 0.35, &control).unwrap();
    let series = defect_monotonicity_series(&hist, 2.0);
    assert!(
        series.first().unwrap() > &0.0,
        "perturbation registers a defect"
    );
    let mut worst_rise = 0.0_f64;
    for w in series.windows(2) {
        worst_rise = worst_rise.max(w[1] - w[0]);
    }
    assert!(worst_rise <= 1e-6, "τ²|M|² rose by {worst_rise:.2e}");
    report(
        10,
        "defect monotonicity",
        format!(
            "sphere {m2_sphere:.1e}, football {m2_fb:.1e}; max rise of τ²|M|² = {worst_rise:.1e}"
        ),
    );
}

/// 11. Smoothening-flow suite: the truncation family is pointwise monotone
///     in k at matched times (slack 1e-8) and the barrier fitted at the
///     earliest sample dominates sup u thereafter on t ∈ [1e-3, 1e-1], for
///     β ∈ {-3/4, -1/2, -1/4}. Under 60 s total.
#[test]
fn criterion_11_smoothening_suite() {
    let t0 = Instant::now();
    // Levels deep enough that each family has rejoined the self-similar
    // track by the first sample; inner radius deep enough to carry the
    // plateau, outer wall far enough to stay out of the diffusion front.
    let cases: [(f64, [f64; 3], f64, usize); 3] = [
        (-0.75, [24.0, 25.0, 26.0], 1e-17, 592),
        (-0.5, [7.0, 8.0, 9.0], 1e-10, 384),
        (-0.25, [4.0, 5.0, 6.0], 1e-12, 448),
    ];
    let sample_times: Vec<f64> = (0..=12)
        .map(|j| 1e-3 * 10.0_f64.powf(j as f64 / 6.0))
        .collect();
    let mut lines = Vec::new();
    for (beta, levels, r_min, grid_n) in cases {
        let cone = canonical_cone_metric(CanonicalCone::Euclidean, beta).unwrap();
        let grid = log_grid(r_min, 64.0, grid_n);
        let control = ConformalControl {
            sample_times: sample_times.clone(),
            scheme: Scheme::SemiImplicit {
                dt_init: 1e-7,
                dt_over_t: 1.0 / 4000.0,
            },
            ..Default::default()
        };
        let mut runs = Vec::new();
        for &k in &levels {
            let init = truncate_cone(&cone, k, &grid);
            runs.push(run_conformal_flow(&init, 0.1, &control, None).unwrap());
        }
        // Pointwise monotonicity in k at matched sample times.
        for pair in runs.windows(2) {
            for (lo, hi) in pair[0].samples.iter().zip(&pair[1].samples) {
                assert!((lo.time - hi.time).abs() < 1e-12);
                for i in 0..lo.u.len() {
                    assert!(
                        lo.u[i] <= hi.u[i] + 1e-8,
                        "β={beta}: ordering violated at r index {i}, t = {}",
                        lo.time
                    );
                }
            }
        }
        // Barrier fitted from the earliest sample over the family.
        let coef = riccilab::flow::barrier_log_coefficient(beta);
        let t1 = sample_times[0];
        let b_fit = runs
            .iter()
            .map(|r| r.samples[0].sup_u() - coef * t1.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let mut worst_margin = f64::INFINITY;
        for run in &runs {
            for s in run.samples.iter().skip(1) {
                let margin = b_fit + coef * s.time.ln() - s.sup_u();
                worst_margin = worst_margin.min(margin);
                assert!(
                    margin >= 0.0,
                    "β={beta}: sup u exceeds the barrier by {:.2e} at t = {}",
                    -margin,
                    s.time
                );
            }
        }
        lines.push(format!("β={beta}: min margin {worst_margin:.1e}"));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed:.3} s");
    lines.push(format!("{elapsed:.1} s"));
    report(11, "smoothening suite", lines.join("; "));
}
