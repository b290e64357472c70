//! Command-line experiments over the soliton/flow library. Every
//! subcommand writes deterministic files (CSV/JSON/OBJ) into the output
//! directory and prints a one-line summary.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical termination
//! (singularity stop or unclassifiable trajectory).

use clap::{Args, Parser, Subcommand};
use riccilab::flow::{
    angle_drift, run_conformal_flow, run_polar_flow, truncate_cone, ConformalControl, FlowHistory,
    Scheme, StepControl, Termination,
};
use riccilab::football::{solve_angles, verify_orbit};
use riccilab::geom::{canonical_cone_metric, embed_profile, CanonicalCone, RadialProfile};
use riccilab::soliton::{
    classify, integrate_with, phase_portrait, IntegrateOptions, PortraitOptions, SolitonSign,
    SolitonSpec,
};
use riccilab::{cusp, io};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "riccilab",
    version,
    about = "Gradient Ricci solitons and flows on surfaces"
)]
struct Cli {
    /// Output directory (falls back to $RICCILAB_OUT, then "./out").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Soliton sign ε: -1 shrinking, 0 steady, 1 expanding.
    #[arg(long, allow_hyphen_values = true)]
    eps: i32,
    /// Gradient constant (f' = a·h).
    #[arg(long)]
    a: f64,
    /// Initial tip slope b = h'(0); cone angle 2π|b|.
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the trajectory (ε, a, b) and write its curve.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Integration tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Solve the two-angle football boundary-value problem.
    Football {
        /// First cone angle in degrees.
        #[arg(long)]
        a1: f64,
        /// Second cone angle in degrees.
        #[arg(long)]
        a2: f64,
    },
    /// Evolve a radial profile by the angle-preserving flow.
    Flow {
        /// One of: sphere, cigar, flatcone:BETA, football:A1,A2 (degrees),
        /// teardrop:A,B, perturbed-sphere.
        #[arg(long)]
        preset: String,
        /// Final time.
        #[arg(long, default_value_t = 0.25)]
        t_end: f64,
        #[arg(long, default_value_t = 512)]
        grid_n: usize,
        /// Δτ = cfl·(Δρ)²; explicit stability needs cfl ≤ 0.5.
        #[arg(long, default_value_t = 0.25)]
        cfl: f64,
        /// Record a slice every this many accepted steps.
        #[arg(long, default_value_t = 2048)]
        record_every: usize,
    },
    /// Truncate a cone's conformal factor and flow the family.
    Smooth {
        /// Cone exponent β ∈ (-1, 0).
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Truncation levels, comma separated.
        #[arg(long, default_value = "7.0,8.0,9.0")]
        levels: String,
        #[arg(long, default_value_t = 1e-1)]
        t_end: f64,
        #[arg(long, default_value_t = 384)]
        grid_n: usize,
        /// Inner radius of the log grid.
        #[arg(long, default_value_t = 1e-10)]
        r_min: f64,
        /// Outer radius (the cone model extends past the unit disc; a far
        /// wall keeps the frozen boundary out of the diffusion front).
        #[arg(long, default_value_t = 64.0)]
        r_max: f64,
    },
    /// Shoot the 3D expanding soliton separatrix and report asymptotics.
    Cusp3d {
        /// Offset from the saddle along the unstable eigenvector.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Forward shoot stops when H drops below this.
        #[arg(long, default_value_t = 1e-4)]
        h_stop: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Integrate a soliton trajectory and export the revolution mesh.
    Embed {
        #[command(flatten)]
        spec: SpecArgs,
        /// Meridian arc length to integrate.
        #[arg(long, default_value_t = 4.56)]
        big_a: f64,
        /// Radial samples along the meridian.
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Angular segments of the mesh.
        #[arg(long, default_value_t = 64)]
        angular: usize,
    },
    /// Assemble the phase portrait bundle for sign ε and constant a.
    Portrait {
        /// Soliton sign ε: -1 shrinking, 0 steady, 1 expanding.
        #[arg(long, allow_hyphen_values = true)]
        eps: i32,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Worker threads for the trajectory sweep.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Separatrix shooting offset.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help/version requests are success; anything else is usage.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let out = cli
        .out
        .or_else(|| std::env::var_os("RICCILAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("cannot create output directory {}: {e}", out.display());
        return ExitCode::from(1);
    }
    match run(cli.command, &out) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn sign_of(eps: i32) -> Result<SolitonSign, String> {
    SolitonSign::from_int(eps).ok_or_else(|| format!("eps must be -1, 0 or 1, got {eps}"))
}

fn run(cmd: Command, out: &Path) -> Result<ExitCode, String> {
    match cmd {
        Command::Classify { spec, tol } => {
            let s = SolitonSpec::new(sign_of(spec.eps)?, spec.a, spec.b);
            let t = integrate_with(
                &s,
                [0.0, spec.b],
                (0.0, 30.0),
                &IntegrateOptions {
                    tol,
                    max_tips: 2,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            io::write_trajectory_csv(&out.join("classify_trajectory.csv"), &t)
                .map_err(|e| e.to_string())?;
            match classify(&s) {
                Ok(family) => {
                    println!("{family}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("unclassifiable: {e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Football { a1, a2 } => {
            let sol = solve_angles(a1.to_radians(), a2.to_radians()).map_err(|e| e.to_string())?;
            let resid = verify_orbit(&sol).map_err(|e| e.to_string())?;
            let orbit_csv = "football_orbit.csv";
            io::write_trajectory_csv(&out.join(orbit_csv), &sol.orbit)
                .map_err(|e| e.to_string())?;
            let json = io::football_json(&sol, orbit_csv);
            std::fs::write(out.join("football.json"), &json).map_err(|e| e.to_string())?;
            if sol.a == 0.0 {
                println!(
                    "equal angles: constant-curvature spherical football (a = 0 sentinel), A = {:.6}",
                    sol.big_a
                );
            } else {
                println!(
                    "a = {:.6}, A = {:.6}, closure residual {:.3e} (re-verified {:.3e})",
                    sol.a, sol.big_a, sol.closure_residual, resid
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Flow {
            preset,
            t_end,
            grid_n,
            cfl,
            record_every,
        } => {
            let profile = preset_profile(&preset, grid_n)?;
            let control = StepControl {
                cfl,
                grid_n,
                record_every,
                defect_chi_hat: preset_chi_hat(&preset, &profile),
                ..Default::default()
            };
            let hist = run_polar_flow(&profile, t_end, &control).map_err(|e| e.to_string())?;
            write_flow_outputs(out, &hist, &preset, grid_n, cfl, t_end)?;
            let drift = angle_drift(&hist);
            match hist.termination {
                Termination::Completed => {
                    println!(
                        "completed to tau = {:.6}; area = {:.6e}; tip-slope drift {:.3e}",
                        hist.series.last().unwrap().tau,
                        hist.series.last().unwrap().area,
                        drift
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Termination::SingularityDetected { max_abs_k, area } => {
                    println!(
                        "singularity at tau = {:.6}: max|K| = {max_abs_k:.3e}, area = {area:.3e}",
                        hist.series.last().unwrap().tau
                    );
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Smooth {
            beta,
            levels,
            t_end,
            grid_n,
            r_min,
            r_max,
        } => {
            if !(-1.0 < beta && beta < 0.0) {
                return Err(format!("beta must lie in (-1, 0), got {beta}"));
            }
            let levels: Vec<f64> = levels
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("bad level {s}: {e}"))
                })
                .collect::<Result<_, _>>()?;
            let cone =
                canonical_cone_metric(CanonicalCone::Euclidean, beta).map_err(|e| e.to_string())?;
            let grid = riccilab::flow::log_grid(r_min, r_max, grid_n);
            let sample_times: Vec<f64> = (0..=12)
                .map(|j| 1e-3 * 10.0_f64.powf(j as f64 / 6.0))
                .filter(|t| *t <= t_end)
                .collect();
            let control = ConformalControl {
                sample_times: sample_times.clone(),
                scheme: Scheme::SemiImplicit {
                    dt_init: 1e-7,
                    dt_over_t: 1.0 / 4000.0,
                },
                ..Default::default()
            };
            let mut rows = Vec::new();
            for &k in &levels {
                let init = truncate_cone(&cone, k, &grid);
                let hist =
                    run_conformal_flow(&init, t_end, &control, None).map_err(|e| e.to_string())?;
                for (i, s) in hist.samples.iter().enumerate() {
                    let name = format!("smooth_k{k:.2}_t{i:02}.csv");
                    io::write_conformal_csv(&out.join(&name), s).map_err(|e| e.to_string())?;
                }
                let sups: Vec<f64> = hist.samples.iter().map(|s| s.sup_u()).collect();
                rows.push((k, sups));
            }
            let summary = smooth_summary_json(beta, &sample_times, &rows);
            std::fs::write(out.join("smooth_summary.json"), summary).map_err(|e| e.to_string())?;
            println!(
                "flowed {} truncation levels to t = {t_end}; sup-u summary in smooth_summary.json",
                levels.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Cusp3d { delta, h_stop, tol } => {
            let lin = cusp::linearize([0.5, 0.0]).map_err(|e| e.to_string())?;
            let shot = cusp::shoot_separatrix(&cusp::ShootOptions {
                delta,
                h_stop,
                tol,
                ..Default::default()
            })
            .map_err(|e| e.to_string())?;
            let metric = cusp::build_metric(&shot);
            let rep = cusp::asymptotics_check(&shot).map_err(|e| e.to_string())?;
            let csv = "cusp3d.csv";
            io::write_cusp_csv(&out.join(csv), &shot, &metric).map_err(|e| e.to_string())?;
            std::fs::write(
                out.join("cusp3d.json"),
                io::cusp_report_json(&lin, &rep, &metric, csv),
            )
            .map_err(|e| e.to_string())?;
            println!(
                "eigenvalues ({:.12}, {:.12}); tail |HF+1/2| = {:.3e}, |F'+1/2| = {:.3e}",
                lin.eigenvalues[0], lin.eigenvalues[1], rep.hf_defect, rep.fp_defect
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed {
            spec,
            big_a,
            n,
            angular,
        } => {
            let s = SolitonSpec::new(sign_of(spec.eps)?, spec.a, spec.b);
            let t = integrate_with(
                &s,
                [0.0, spec.b],
                (0.0, big_a),
                &IntegrateOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            let profile = t.to_profile(big_a, n).map_err(|e| e.to_string())?;
            let emb = embed_profile(&profile).map_err(|e| e.to_string())?;
            io::write_obj(&out.join("embed.obj"), &emb, angular).map_err(|e| e.to_string())?;
            println!("wrote embed.obj ({} rings x {} segments)", n, angular);
            Ok(ExitCode::SUCCESS)
        }
        Command::Portrait {
            eps,
            a,
            jobs,
            delta,
        } => {
            let sign = sign_of(eps)?;
            let opts = PortraitOptions {
                jobs,
                delta,
                ..Default::default()
            };
            let p = phase_portrait(sign, a, &opts).map_err(|e| e.to_string())?;
            let mut traj_files = Vec::new();
            for (i, t) in p.trajectories.iter().enumerate() {
                let name = format!("portrait_traj_{i:02}.csv");
                io::write_trajectory_csv(&out.join(&name), t).map_err(|e| e.to_string())?;
                traj_files.push(name);
            }
            let mut sep_files = Vec::new();
            for (i, t) in p.separatrices.iter().enumerate() {
                let name = format!("portrait_sep_{i:02}.csv");
                io::write_trajectory_csv(&out.join(&name), t).map_err(|e| e.to_string())?;
                sep_files.push(name);
            }
            std::fs::write(
                out.join("portrait.json"),
                io::portrait_json(&p, &traj_files, &sep_files),
            )
            .map_err(|e| e.to_string())?;
            println!(
                "portrait with {} trajectories, {} separatrices",
                traj_files.len(),
                sep_files.len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Build the initial profile for a flow preset.
fn preset_profile(preset: &str, n: usize) -> Result<RadialProfile, String> {
    let (name, args) = match preset.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (preset, None),
    };
    match (name, args) {
        ("sphere", None) => Ok(RadialProfile::sphere(1.0, n)),
        ("perturbed-sphere", None) => {
            RadialProfile::from_fn(|r| r.sin() * (1.0 + 0.05 * (2.0 * r).sin()), std::f64::consts::PI, n)
                .map_err(|e| e.to_string())
        }
        ("cigar", None) => Ok(RadialProfile::cigar(1.0, 12.0, n)),
        ("flatcone", Some(arg)) => {
            let beta: f64 = arg.parse().map_err(|e| format!("flatcone:BETA: {e}"))?;
            if !(-1.0 < beta && beta <= 0.0) {
                return Err(format!("flatcone beta must lie in (-1, 0], got {beta}"));
            }
            Ok(RadialProfile::flat_cone(beta + 1.0, 2.0, n))
        }
        ("football", Some(arg)) => {
            let (a1, a2) = parse_pair(arg)?;
            let sol = solve_angles(a1.to_radians(), a2.to_radians()).map_err(|e| e.to_string())?;
            sol.orbit.to_profile(sol.big_a, n).map_err(|e| e.to_string())
        }
        ("teardrop", Some(arg)) => {
            let (a, b) = parse_pair(arg)?;
            let spec = SolitonSpec::new(SolitonSign::Shrinking, a, b);
            let t = integrate_with(
                &spec,
                [0.0, b],
                (0.0, 1e4),
                &IntegrateOptions { max_tips: 1, ..Default::default() },
            )
            .map_err(|e| e.to_string())?;
            let (big_a, _) =
                *t.tip_crossings().first().ok_or("teardrop trajectory does not close")?;
            t.to_profile(big_a, n).map_err(|e| e.to_string())
        }
        _ => Err(format!(
            "unknown preset '{preset}' (expected sphere, cigar, flatcone:BETA, football:A1,A2, teardrop:A,B, perturbed-sphere)"
        )),
    }
}

fn parse_pair(arg: &str) -> Result<(f64, f64), String> {
    let (x, y) = arg
        .split_once(',')
        .ok_or("expected two comma-separated values")?;
    let a = x
        .trim()
        .parse()
        .map_err(|e| format!("bad value {x}: {e}"))?;
    let b = y
        .trim()
        .parse()
        .map_err(|e| format!("bad value {y}: {e}"))?;
    Ok((a, b))
}

/// χ̂ for defect tracking, when the preset is a closed surface.
fn preset_chi_hat(preset: &str, profile: &RadialProfile) -> Option<f64> {
    if profile.values().last() != Some(&0.0) {
        return None;
    }
    let s1 = profile.angle0()? / (2.0 * std::f64::consts::PI);
    let s2 = profile.angle_a()? / (2.0 * std::f64::consts::PI);
    let _ = preset;
    Some(s1 + s2)
}

fn write_flow_outputs(
    out: &Path,
    hist: &FlowHistory,
    preset: &str,
    grid_n: usize,
    cfl: f64,
    t_end: f64,
) -> Result<(), String> {
    let diag = "flow_diagnostics.csv";
    io::write_diagnostics_csv(&out.join(diag), &hist.series).map_err(|e| e.to_string())?;
    let mut slice_files = Vec::new();
    for (i, s) in hist.states.iter().enumerate() {
        let name = format!("flow_slice_{i:04}.csv");
        io::write_flow_slice_csv(&out.join(&name), s).map_err(|e| e.to_string())?;
        slice_files.push(name);
    }
    let manifest = io::flow_manifest_json(hist, preset, grid_n, cfl, t_end, diag, slice_files);
    std::fs::write(out.join("flow_manifest.json"), manifest).map_err(|e| e.to_string())?;
    Ok(())
}

fn smooth_summary_json(beta: f64, times: &[f64], rows: &[(f64, Vec<f64>)]) -> String {
    use std::fmt::Write;
    let coef = riccilab::flow::barrier_log_coefficient(beta);
    // Fit B from the earliest sampled time over the whole family; the
    // barrier B + coef·ln t must dominate every later sample.
    let mut b_fit = f64::NEG_INFINITY;
    for (_, sups) in rows {
        if let Some(&s0) = sups.first() {
            b_fit = b_fit.max(s0 - coef * times[0].ln());
        }
    }
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"beta\": {beta},");
    let _ = writeln!(s, "  \"log_coefficient\": {coef},");
    let _ = writeln!(s, "  \"fitted_B\": {b_fit},");
    let _ = writeln!(
        s,
        "  \"times\": [{}],",
        times
            .iter()
            .map(|t| format!("{t:e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    s.push_str("  \"levels\": [\n");
    for (i, (k, sups)) in rows.iter().enumerate() {
        let _ = write!(
            s,
            "    {{\"k\": {k}, \"sup_u\": [{}]}}",
            sups.iter()
                .map(|v| format!("{v:.9e}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        s.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    s.push_str("  ]\n}\n");
    s
}
