//! Phase-portrait bundles: critical points with linearization data,
//! isoclines, trajectory sweeps, and separatrices shot from saddle
//! eigen-directions.

use super::{integrate_with, IntegrateOptions, SolitonError, SolitonSign, SolitonSpec, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Saddle,
    Center,
    /// A whole line of fixed points (the steady system's {u = 0}).
    FixedLine,
}

#[derive(Debug, Clone)]
pub struct CriticalPointInfo {
    pub state: [f64; 2],
    pub kind: CriticalKind,
    /// Eigenvalues as (re, im) pairs of the linearized system.
    pub eigenvalues: [(f64, f64); 2],
    /// Eigenvectors for real eigenvalues, in the eigenvalue order.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
}

/// Lines in the (h, u) phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSpec {
    UConst(f64),
    HConst(f64),
}

#[derive(Debug, Clone)]
pub struct IsoclineInfo {
    pub label: String,
    pub line: LineSpec,
}

#[derive(Debug, Clone)]
pub struct PhasePortrait {
    pub epsilon: SolitonSign,
    pub a: f64,
    pub critical_points: Vec<CriticalPointInfo>,
    pub isoclines: Vec<IsoclineInfo>,
    pub trajectories: Vec<Trajectory>,
    pub separatrices: Vec<Trajectory>,
}

#[derive(Debug, Clone)]
pub struct PortraitOptions {
    /// Initial tip slopes for the trajectory sweep; defaults per sign.
    pub b_samples: Option<Vec<f64>>,
    /// Arc-parameter extent for sampled trajectories.
    pub r_extent: f64,
    /// Offset from the saddle along the unstable eigenvector for
    /// separatrix shooting.
    pub delta: f64,
    pub integrate: IntegrateOptions,
    /// Worker threads for the sweep (1 = sequential).
    pub jobs: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            b_samples: None,
            r_extent: 12.0,
            delta: 1e-6,
            integrate: IntegrateOptions {
                blowup_ceiling: 1e3,
                ..Default::default()
            },
            jobs: 1,
        }
    }
}

fn default_samples(epsilon: SolitonSign, a: f64) -> Vec<f64> {
    match epsilon {
        SolitonSign::Shrinking => {
            let sep = 1.0 / (2.0 * a);
            vec![0.2 * sep, 0.5 * sep, 0.8 * sep, -1.0, -0.3, 1.3 * sep]
        }
        SolitonSign::Steady => vec![-1.5, -1.0, -0.5, -0.25, 0.25, 0.75],
        SolitonSign::Expanding => vec![-1.5, -1.0, -0.75, -0.5, -0.25, -0.1, 0.2],
    }
}

/// Assemble the portrait bundle for the system at sign ε and gradient
/// constant `a`. Sampled trajectories run in parallel; results are slotted
/// by index so completion order does not matter.
pub fn phase_portrait(
    epsilon: SolitonSign,
    a: f64,
    opts: &PortraitOptions,
) -> Result<PhasePortrait, SolitonError> {
    let samples = opts
        .b_samples
        .clone()
        .unwrap_or_else(|| default_samples(epsilon, a));
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();

    let (critical_points, isoclines) = match epsilon {
        SolitonSign::Expanding => (
            vec![CriticalPointInfo {
                state: [0.0, 0.0],
                kind: CriticalKind::Saddle,
                eigenvalues: [(inv_sqrt2, 0.0), (-inv_sqrt2, 0.0)],
                eigenvectors: Some([[2.0_f64.sqrt(), 1.0], [-(2.0_f64.sqrt()), 1.0]]),
            }],
            vec![
                IsoclineInfo {
                    label: "horizontal isocline (flat expanding Gaussian cone)".into(),
                    line: LineSpec::UConst(-1.0 / (2.0 * a)),
                },
                IsoclineInfo {
                    label: "horizontal isocline (axis)".into(),
                    line: LineSpec::HConst(0.0),
                },
                IsoclineInfo {
                    label: "vertical isocline".into(),
                    line: LineSpec::UConst(0.0),
                },
            ],
        ),
        SolitonSign::Shrinking => (
            vec![CriticalPointInfo {
                state: [0.0, 0.0],
                kind: CriticalKind::Center,
                eigenvalues: [(0.0, inv_sqrt2), (0.0, -inv_sqrt2)],
                eigenvectors: None,
            }],
            vec![
                IsoclineInfo {
                    label: "horizontal isocline (flat shrinking Gaussian cone)".into(),
                    line: LineSpec::UConst(1.0 / (2.0 * a)),
                },
                IsoclineInfo {
                    label: "horizontal isocline (axis)".into(),
                    line: LineSpec::HConst(0.0),
                },
                IsoclineInfo {
                    label: "vertical isocline".into(),
                    line: LineSpec::UConst(0.0),
                },
            ],
        ),
        SolitonSign::Steady => (
            vec![CriticalPointInfo {
                state: [0.0, 0.0],
                kind: CriticalKind::FixedLine,
                eigenvalues: [(0.0, 0.0), (0.0, 0.0)],
                eigenvectors: None,
            }],
            vec![IsoclineInfo {
                label: "fixed-point line (flat cylinders)".into(),
                line: LineSpec::UConst(0.0),
            }],
        ),
    };

    // Trajectory sweep, embarrassingly parallel over initial slopes.
    let mut trajectories: Vec<Option<Trajectory>> = (0..samples.len()).map(|_| None).collect();
    let run_one = |b: f64| -> Result<Trajectory, SolitonError> {
        let spec = SolitonSpec::new(epsilon, a, b);
        integrate_with(
            &spec,
            [0.0, b],
            (0.0, opts.r_extent),
            &IntegrateOptions {
                max_tips: 2,
                ..opts.integrate
            },
        )
    };
    if opts.jobs <= 1 {
        for (i, &b) in samples.iter().enumerate() {
            trajectories[i] = Some(run_one(b)?);
        }
    } else {
        let chunk = samples.len().div_ceil(opts.jobs);
        let results = std::sync::Mutex::new(vec![None; samples.len()]);
        std::thread::scope(|scope| {
            for block in samples.chunks(chunk).enumerate().collect::<Vec<_>>() {
                let (ci, bs) = block;
                let results = &results;
                let run_one = &run_one;
                scope.spawn(move || {
                    for (j, &b) in bs.iter().enumerate() {
                        let out = run_one(b);
                        results.lock().unwrap()[ci * chunk + j] = Some(out);
                    }
                });
            }
        });
        for (i, slot) in results.into_inner().unwrap().into_iter().enumerate() {
            trajectories[i] = Some(slot.expect("sweep slot filled")?);
        }
    }
    let trajectories: Vec<Trajectory> = trajectories.into_iter().map(Option::unwrap).collect();

    // Separatrices from the saddle eigen-directions (expanding sign only).
    let mut separatrices = Vec::new();
    if epsilon == SolitonSign::Expanding {
        let spec = SolitonSpec::new(epsilon, a, 0.0);
        let norm = (3.0_f64).sqrt();
        let unstable = [2.0_f64.sqrt() / norm, 1.0 / norm];
        let stable = [-(2.0_f64.sqrt()) / norm, 1.0 / norm];
        for (dir, forward) in [
            (unstable, true),
            ([-unstable[0], -unstable[1]], true),
            (stable, false),
            ([-stable[0], -stable[1]], false),
        ] {
            let init = [opts.delta * dir[0], opts.delta * dir[1]];
            let span = if forward {
                (0.0, opts.r_extent)
            } else {
                (0.0, -opts.r_extent)
            };
            separatrices.push(integrate_with(&spec, init, span, &opts.integrate)?);
        }
    }

    Ok(PhasePortrait {
        epsilon,
        a,
        critical_points,
        isoclines,
        trajectories,
        separatrices,
    })
}
