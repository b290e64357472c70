//! Deterministic file output: CSV (RFC-4180, `%.12e` fields), JSON with
//! stable key order, and Wavefront OBJ revolution meshes.

use crate::cusp::{AsymptoticsReport, CuspMetric, Linearization, SeparatrixShot};
use crate::flow::{DiagnosticsRow, FlowHistory, FlowState, SmoothFlowState, Termination};
use crate::football::FootballSolution;
use crate::geom::Embedding;
use crate::soliton::{curvature_along, potential_along, LineSpec, PhasePortrait, Trajectory};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

const CRLF: &str = "\r\n";

/// C-style `%.12e` rendering (two-digit signed exponent).
pub fn fmt_e12(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (m, e) = s.split_once('e').expect("float in exponent form");
    let exp: i32 = e.parse().expect("exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{m}e{sign}{:02}", exp.abs())
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push_str(CRLF);
    for row in rows {
        out.push_str(&row);
        out.push_str(CRLF);
    }
    fs::write(path, out)
}

/// `rho,h` profile table.
pub fn write_profile_csv(path: &Path, grid: &[f64], h: &[f64]) -> io::Result<()> {
    write_csv(
        path,
        "rho,h",
        grid.iter()
            .zip(h)
            .map(|(r, v)| format!("{},{}", fmt_e12(*r), fmt_e12(*v))),
    )
}

/// `r,u` conformal factor table.
pub fn write_conformal_csv(path: &Path, s: &SmoothFlowState) -> io::Result<()> {
    write_csv(
        path,
        "r,u",
        s.grid
            .iter()
            .zip(&s.u)
            .map(|(r, v)| format!("{},{}", fmt_e12(*r), fmt_e12(*v))),
    )
}

/// `r,h,u,K,f` along a trajectory.
pub fn write_trajectory_csv(path: &Path, t: &Trajectory) -> io::Result<()> {
    let k = curvature_along(t);
    let f = potential_along(t);
    write_csv(
        path,
        "r,h,u,K,f",
        t.params.iter().enumerate().map(|(i, r)| {
            format!(
                "{},{},{},{},{}",
                fmt_e12(*r),
                fmt_e12(t.states[i][0]),
                fmt_e12(t.states[i][1]),
                fmt_e12(k[i]),
                fmt_e12(f[i])
            )
        }),
    )
}

/// `rho,h,K` for one flow slice.
pub fn write_flow_slice_csv(path: &Path, s: &FlowState) -> io::Result<()> {
    let p = crate::geom::RadialProfile::from_samples(s.grid.clone(), s.h.clone())
        .expect("flow slice is a valid profile");
    let k = crate::geom::curvature(&p).expect("curvature of flow slice");
    write_csv(
        path,
        "rho,h,K",
        s.grid
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{},{},{}", fmt_e12(*r), fmt_e12(s.h[i]), fmt_e12(k[i]))),
    )
}

/// Per-step diagnostics series of a polar flow run.
pub fn write_diagnostics_csv(path: &Path, series: &[DiagnosticsRow]) -> io::Result<()> {
    write_csv(
        path,
        "tau,area,r_avg,max_abs_k,tip_slope,max_m2",
        series.iter().map(|d| {
            format!(
                "{},{},{},{},{},{}",
                fmt_e12(d.tau),
                fmt_e12(d.area),
                fmt_e12(d.avg_curvature),
                fmt_e12(d.max_abs_k),
                fmt_e12(d.tip_slope),
                d.max_m2.map(fmt_e12).unwrap_or_default()
            )
        }),
    )
}

/// `r,H,F,h,f,sec_xy,sec_rx` along the 3D soliton separatrix.
pub fn write_cusp_csv(path: &Path, shot: &SeparatrixShot, m: &CuspMetric) -> io::Result<()> {
    write_csv(
        path,
        "r,H,F,h,f,sec_xy,sec_rx",
        m.r.iter().enumerate().map(|(i, r)| {
            format!(
                "{},{},{},{},{},{},{}",
                fmt_e12(*r),
                fmt_e12(shot.states[i][0]),
                fmt_e12(shot.states[i][1]),
                fmt_e12(m.h_warp[i]),
                fmt_e12(m.f_potential[i]),
                fmt_e12(m.sec_xy[i]),
                fmt_e12(m.sec_rx[i])
            )
        }),
    )
}

/// Revolution mesh export. Rings of `segments` vertices per grid node,
/// collapsing zero-radius tips to apex vertices; quad strips elsewhere,
/// counter-clockwise as seen from outside.
pub fn write_obj(path: &Path, e: &Embedding, segments: usize) -> io::Result<()> {
    assert!(segments >= 3, "need at least 3 angular segments");
    let n = e.rho.len();
    let mut out = String::new();
    out.push_str("# surface of revolution\n");
    // Vertex table; ring_start[i] = first 1-based index of ring i.
    let mut ring_start = vec![0_usize; n];
    let mut next = 1_usize;
    for (i, rs) in ring_start.iter_mut().enumerate() {
        *rs = next;
        if e.h[i] == 0.0 {
            let _ = writeln!(out, "v {:.12} {:.12} {:.12}", 0.0, 0.0, e.z[i]);
            next += 1;
        } else {
            for j in 0..segments {
                let th = 2.0 * std::f64::consts::PI * j as f64 / segments as f64;
                let _ = writeln!(
                    out,
                    "v {:.12} {:.12} {:.12}",
                    e.h[i] * th.cos(),
                    e.h[i] * th.sin(),
                    e.z[i]
                );
            }
            next += segments;
        }
    }
    let ring = |i: usize, j: usize| ring_start[i] + (j % segments);
    for i in 0..n - 1 {
        let lo_apex = e.h[i] == 0.0;
        let hi_apex = e.h[i + 1] == 0.0;
        for j in 0..segments {
            match (lo_apex, hi_apex) {
                (true, true) => {}
                (true, false) => {
                    let _ = writeln!(
                        out,
                        "f {} {} {}",
                        ring_start[i],
                        ring(i + 1, j + 1),
                        ring(i + 1, j)
                    );
                }
                (false, true) => {
                    let _ = writeln!(
                        out,
                        "f {} {} {}",
                        ring(i, j),
                        ring(i, j + 1),
                        ring_start[i + 1]
                    );
                }
                (false, false) => {
                    let _ = writeln!(
                        out,
                        "f {} {} {} {}",
                        ring(i, j),
                        ring(i, j + 1),
                        ring(i + 1, j + 1),
                        ring(i + 1, j)
                    );
                }
            }
        }
    }
    fs::write(path, out)
}

#[derive(Serialize)]
struct FootballJson<'a> {
    alpha1: f64,
    alpha2: f64,
    k: f64,
    p: f64,
    q: f64,
    a: f64,
    #[serde(rename = "A")]
    big_a: f64,
    closure_residual: f64,
    orbit_csv: &'a str,
}

/// Result JSON for a boundary-value solve; angles reported in radians.
pub fn football_json(sol: &FootballSolution, orbit_csv: &str) -> String {
    serde_json::to_string_pretty(&FootballJson {
        alpha1: sol.alpha1,
        alpha2: sol.alpha2,
        k: sol.k,
        p: sol.p,
        q: sol.q,
        a: sol.a,
        big_a: sol.big_a,
        closure_residual: sol.closure_residual,
        orbit_csv,
    })
    .expect("football summary serializes")
}

#[derive(Serialize)]
struct CriticalPointJson {
    h: f64,
    u: f64,
    kind: String,
    eigenvalues: [[f64; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvectors: Option<[[f64; 2]; 2]>,
}

#[derive(Serialize)]
struct IsoclineJson {
    label: String,
    axis: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct PortraitJson {
    epsilon: f64,
    a: f64,
    critical_points: Vec<CriticalPointJson>,
    isoclines: Vec<IsoclineJson>,
    trajectories: Vec<String>,
    separatrices: Vec<String>,
}

/// Portrait bundle JSON; trajectory data lives in the referenced CSVs.
pub fn portrait_json(
    p: &PhasePortrait,
    trajectory_files: &[String],
    separatrix_files: &[String],
) -> String {
    let critical_points = p
        .critical_points
        .iter()
        .map(|c| CriticalPointJson {
            h: c.state[0],
            u: c.state[1],
            kind: format!("{:?}", c.kind),
            eigenvalues: [
                [c.eigenvalues[0].0, c.eigenvalues[0].1],
                [c.eigenvalues[1].0, c.eigenvalues[1].1],
            ],
            eigenvectors: c.eigenvectors,
        })
        .collect();
    let isoclines = p
        .isoclines
        .iter()
        .map(|i| match i.line {
            LineSpec::UConst(v) => IsoclineJson {
                label: i.label.clone(),
                axis: "u",
                value: v,
            },
            LineSpec::HConst(v) => IsoclineJson {
                label: i.label.clone(),
                axis: "h",
                value: v,
            },
        })
        .collect();
    serde_json::to_string_pretty(&PortraitJson {
        epsilon: p.epsilon.epsilon(),
        a: p.a,
        critical_points,
        isoclines,
        trajectories: trajectory_files.to_vec(),
        separatrices: separatrix_files.to_vec(),
    })
    .expect("portrait serializes")
}

#[derive(Serialize)]
struct FlowManifestJson<'a> {
    initial: &'a str,
    grid_n: usize,
    dt_policy: String,
    #[serde(rename = "T")]
    t_end: f64,
    termination: String,
    diagnostics_series_csv: &'a str,
    slices: Vec<String>,
}

/// Run manifest for a polar flow.
pub fn flow_manifest_json(
    hist: &FlowHistory,
    initial_label: &str,
    grid_n: usize,
    cfl: f64,
    t_end: f64,
    diagnostics_csv: &str,
    slice_files: Vec<String>,
) -> String {
    let termination = match hist.termination {
        Termination::Completed => "completed".to_string(),
        Termination::SingularityDetected { max_abs_k, area } => {
            format!("singularity(max|K|={max_abs_k:.6e}, area={area:.6e})")
        }
    };
    serde_json::to_string_pretty(&FlowManifestJson {
        initial: initial_label,
        grid_n,
        dt_policy: format!("explicit, dtau = {cfl} * drho^2"),
        t_end,
        termination,
        diagnostics_series_csv: diagnostics_csv,
        slices: slice_files,
    })
    .expect("flow manifest serializes")
}

#[derive(Serialize)]
struct CuspReportJson {
    eigenvalues: [f64; 2],
    separatrix_slopes: [f64; 2],
    h_over_half_r: f64,
    h_times_r: f64,
    f_over_quarter_r2: f64,
    hf_defect: f64,
    fp_defect: f64,
    sec_xy_range: [f64; 2],
    sec_rx_range: [f64; 2],
    csv: String,
}

/// Asymptotics/pinching report for the 3D soliton.
pub fn cusp_report_json(
    lin: &Linearization,
    rep: &AsymptoticsReport,
    m: &CuspMetric,
    csv: &str,
) -> String {
    let range = |v: &[f64]| {
        [
            v.iter().cloned().fold(f64::INFINITY, f64::min),
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ]
    };
    serde_json::to_string_pretty(&CuspReportJson {
        eigenvalues: lin.eigenvalues,
        separatrix_slopes: lin.slopes,
        h_over_half_r: rep.h_over_half_r,
        h_times_r: rep.h_times_r,
        f_over_quarter_r2: rep.f_over_quarter_r2,
        hf_defect: rep.hf_defect,
        fp_defect: rep.fp_defect,
        sec_xy_range: range(&m.sec_xy),
        sec_rx_range: range(&m.sec_rx),
        csv: csv.to_string(),
    })
    .expect("cusp report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e12_formatting() {
        assert_eq!(fmt_e12(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e12(-0.5), "-5.000000000000e-01");
        assert_eq!(fmt_e12(123.456), "1.234560000000e+02");
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(1.5e-12), "1.500000000000e-12");
    }

    #[test]
    fn csv_lines_are_crlf() {
        let dir = std::env::temp_dir().join("riccilab_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p.csv");
        write_profile_csv(&path, &[0.0, 1.0], &[0.0, 2.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("rho,h\r\n"));
        assert!(text.ends_with("\r\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn obj_mesh_counts() {
        use crate::geom::{embed_profile, RadialProfile};
        let p = RadialProfile::sphere(1.0, 9);
        let e = embed_profile(&p).unwrap();
        let dir = std::env::temp_dir().join("riccilab_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.obj");
        write_obj(&path, &e, 8).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let nv = text.lines().filter(|l| l.starts_with("v ")).count();
        let nf = text.lines().filter(|l| l.starts_with("f ")).count();
        // 7 full rings of 8 plus 2 apexes; 6 quad strips and 2 tip fans.
        assert_eq!(nv, 7 * 8 + 2);
        assert_eq!(nf, 6 * 8 + 2 * 8);
    }
}
