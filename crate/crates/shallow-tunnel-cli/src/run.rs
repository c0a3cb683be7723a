//! Single runs, sweeps and their on-disk artifacts.

use crate::config::RunConfig;
use crate::error::CliError;
use rayon::prelude::*;
use shallow_tunnel::fields::{evaluate_grid, Evaluator, FieldSeries, NormalizationScales, PhysicalField};
use shallow_tunnel::solver::{run_solver, SolutionCoefficients};
use shallow_tunnel::verification::{midpoint_angles, residual_report, tunnel_point, ResidualReport};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const ARTIFACTS: [&str; 6] = ["surface.csv", "tunnel.csv", "grid.csv", "residuals.csv", "manifest.txt", "run.cfg"];

/// Nine significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.8e}")
    }
}

fn norm(v: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        v / scale
    } else {
        0.0
    }
}

fn field_cells(f: &PhysicalField, sc: &NormalizationScales) -> [f64; 9] {
    let t = f.total;
    [
        f.x,
        t.sigma_x,
        t.sigma_y,
        t.tau_xy,
        f.u,
        f.v,
        norm(t.sigma_x, sc.stress_scale),
        norm(t.sigma_y, sc.stress_scale),
        norm(f.u, sc.disp_scale),
    ]
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = f64>) {
    let row: Vec<String> = cells.into_iter().map(fmt_num).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

const BOUNDARY_HEADER: &str = "x_m,sx_kPa,sy_kPa,txy_kPa,u_m,v_m,sx_norm,sy_norm,u_norm,v_norm";
const GRID_HEADER: &str =
    "x_m,y_m,sx_kPa,sy_kPa,txy_kPa,u_m,v_m,smax_kPa,smin_kPa,sx_norm,sy_norm,u_norm,v_norm,smax_norm,smin_norm";

/// Extremes reported per case in sweep summaries; normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub smax_max: f64,
    pub smin_min: f64,
    pub surface_v_min: f64,
    pub surface_v_max: f64,
    pub tunnel_v_min: f64,
    pub tunnel_v_max: f64,
    pub tunnel_u_max_abs: f64,
}

impl Default for Extremes {
    fn default() -> Self {
        Self {
            smax_max: f64::NEG_INFINITY,
            smin_min: f64::INFINITY,
            surface_v_min: f64::INFINITY,
            surface_v_max: f64::NEG_INFINITY,
            tunnel_v_min: f64::INFINITY,
            tunnel_v_max: f64::NEG_INFINITY,
            tunnel_u_max_abs: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub dir: PathBuf,
    pub solution: SolutionCoefficients,
    pub residuals: ResidualReport,
    pub extremes: Extremes,
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

/// Contents of every artifact, built before anything touches the disk.
struct Artifacts {
    files: Vec<(&'static str, String)>,
    outcome: CaseOutcome,
}

fn build(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let t0 = Instant::now();
    let geom = cfg.geometry()?;
    let m = cfg.material()?;
    let sol = run_solver(&geom, &m, &cfg.solver())?;
    let solve_seconds = t0.elapsed().as_secs_f64();
    let ev = Evaluator::new(&geom, &m, FieldSeries::from_solution(&sol)?)?;
    let sc = ev.scales();
    let n = cfg.boundary_samples;
    let mut ext = Extremes::default();

    let mut surface: Vec<PhysicalField> = Vec::with_capacity(n);
    for th in midpoint_angles(n) {
        surface.push(ev.physical_at_zeta(Complex64::from_polar(1.0, th))?);
    }
    surface.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut surface_csv = format!("{BOUNDARY_HEADER}\n");
    for f in &surface {
        let v = norm(f.v, sc.disp_scale);
        ext.surface_v_min = ext.surface_v_min.min(v);
        ext.surface_v_max = ext.surface_v_max.max(v);
        push_row(&mut surface_csv, field_cells(f, &sc).into_iter().chain([v]));
    }

    let mut tunnel_csv = format!("theta_deg,{BOUNDARY_HEADER}\n");
    for vt in midpoint_angles(n) {
        let f = ev.physical_at_zeta(tunnel_point(vt, &ev)?)?;
        let v = norm(f.v, sc.disp_scale);
        ext.tunnel_v_min = ext.tunnel_v_min.min(v);
        ext.tunnel_v_max = ext.tunnel_v_max.max(v);
        ext.tunnel_u_max_abs = ext.tunnel_u_max_abs.max(norm(f.u, sc.disp_scale).abs());
        push_row(&mut tunnel_csv, [vt.to_degrees()].into_iter().chain(field_cells(&f, &sc)).chain([v]));
    }

    let mut grid_csv = format!("{GRID_HEADER}\n");
    for row in evaluate_grid(&cfg.grid(), &ev) {
        match row.field {
            Some(f) => {
                let t = f.total;
                let (smax, smin) = (norm(f.sigma_max, sc.stress_scale), norm(f.sigma_min, sc.stress_scale));
                ext.smax_max = ext.smax_max.max(smax);
                ext.smin_min = ext.smin_min.min(smin);
                push_row(
                    &mut grid_csv,
                    [
                        row.x,
                        row.y,
                        t.sigma_x,
                        t.sigma_y,
                        t.tau_xy,
                        f.u,
                        f.v,
                        f.sigma_max,
                        f.sigma_min,
                        norm(t.sigma_x, sc.stress_scale),
                        norm(t.sigma_y, sc.stress_scale),
                        norm(f.u, sc.disp_scale),
                        norm(f.v, sc.disp_scale),
                        smax,
                        smin,
                    ],
                );
            }
            None => push_row(&mut grid_csv, [row.x, row.y].into_iter().chain([f64::NAN; 13])),
        }
    }

    let rep = residual_report(&ev, n)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt_num);
    let mut residuals_csv = String::from("metric,value\n");
    for (k, v) in [
        ("free_surface_traction_median", fmt_num(rep.free_surface_traction_median)),
        ("free_surface_traction_max", fmt_num(rep.free_surface_traction_max)),
        ("constrained_surface_disp_median", opt(rep.constrained_surface_disp_median)),
        ("constrained_surface_disp_max", opt(rep.constrained_surface_disp_max)),
        ("tunnel_traction_median_rel_error", fmt_num(rep.tunnel_traction_median_rel_error)),
        ("resultant_fx_kN_per_m", fmt_num(rep.resultant_recovered.fx)),
        ("resultant_fy_kN_per_m", fmt_num(rep.resultant_recovered.fy)),
        ("expected_fx_kN_per_m", fmt_num(rep.resultant_expected.fx)),
        ("expected_fy_kN_per_m", fmt_num(rep.resultant_expected.fy)),
        ("exclusion_band_deg", fmt_num(rep.exclusion_band_deg)),
        ("free_samples", rep.free_samples.to_string()),
        ("constrained_samples", rep.constrained_samples.to_string()),
        ("tunnel_samples", rep.tunnel_samples.to_string()),
        ("resultant_nodes", rep.resultant_nodes.to_string()),
    ] {
        let _ = writeln!(residuals_csv, "{k},{v}");
    }

    let total_seconds = t0.elapsed().as_secs_f64();
    let echo = cfg.to_text();
    let mut manifest = String::new();
    let _ = writeln!(manifest, "software = shallow-tunnel-cli {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "artifacts = surface.csv, tunnel.csv, grid.csv, residuals.csv, run.cfg");
    let _ = writeln!(manifest, "reps = {}", sol.reps);
    let _ = writeln!(manifest, "final_increment = {}", fmt_num(*sol.history.last().unwrap_or(&0.0)));
    for (i, c) in sol.cond.iter().enumerate() {
        let _ = writeln!(manifest, "cond_{} = {}", i + 1, fmt_num(*c));
    }
    let _ = writeln!(manifest, "within_convergence_bound = {}", sol.within_convergence_bound);
    let _ = writeln!(manifest, "inner_radius_r = {}", fmt_num(ev.derived.r));
    let _ = writeln!(manifest, "mapping_a_m = {}", fmt_num(ev.derived.a));
    let _ = writeln!(manifest, "theta0_deg = {}", fmt_num(ev.derived.theta0.to_degrees()));
    let _ = writeln!(manifest, "kappa = {}", fmt_num(m.kappa));
    let _ = writeln!(manifest, "c0 = {}", fmt_num(ev.series.c0));
    let _ = writeln!(manifest, "ca = {}", fmt_num(sol.ca));
    let _ = writeln!(manifest, "stress_scale_kPa = {}", fmt_num(sc.stress_scale));
    let _ = writeln!(manifest, "disp_scale_m = {}", fmt_num(sc.disp_scale));
    for line in residuals_csv.lines().skip(1) {
        if let Some((k, v)) = line.split_once(',') {
            let _ = writeln!(manifest, "residual.{k} = {v}");
        }
    }
    for line in echo.lines() {
        let _ = writeln!(manifest, "config.{line}");
    }
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let _ = writeln!(manifest, "time.solve_s = {solve_seconds:.6}");
    let _ = writeln!(manifest, "time.total_s = {total_seconds:.6}");
    let _ = writeln!(manifest, "time.unix = {unix}");

    Ok(Artifacts {
        files: vec![
            ("surface.csv", surface_csv),
            ("tunnel.csv", tunnel_csv),
            ("grid.csv", grid_csv),
            ("residuals.csv", residuals_csv),
            ("run.cfg", echo),
            ("manifest.txt", manifest),
        ],
        outcome: CaseOutcome {
            dir: cfg.out_dir.clone(),
            solution: sol,
            residuals: rep,
            extremes: ext,
            solve_seconds,
            total_seconds,
        },
    })
}

/// Deletes any artifact left in `dir` so a failed run leaves no mixed set.
fn remove_artifacts(dir: &Path) {
    for name in ARTIFACTS {
        let _ = fs::remove_file(dir.join(name));
    }
}

/// Solves one case and writes its artifacts into `cfg.out_dir`.
pub fn run_case(cfg: &RunConfig) -> Result<CaseOutcome, CliError> {
    let dir = &cfg.out_dir;
    let artifacts = match build(cfg) {
        Ok(a) => a,
        Err(e) => {
            remove_artifacts(dir);
            return Err(e);
        }
    };
    let write = || -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, body) in &artifacts.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        remove_artifacts(dir);
        return Err(e);
    }
    Ok(artifacts.outcome)
}

/// Parameters of one sweep member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCase {
    pub h_over_r: f64,
    pub k0: f64,
    pub x0_over_h: f64,
}

/// Cartesian product of the sweep lists, each defaulting to the base value.
pub fn sweep_cases(cfg: &RunConfig) -> Vec<SweepCase> {
    let hr = cfg.sweep_h_over_r.clone().unwrap_or_else(|| vec![cfg.h_over_r]);
    let k0 = cfg.sweep_k0.clone().unwrap_or_else(|| vec![cfg.k0]);
    let x0 = cfg.sweep_x0_over_h.clone().unwrap_or_else(|| vec![cfg.x0_over_h]);
    let mut out = Vec::new();
    for &h_over_r in &hr {
        for &k0 in &k0 {
            for &x0_over_h in &x0 {
                out.push(SweepCase { h_over_r, k0, x0_over_h });
            }
        }
    }
    out
}

pub fn case_dir_name(index: usize, c: &SweepCase) -> String {
    format!("case_{index:03}_hR{}_k0{}_x0h{}", c.h_over_r, c.k0, c.x0_over_h)
}

pub struct SweepOutcome {
    pub cases: Vec<(SweepCase, Result<CaseOutcome, CliError>)>,
    pub summary: PathBuf,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|(_, r)| r.is_err()).count()
    }
}

/// Runs every sweep member on a pool of `workers` threads, one directory per
/// case under `cfg.out_dir`, and writes `summary.csv`.
pub fn run_sweep(cfg: &RunConfig, workers: usize) -> Result<SweepOutcome, CliError> {
    let root = cfg.out_dir.clone();
    fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
    let cases = sweep_cases(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Range { key: "workers".into(), msg: e.to_string() })?;
    let results: Vec<(SweepCase, Result<CaseOutcome, CliError>)> = pool.install(|| {
        cases
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let mut case_cfg = cfg.clone();
                case_cfg.h_over_r = c.h_over_r;
                case_cfg.k0 = c.k0;
                case_cfg.x0_over_h = c.x0_over_h;
                case_cfg.sweep_h_over_r = None;
                case_cfg.sweep_k0 = None;
                case_cfg.sweep_x0_over_h = None;
                case_cfg.out_dir = root.join(case_dir_name(i, c));
                let r = run_case(&case_cfg);
                if let Err(e) = &r {
                    eprintln!("sweep case {i} (h/R = {}, k0 = {}, x0/h = {}) failed: {e}", c.h_over_r, c.k0, c.x0_over_h);
                }
                (*c, r)
            })
            .collect()
    });
    let mut summary = String::from(
        "case,h_over_R,k0,x0_over_h,status,reps,max_cond,smax_max_norm,smin_min_norm,surface_v_min_norm,surface_v_max_norm,tunnel_v_min_norm,tunnel_v_max_norm,tunnel_u_max_abs_norm\n",
    );
    for (i, (c, r)) in results.iter().enumerate() {
        let lead = format!("{},{},{},{}", case_dir_name(i, c), c.h_over_r, c.k0, c.x0_over_h);
        match r {
            Ok(o) => {
                let e = o.extremes;
                let cond = o.solution.cond.iter().cloned().fold(0.0, f64::max);
                let nums: Vec<String> = [cond, e.smax_max, e.smin_min, e.surface_v_min, e.surface_v_max, e.tunnel_v_min, e.tunnel_v_max, e.tunnel_u_max_abs]
                    .into_iter()
                    .map(fmt_num)
                    .collect();
                let _ = writeln!(summary, "{lead},ok,{},{}", o.solution.reps, nums.join(","));
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                let _ = writeln!(summary, "{lead},failed: {msg},,,,,,,,,");
            }
        }
    }
    let path = root.join("summary.csv");
    fs::write(&path, summary).map_err(|e| CliError::io(&path, e))?;
    Ok(SweepOutcome { cases: results, summary: path })
}

/// Writes `plot.gp`, a gnuplot script for whichever CSVs exist in `dir`.
pub fn emit_plot_script(dir: &Path) -> Result<PathBuf, CliError> {
    let has = |name: &str| dir.join(name).is_file();
    let (surface, tunnel, grid) = (has("surface.csv"), has("tunnel.csv"), has("grid.csv"));
    if !(surface || tunnel || grid) {
        return Err(CliError::MissingArtifacts(dir.to_path_buf()));
    }
    let mut s = String::new();
    s.push_str("# gnuplot script; run from the artifact directory with `gnuplot plot.gp`.\n");
    s.push_str("set datafile separator ','\nset datafile missing 'nan'\nset terminal pngcairo size 1000,700\nset grid\n");
    let curves = |file: &str, x: &str, cols: &[(&str, &str)]| -> String {
        cols.iter()
            .map(|(c, t)| format!("'{file}' using '{x}':'{c}' with lines title '{t}'"))
            .collect::<Vec<_>>()
            .join(", \\\n     ")
    };
    let stress = [("sx_kPa", "sigma_x"), ("sy_kPa", "sigma_y"), ("txy_kPa", "tau_xy")];
    let disp = [("u_m", "u"), ("v_m", "v")];
    if surface {
        s.push_str("\n# ground surface\n");
        let _ = writeln!(s, "set output 'surface_stress.png'\nset xlabel 'x (m)'\nset ylabel 'stress (kPa)'");
        let _ = writeln!(s, "plot {}", curves("surface.csv", "x_m", &stress));
        let _ = writeln!(s, "set output 'surface_displacement.png'\nset ylabel 'displacement (m)'");
        let _ = writeln!(s, "plot {}", curves("surface.csv", "x_m", &disp));
    }
    if tunnel {
        s.push_str("\n# tunnel periphery\n");
        let _ = writeln!(s, "set output 'tunnel_stress.png'\nset xlabel 'theta (deg)'\nset ylabel 'stress (kPa)'");
        let _ = writeln!(s, "plot {}", curves("tunnel.csv", "theta_deg", &stress));
        let _ = writeln!(s, "set output 'tunnel_displacement.png'\nset ylabel 'displacement (m)'");
        let _ = writeln!(s, "plot {}", curves("tunnel.csv", "theta_deg", &disp));
    }
    if grid {
        s.push_str("\n# contour map of sigma_max / (gamma h)\n");
        s.push_str("set output 'grid_smax.png'\nset xlabel 'x (m)'\nset ylabel 'y (m)'\nset size ratio -1\n");
        s.push_str("set view map\nset contour base\nset cntrparam levels 12\nunset surface\nset dgrid3d\n");
        s.push_str("splot 'grid.csv' using 'x_m':'y_m':'smax_norm' with lines title 'sigma_max / gamma h'\n");
    }
    let path = dir.join("plot.gp");
    fs::write(&path, s).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.00000000e0");
        assert_eq!(fmt_num(-123.456789012), "-1.23456789e2");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn sweep_product_order() {
        let mut c = RunConfig::default();
        c.sweep_h_over_r = Some(vec![1.1, 2.0]);
        c.sweep_x0_over_h = Some(vec![1.0, 10.0, 100.0]);
        let cases = sweep_cases(&c);
        assert_eq!(cases.len(), 6);
        assert_eq!(cases[0], SweepCase { h_over_r: 1.1, k0: 0.8, x0_over_h: 1.0 });
        assert_eq!(cases[5], SweepCase { h_over_r: 2.0, k0: 0.8, x0_over_h: 100.0 });
        assert_eq!(case_dir_name(5, &cases[5]), "case_005_hR2_k00.8_x0h100");
    }
}
