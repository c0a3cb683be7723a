//! Text report of the self-checks for one configuration.

use crate::config::RunConfig;
use crate::error::CliError;
use shallow_tunnel::fields::{Evaluator, FieldSeries};
use shallow_tunnel::series::IndexedSeries;
use shallow_tunnel::solver::run_solver;
use shallow_tunnel::verification::{convergence_study, degeneration_check, residual_report};
use std::fmt::Write as _;

/// x0/h values of the convergence study.
pub const STUDY_RATIOS: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];

pub fn verify_report(cfg: &RunConfig) -> Result<String, CliError> {
    let geom = cfg.geometry()?;
    let m = cfg.material()?;
    let sol = run_solver(&geom, &m, &cfg.solver())?;
    let ev = Evaluator::new(&geom, &m, FieldSeries::from_solution(&sol)?)?;
    let rep = residual_report(&ev, cfg.boundary_samples.max(2000))?;
    let mut s = String::new();
    let _ = writeln!(s, "solver: {} reps, condition numbers {:.3} {:.3} {:.3}", sol.reps, sol.cond[0], sol.cond[1], sol.cond[2]);
    let _ = writeln!(s, "theta0 = {:.4} deg, r = {:.6}", ev.derived.theta0.to_degrees(), ev.derived.r);
    let _ = writeln!(s, "free-surface traction: median {:.3e}, max {:.3e} (fraction of gamma h, {} samples)", rep.free_surface_traction_median, rep.free_surface_traction_max, rep.free_samples);
    match (rep.constrained_surface_disp_median, rep.constrained_surface_disp_max) {
        (Some(md), Some(mx)) => {
            let _ = writeln!(s, "constrained-surface displacement: median {md:.3e}, max {mx:.3e} (fraction of u0, {} samples)", rep.constrained_samples);
        }
        _ => {
            let _ = writeln!(s, "constrained-surface displacement: no samples outside the +-{} deg band", rep.exclusion_band_deg);
        }
    }
    let _ = writeln!(s, "tunnel traction: median relative error {:.3e}", rep.tunnel_traction_median_rel_error);
    let _ = writeln!(
        s,
        "resultant: ({:.4}, {:.4}) kN/m, expected ({:.4}, {:.4})",
        rep.resultant_recovered.fx, rep.resultant_recovered.fy, rep.resultant_expected.fx, rep.resultant_expected.fy
    );

    let r = ev.derived.r;
    let n = cfg.n as i32;
    let mut a = IndexedSeries::from_fn(-n, n, |k| (1.7 * k as f64 + 0.3).sin() * r.powi(k.abs()));
    a.set(-1, 0.0);
    let deg = degeneration_check(&a, 0.25, r)?;
    let _ = writeln!(s, "degeneration identities: max discrepancy {:.3e} (relative {:.3e})", deg.max_abs_discrepancy, deg.max_rel_discrepancy);

    let study = convergence_study(&geom, &m, &cfg.solver(), &STUDY_RATIOS, 360);
    for (ratio, case) in &study.cases {
        if let Err(e) = case {
            let _ = writeln!(s, "study x0/h = {ratio}: failed: {e}");
        }
    }
    for d in &study.differences {
        let _ = writeln!(
            s,
            "study x0/h {} -> {}: max change tunnel v {:.3e}, u {:.3e}, hoop {:.3e}; surface v {:.3e}, u {:.3e}, sx {:.3e}",
            d.from_x0_over_h, d.to_x0_over_h, d.tunnel_v, d.tunnel_u, d.tunnel_hoop, d.surface_v, d.surface_u, d.surface_sx
        );
    }
    Ok(s)
}
