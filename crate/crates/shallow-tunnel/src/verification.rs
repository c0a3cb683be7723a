//! Boundary residuals, equilibrium recovery, coefficient identities and the
//! x0/h convergence study.

use crate::error::{Result, TunnelError};
use crate::fields::{Evaluator, FieldSeries, EXCLUSION_RADIUS};
use crate::geometry::{map_derivative, map_forward, TunnelGeometry};
use crate::loading::{clockwise_circle_integral, periphery_traction, Material, Resultant};
use crate::series::IndexedSeries;
use crate::solver::{run_solver, SolverConfig};
use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Half-width of the band around `+-theta0` left out of residual statistics.
pub const GIBBS_BAND_DEG: f64 = 5.0;

/// Minimum number of nodes for the resultant quadrature.
pub const MIN_RESULTANT_NODES: usize = 2000;

/// Median of a sample; `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn max_of(values: &[f64]) -> Option<f64> {
    values.iter().cloned().reduce(f64::max)
}

fn ratio(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

/// `n` midpoint angles covering `(-pi, pi)`.
pub fn midpoint_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| -PI + (j as f64 + 0.5) * 2.0 * PI / n as f64)
}

/// Annulus image of the periphery point at local angle `vartheta` about the
/// tunnel centre, projected onto `|zeta| = r`.
pub fn tunnel_point(vartheta: f64, ev: &Evaluator) -> Result<Complex64> {
    let z = ev.geometry.centre() + Complex64::from_polar(ev.geometry.radius, vartheta);
    let zeta = map_forward(z, &ev.derived)?;
    Ok(zeta * (ev.derived.r / zeta.norm()))
}

/// Traction the rock exerts across the periphery at an inner-circle point,
/// recomposed from `sigma_rho + i tau` with the outward normal of the rock.
pub fn recomposed_traction(zeta: Complex64, ev: &Evaluator) -> Result<Complex64> {
    let f = ev.annulus(zeta)?;
    let zp = map_derivative(zeta, &ev.derived)?;
    let phase = Complex64::from_polar(1.0, zeta.arg()) * zp / zp.norm();
    Ok(-phase * Complex64::new(f.sigma_rho, f.tau_rhotheta))
}

/// Net force recovered by integrating the recomposed periphery tractions.
pub fn recovered_resultant(ev: &Evaluator, nodes: usize) -> Result<Resultant> {
    let r = ev.derived.r;
    let err = RefCell::new(None);
    let (fx, fy) = clockwise_circle_integral(r, nodes, |th| {
        let zeta = Complex64::from_polar(r, th);
        match (recomposed_traction(zeta, ev), map_derivative(zeta, &ev.derived)) {
            (Ok(t), Ok(zp)) => {
                let t = t * zp.norm();
                (t.re, t.im)
            }
            (Err(e), _) | (_, Err(e)) => {
                err.borrow_mut().get_or_insert(e);
                (0.0, 0.0)
            }
        }
    });
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(Resultant { fx, fy }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `|sigma_rho + i tau| / (gamma h)` on the free surface.
    pub free_surface_traction_median: f64,
    pub free_surface_traction_max: f64,
    /// `|u + iv| / u0` on the constrained surface; `None` when the Gibbs band
    /// leaves no samples.
    pub constrained_surface_disp_median: Option<f64>,
    pub constrained_surface_disp_max: Option<f64>,
    /// Median of `|T - T_exact| / |T_exact|` on the periphery.
    pub tunnel_traction_median_rel_error: f64,
    pub resultant_recovered: Resultant,
    pub resultant_expected: Resultant,
    pub exclusion_band_deg: f64,
    pub free_samples: usize,
    pub constrained_samples: usize,
    pub tunnel_samples: usize,
    pub resultant_nodes: usize,
}

/// Samples the three boundary conditions uniformly in angle.
pub fn residual_report(ev: &Evaluator, samples: usize) -> Result<ResidualReport> {
    if samples == 0 {
        return Err(TunnelError::InvalidConfig("residual sample count must be positive".into()));
    }
    let scales = ev.scales();
    let theta0 = ev.derived.theta0;
    let band = GIBBS_BAND_DEG.to_radians();
    let mut free = Vec::new();
    let mut fixed = Vec::new();
    for th in midpoint_angles(samples) {
        let a = th.abs();
        if (a - theta0).abs() <= band {
            continue;
        }
        let zeta = Complex64::from_polar(1.0, th);
        if a > theta0 {
            let f = ev.annulus(zeta)?;
            free.push(ratio(f.sigma_rho.hypot(f.tau_rhotheta), scales.stress_scale));
        } else if (zeta - 1.0).norm() >= EXCLUSION_RADIUS {
            let f = ev.annulus(zeta)?;
            fixed.push(ratio(f.u.hypot(f.v), scales.disp_scale));
        }
    }
    let mut tunnel = Vec::with_capacity(samples);
    for vt in midpoint_angles(samples) {
        let t = recomposed_traction(tunnel_point(vt, ev)?, ev)?;
        let (x, y) = periphery_traction(vt, &ev.geometry, &ev.material);
        let exact = Complex64::new(x, y);
        tunnel.push(ratio((t - exact).norm(), exact.norm()));
    }
    let nodes = samples.max(MIN_RESULTANT_NODES);
    Ok(ResidualReport {
        free_surface_traction_median: median(&free).unwrap_or(0.0),
        free_surface_traction_max: max_of(&free).unwrap_or(0.0),
        constrained_surface_disp_median: median(&fixed),
        constrained_surface_disp_max: max_of(&fixed),
        tunnel_traction_median_rel_error: median(&tunnel).unwrap_or(0.0),
        resultant_recovered: recovered_resultant(ev, nodes)?,
        resultant_expected: crate::loading::resultant(&ev.geometry, &ev.material),
        exclusion_band_deg: GIBBS_BAND_DEG,
        free_samples: free.len(),
        constrained_samples: fixed.len(),
        tunnel_samples: tunnel.len(),
        resultant_nodes: nodes,
    })
}

/// Largest deviation of a sampled curve from the mean of its neighbours.
pub fn oscillation_amplitude(values: &[f64]) -> f64 {
    values
        .windows(3)
        .map(|w| (w[1] - 0.5 * (w[0] + w[2])).abs())
        .fold(0.0, f64::max)
}

/// `sigma_theta` sampled at `samples` midpoints of the constrained arc.
pub fn constrained_hoop_stress(ev: &Evaluator, samples: usize) -> Result<Vec<f64>> {
    let theta0 = ev.derived.theta0;
    let mut out = Vec::with_capacity(samples);
    for j in 0..samples {
        let th = -theta0 + (j as f64 + 0.5) * 2.0 * theta0 / samples as f64;
        let zeta = Complex64::from_polar(1.0, th);
        if (zeta - 1.0).norm() < EXCLUSION_RADIUS {
            continue;
        }
        out.push(ev.annulus(zeta)?.sigma_theta);
    }
    Ok(out)
}

/// Coefficients of one periphery harmonic on both sides of the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPair {
    pub general: Complex64,
    pub degenerate: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationReport {
    /// `e^{-ik theta}` for `k = 1..`.
    pub negative: Vec<HarmonicPair>,
    /// `e^{ik theta}` for `k = 2..`.
    pub positive: Vec<HarmonicPair>,
    /// Coefficient of `-e^{i theta}/r`.
    pub first: HarmonicPair,
    pub constant: HarmonicPair,
    /// Real part of `C = i(A_-2 - A_0)/2 + i C_a`, which must vanish.
    pub c_real: f64,
    pub max_abs_discrepancy: f64,
    /// Discrepancy over the magnitude of the largest term in each harmonic.
    pub max_rel_discrepancy: f64,
}

/// General periphery coefficients scaled by `i/2`, for arbitrary `A`, `B`.
fn general_coefficients(a: &IndexedSeries, b: &IndexedSeries, ca: f64, r: f64, kmax: i32) -> (Vec<(Complex64, f64)>, Vec<(Complex64, f64)>, (Complex64, f64), (Complex64, f64)) {
    let half_i = Complex64::new(0.0, 0.5);
    let r2 = r * r;
    let scaled = |terms: &[f64]| -> (Complex64, f64) {
        let s: f64 = terms.iter().sum();
        let mag = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        (half_i * s, 0.5 * mag)
    };
    let mut neg = Vec::new();
    for k in 1..=kmax {
        let kf = k as f64;
        neg.push(scaled(&[
            2.0 * r.powi(-k) / -kf * a.get(-k - 1),
            -2.0 * r.powi(-k) / (-kf - 1.0) * a.get(-k - 2),
            2.0 * r.powi(k) / kf * b.get(-k - 1),
            -2.0 * r.powi(k + 2) / (kf + 1.0) * b.get(-k - 2),
            2.0 * (1.0 - r2) * r.powi(k) * a.get(k),
            -2.0 * (1.0 - r2) * r.powi(k) * a.get(k - 1),
        ]));
    }
    let mut pos = Vec::new();
    for k in 2..=kmax {
        let kf = k as f64;
        pos.push(scaled(&[
            2.0 * r.powi(k) / kf * a.get(k - 1),
            -2.0 * r.powi(k) / (kf - 1.0) * a.get(k - 2),
            2.0 * r.powi(-k) / -kf * b.get(k - 1),
            -2.0 * r.powi(2 - k) / (1.0 - kf) * b.get(k - 2),
            2.0 * (1.0 - r2) * r.powi(-k) * a.get(-k),
            -2.0 * (1.0 - r2) * r.powi(-k) * a.get(-k - 1),
        ]));
    }
    let ca_t = -(a.get(0) - a.get(-2)) + 2.0 * (a.get(-1) + b.get(-1)) * r.ln() + 2.0 * ca;
    let first = scaled(&[
        2.0 * (b.get(0) - r2 * a.get(0)),
        2.0 * (1.0 - r2) * a.get(-2),
        2.0 * (r2 - 1.0) * a.get(-1),
        r2 * ca_t,
    ]);
    let constant = scaled(&[
        2.0 * (1.0 - r2) * a.get(0),
        2.0 * (a.get(-2) - r2 * b.get(-2)),
        2.0 * (r2 - 1.0) * a.get(-1),
        ca_t,
    ]);
    (neg, pos, first, constant)
}

/// The same coefficients in the traction-free, unconstrained form, valid
/// when `A_-1 = B_-1 = 0` and `B_k = A_k` elsewhere.
fn degenerate_coefficients(a: &IndexedSeries, ca: f64, r: f64, kmax: i32) -> (Vec<Complex64>, Vec<Complex64>, Complex64, Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let r2 = r * r;
    let neg = (1..=kmax)
        .map(|k| {
            let kf = k as f64;
            (r.powi(-k) - r.powi(k)) * i * a.get(-k - 1) / -kf
                + (r.powi(k + 2) - r.powi(-k)) * i * a.get(-k - 2) / (-kf - 1.0)
                + (1.0 - r2) * r.powi(k) * i * (a.get(k) - a.get(k - 1))
        })
        .collect();
    let pos = (2..=kmax)
        .map(|k| {
            let kf = k as f64;
            (r.powi(k) - r.powi(-k)) * i * a.get(k - 1) / kf
                + (r.powi(2 - k) - r.powi(k)) * i * a.get(k - 2) / (kf - 1.0)
                + (1.0 - r2) * r.powi(-k) * i * (a.get(-k) - a.get(-k - 1))
        })
        .collect();
    let c = 0.5 * i * (a.get(-2) - a.get(0)) + i * ca;
    let base = i * (1.0 - r2) * (a.get(0) + a.get(-2));
    (neg, pos, base + r2 * c, base + c, c)
}

/// Compares the general periphery coefficients with their degenerate form on
/// a balanced spectrum built from `a` (`B_k = A_k`, `A_-1 = B_-1 = 0`).
pub fn degeneration_check(a: &IndexedSeries, ca: f64, r: f64) -> Result<DegenerationReport> {
    if a.get(-1) != 0.0 {
        return Err(TunnelError::InvalidConfig("balanced spectrum needs A_-1 = 0".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(TunnelError::DegenerateGeometry(format!("inner radius {r} outside (0, 1)")));
    }
    let b = a.clone();
    let kmax = a.hi().max(-a.lo()) + 2;
    let (gn, gp, gf, gc) = general_coefficients(a, &b, ca, r, kmax);
    let (dn, dp, df, dc, c) = degenerate_coefficients(a, ca, r, kmax);
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut pair = |(g, mag): (Complex64, f64), d: Complex64| {
        let diff = (g - d).norm();
        max_abs = max_abs.max(diff);
        if mag > 0.0 {
            max_rel = max_rel.max(diff / mag);
        }
        HarmonicPair { general: g, degenerate: d }
    };
    let negative = gn.into_iter().zip(dn).map(|(g, d)| pair(g, d)).collect();
    let positive = gp.into_iter().zip(dp).map(|(g, d)| pair(g, d)).collect();
    let first = pair(gf, df);
    let constant = pair(gc, dc);
    Ok(DegenerationReport {
        negative,
        positive,
        first,
        constant,
        c_real: c.re,
        max_abs_discrepancy: max_abs,
        max_rel_discrepancy: max_rel,
    })
}

/// Normalized boundary curves of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfiles {
    pub x0_over_h: f64,
    /// Local periphery angles, degrees.
    pub tunnel_theta_deg: Vec<f64>,
    pub tunnel_v: Vec<f64>,
    pub tunnel_u: Vec<f64>,
    /// Total hoop stress over `gamma h`.
    pub tunnel_hoop: Vec<f64>,
    /// Surface abscissae over `h`.
    pub surface_x_over_h: Vec<f64>,
    pub surface_v: Vec<f64>,
    pub surface_u: Vec<f64>,
    /// Total `sigma_x` over `gamma h`.
    pub surface_sx: Vec<f64>,
}

/// Profiles on `tunnel_samples` periphery angles and `surface_samples`
/// surface points with `x` in `[0, 4h]`.
pub fn boundary_profiles(ev: &Evaluator, tunnel_samples: usize, surface_samples: usize) -> Result<BoundaryProfiles> {
    let sc = ev.scales();
    let h = ev.geometry.depth;
    let mut p = BoundaryProfiles {
        x0_over_h: ev.geometry.x0 / h,
        tunnel_theta_deg: Vec::new(),
        tunnel_v: Vec::new(),
        tunnel_u: Vec::new(),
        tunnel_hoop: Vec::new(),
        surface_x_over_h: Vec::new(),
        surface_v: Vec::new(),
        surface_u: Vec::new(),
        surface_sx: Vec::new(),
    };
    for vt in midpoint_angles(tunnel_samples) {
        let f = ev.physical_at_zeta(tunnel_point(vt, ev)?)?;
        let (s, c) = vt.sin_cos();
        let t = f.total;
        let hoop = t.sigma_x * s * s + t.sigma_y * c * c - 2.0 * t.tau_xy * s * c;
        p.tunnel_theta_deg.push(vt.to_degrees());
        p.tunnel_v.push(ratio(f.v, sc.disp_scale));
        p.tunnel_u.push(ratio(f.u, sc.disp_scale));
        p.tunnel_hoop.push(ratio(hoop, sc.stress_scale));
    }
    for j in 0..surface_samples {
        let xh = if surface_samples == 1 { 0.0 } else { 4.0 * j as f64 / (surface_samples - 1) as f64 };
        let zeta = map_forward(Complex64::new(xh * h, 0.0), &ev.derived)?;
        let zeta = zeta / zeta.norm();
        let f = ev.physical_at_zeta(zeta)?;
        p.surface_x_over_h.push(xh);
        p.surface_v.push(ratio(f.v, sc.disp_scale));
        p.surface_u.push(ratio(f.u, sc.disp_scale));
        p.surface_sx.push(ratio(f.total.sigma_x, sc.stress_scale));
    }
    Ok(p)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Max-norm differences between two consecutive cases of the study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDifference {
    pub from_x0_over_h: f64,
    pub to_x0_over_h: f64,
    pub tunnel_v: f64,
    pub tunnel_u: f64,
    pub tunnel_hoop: f64,
    pub surface_v: f64,
    pub surface_u: f64,
    pub surface_sx: f64,
}

impl ProfileDifference {
    pub fn between(a: &BoundaryProfiles, b: &BoundaryProfiles) -> Self {
        Self {
            from_x0_over_h: a.x0_over_h,
            to_x0_over_h: b.x0_over_h,
            tunnel_v: max_diff(&a.tunnel_v, &b.tunnel_v),
            tunnel_u: max_diff(&a.tunnel_u, &b.tunnel_u),
            tunnel_hoop: max_diff(&a.tunnel_hoop, &b.tunnel_hoop),
            surface_v: max_diff(&a.surface_v, &b.surface_v),
            surface_u: max_diff(&a.surface_u, &b.surface_u),
            surface_sx: max_diff(&a.surface_sx, &b.surface_sx),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    /// One entry per requested `x0/h`, in order; failures are kept.
    pub cases: Vec<(f64, Result<BoundaryProfiles>)>,
    /// Differences between consecutive successful cases.
    pub differences: Vec<ProfileDifference>,
}

/// Solves `base` once per `x0/h` value and compares consecutive profiles.
pub fn convergence_study(
    base: &TunnelGeometry,
    m: &Material,
    cfg: &SolverConfig,
    x0_over_h: &[f64],
    samples: usize,
) -> ConvergenceStudy {
    let cases: Vec<(f64, Result<BoundaryProfiles>)> = x0_over_h
        .iter()
        .map(|&ratio| {
            let run = || -> Result<BoundaryProfiles> {
                let g = TunnelGeometry::new(base.radius, base.depth, ratio * base.depth)?;
                let sol = run_solver(&g, m, cfg)?;
                let ev = Evaluator::new(&g, m, FieldSeries::from_solution(&sol)?)?;
                boundary_profiles(&ev, samples, samples)
            };
            (ratio, run())
        })
        .collect();
    let ok: Vec<&BoundaryProfiles> = cases.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
    let differences = ok.windows(2).map(|w| ProfileDifference::between(w[0], w[1])).collect();
    ConvergenceStudy { cases, differences }
}
