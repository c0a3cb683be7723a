//! Stress and displacement recovery in the annulus and the physical plane.

use crate::error::{Result, TunnelError};
use crate::geometry::{derive_geometry, BOUNDARY_TOL, map_backward, map_derivative, map_forward, DerivedGeometry, TunnelGeometry};
use crate::loading::{initial_stress, Material};
use crate::series::{lanczos_weights, FilterWeights, IndexedSeries};
use crate::solver::{compute_c0, psi_coefficients, SolutionCoefficients};
use num_complex::Complex64;
use rayon::prelude::*;

/// Points closer than this to `zeta = 1` (the image of infinity) are refused.
pub const EXCLUSION_RADIUS: f64 = 1e-4;

/// Tolerance on `|zeta|` when checking annulus membership.
const RADIAL_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients used for field evaluation, filtered or not.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSeries {
    pub n: usize,
    pub a: IndexedSeries,
    pub b: IndexedSeries,
    pub psi: IndexedSeries,
    pub c0: f64,
    pub kappa: f64,
    pub filtered: bool,
}

impl FieldSeries {
    /// Builds the series from raw `A`, `B`, recomputing `psi` and `C0`.
    pub fn new(a: IndexedSeries, b: IndexedSeries, kappa: f64, n: usize, filtered: bool) -> Self {
        let psi = psi_coefficients(&a, &b, n);
        let c0 = compute_c0(&a, &b, kappa, n);
        Self { n, a, b, psi, c0, kappa, filtered }
    }

    /// Series as configured by the solver's `lanczos` flag.
    pub fn from_solution(sol: &SolutionCoefficients) -> Result<Self> {
        if sol.lanczos {
            apply_filter(sol, Some(&lanczos_weights(sol.n)?))
        } else {
            apply_filter(sol, None)
        }
    }
}

/// Multiplies `A` and `B` by the weights and recomputes `psi` and `C0`.
/// `None` leaves the coefficients untouched.
pub fn apply_filter(sol: &SolutionCoefficients, w: Option<&FilterWeights>) -> Result<FieldSeries> {
    Ok(match w {
        Some(w) => {
            if w.n() != sol.n {
                return Err(TunnelError::InvalidConfig(format!(
                    "filter built for N = {}, solution has N = {}",
                    w.n(),
                    sol.n
                )));
            }
            FieldSeries::new(w.apply(&sol.a), w.apply(&sol.b), sol.kappa, sol.n, true)
        }
        None => FieldSeries::new(sol.a.clone(), sol.b.clone(), sol.kappa, sol.n, false),
    })
}

/// Powers `zeta^j` for `j` in `[-m, m]`, built by repeated multiplication.
struct Powers {
    m: i32,
    values: Vec<Complex64>,
}

impl Powers {
    fn new(zeta: Complex64, m: i32) -> Self {
        let len = (2 * m + 1) as usize;
        let mut values = vec![Complex64::new(1.0, 0.0); len];
        let inv = zeta.inv();
        let c = m as usize;
        for j in 1..=c {
            values[c + j] = values[c + j - 1] * zeta;
            values[c - j] = values[c - j + 1] * inv;
        }
        Self { m, values }
    }

    fn get(&self, j: i32) -> Complex64 {
        debug_assert!(j.abs() <= self.m);
        self.values[(j + self.m) as usize]
    }
}

fn check_point(zeta: Complex64, dg: &DerivedGeometry, allow_infinity: bool) -> Result<()> {
    let rho = zeta.norm();
    if !rho.is_finite() || rho < dg.r - RADIAL_TOL || rho > 1.0 + RADIAL_TOL {
        return Err(TunnelError::OutsideDomain(format!("|zeta| = {rho} is outside [{}, 1]", dg.r)));
    }
    let near = (zeta - 1.0).norm();
    if near < EXCLUSION_RADIUS && !(allow_infinity && near == 0.0) {
        return Err(TunnelError::Singularity(format!("|zeta - 1| = {near:e} is inside the exclusion radius")));
    }
    Ok(())
}

/// `(sigma_rho, sigma_theta, tau_rhotheta)` at an annulus point.
pub fn eval_annulus_stress(zeta: Complex64, fs: &FieldSeries, dg: &DerivedGeometry) -> Result<(f64, f64, f64)> {
    check_point(zeta, dg, false)?;
    let n = fs.n as i32;
    let a = dg.a;
    let zb = zeta.conj();
    let w = zb / zeta;
    let pz = Powers::new(zeta, n + 1);
    let pb = Powers::new(zb, n + 1);
    let (mut s, mut sb, mut d, mut p) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
    for (k, ak) in fs.a.iter() {
        s += ak * pz.get(k);
        sb += ak * pb.get(k);
        d += (k as f64 * ak) * pb.get(k - 1);
        p += ((k + 2) as f64 * ak) * pb.get(k + 1);
    }
    let mut q = Complex64::default();
    for (k, bk) in fs.b.iter() {
        q += bk * pb.get(-k - 2);
    }
    let one = Complex64::new(1.0, 0.0);
    let m1 = (one - zeta) * (one - zeta);
    let mb1 = (one - zb) * (one - zb);
    let m2 = one - zeta * zeta;
    let phi_scale = m1 / (-2.0 * a);
    let srt = mb1 / (-2.0 * a) * sb + w * m1 / (-4.0 * a) * p + w * m1 / (4.0 * a) * d
        + m2 / (-2.0 * a) * (one - zb) * w * sb
        + m2 / (4.0 * a) * mb1 * w * d
        + phi_scale * s
        + m1 * w / (2.0 * a) * q;
    let sum = 4.0 * (phi_scale * s).re;
    Ok((srt.re, sum - srt.re, srt.im))
}

/// The displacement series `2G(u + iv) - i C0`; evaluating it at
/// `zeta = 1` defines `C0`.
pub fn displacement_series(zeta: Complex64, a: &IndexedSeries, b: &IndexedSeries, kappa: f64, n: usize) -> Complex64 {
    let n = n as i32;
    let zb = zeta.conj();
    let pz = Powers::new(zeta, n + 2);
    let pb = Powers::new(zb, n + 2);
    let mut g = Complex64::default();
    for k in 1..=n + 2 {
        let kf = k as f64;
        let pos = kappa * a.get(k - 1) / kf * pz.get(k) + (0.5 * (a.get(k - 2) - a.get(k)) - b.get(-k - 1) / kf) * pb.get(k);
        let neg = kappa * a.get(-k - 1) / -kf * pz.get(-k) + (0.5 * (a.get(-k - 2) - a.get(-k)) - b.get(k - 1) / -kf) * pb.get(-k);
        g += I * pos + I * neg;
    }
    let one = Complex64::new(1.0, 0.0);
    if zeta != one {
        let mut sb = Complex64::default();
        for (k, ak) in a.iter() {
            sb += ak * pb.get(k);
        }
        g -= I * (one + zeta) / 2.0 * (one - zb) * (one - zb) / (one - zeta) * sb;
    }
    g += I * (kappa * a.get(-1) - b.get(-1)) * zeta.norm().ln();
    g
}

/// `(u, v)` at an annulus point; exactly zero at `zeta = 1`.
pub fn eval_annulus_displacement(zeta: Complex64, fs: &FieldSeries, dg: &DerivedGeometry, m: &Material) -> Result<(f64, f64)> {
    check_point(zeta, dg, true)?;
    let g = displacement_series(zeta, &fs.a, &fs.b, fs.kappa, fs.n) + I * fs.c0;
    let uv = g / (2.0 * m.g);
    Ok((uv.re, uv.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnnulusField {
    pub sigma_rho: f64,
    pub sigma_theta: f64,
    pub tau_rhotheta: f64,
    pub u: f64,
    pub v: f64,
}

pub fn eval_annulus(zeta: Complex64, fs: &FieldSeries, dg: &DerivedGeometry, m: &Material) -> Result<AnnulusField> {
    let (sigma_rho, sigma_theta, tau_rhotheta) = eval_annulus_stress(zeta, fs, dg)?;
    let (u, v) = eval_annulus_displacement(zeta, fs, dg, m)?;
    Ok(AnnulusField { sigma_rho, sigma_theta, tau_rhotheta, u, v })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressComponents {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tau_xy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalField {
    pub x: f64,
    pub y: f64,
    pub induced: StressComponents,
    pub total: StressComponents,
    pub u: f64,
    pub v: f64,
    /// Principal stresses of the total field.
    pub sigma_max: f64,
    pub sigma_min: f64,
}

/// Unit-modulus factor `(conj zeta / zeta)(conj z' / z')` taking polar
/// annulus components to Cartesian physical ones.
pub fn rotation_factor(zeta: Complex64, dg: &DerivedGeometry) -> Result<Complex64> {
    let zp = map_derivative(zeta, dg)?;
    Ok(zeta.conj() / zeta * (zp.conj() / zp))
}

pub fn to_physical(zeta: Complex64, f: &AnnulusField, dg: &DerivedGeometry, m: &Material) -> Result<PhysicalField> {
    check_point(zeta, dg, false)?;
    let mut z = map_backward(zeta, dg)?;
    // Surface points come back with round-off of either sign.
    if z.im > 0.0 && z.im <= BOUNDARY_TOL * dg.a {
        z.im = 0.0;
    }
    let rot = rotation_factor(zeta, dg)?;
    let sum = f.sigma_theta + f.sigma_rho;
    let dif = Complex64::new(f.sigma_theta - f.sigma_rho, 2.0 * f.tau_rhotheta) * rot;
    let induced = StressComponents {
        sigma_x: 0.5 * (sum - dif.re),
        sigma_y: 0.5 * (sum + dif.re),
        tau_xy: 0.5 * dif.im,
    };
    let (sx0, sy0, t0) = initial_stress(z.im, m)?;
    let total = StressComponents {
        sigma_x: induced.sigma_x + sx0,
        sigma_y: induced.sigma_y + sy0,
        tau_xy: induced.tau_xy + t0,
    };
    let (sigma_max, sigma_min) = principal(total.sigma_x, total.sigma_y, total.tau_xy);
    Ok(PhysicalField { x: z.re, y: z.im, induced, total, u: f.u, v: f.v, sigma_max, sigma_min })
}

pub fn principal(sx: f64, sy: f64, txy: f64) -> (f64, f64) {
    let mean = 0.5 * (sx + sy);
    let rad = (0.5 * (sx - sy)).hypot(txy);
    (mean + rad, mean - rad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationScales {
    /// `gamma h`, kPa.
    pub stress_scale: f64,
    /// `u0 = gamma h R / (2G)`, metres.
    pub disp_scale: f64,
}

impl NormalizationScales {
    pub fn new(geom: &TunnelGeometry, m: &Material) -> Self {
        let stress_scale = m.gamma * geom.depth;
        Self { stress_scale, disp_scale: stress_scale * geom.radius / (2.0 * m.g) }
    }
}

/// Everything needed to evaluate fields of one solved case.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub geometry: TunnelGeometry,
    pub derived: DerivedGeometry,
    pub material: Material,
    pub series: FieldSeries,
}

impl Evaluator {
    pub fn new(geom: &TunnelGeometry, m: &Material, series: FieldSeries) -> Result<Self> {
        Ok(Self { geometry: *geom, derived: derive_geometry(geom)?, material: *m, series })
    }

    pub fn annulus(&self, zeta: Complex64) -> Result<AnnulusField> {
        eval_annulus(zeta, &self.series, &self.derived, &self.material)
    }

    pub fn physical_at_zeta(&self, zeta: Complex64) -> Result<PhysicalField> {
        let f = self.annulus(zeta)?;
        to_physical(zeta, &f, &self.derived, &self.material)
    }

    pub fn physical_at(&self, z: Complex64) -> Result<PhysicalField> {
        self.physical_at_zeta(map_forward(z, &self.derived)?)
    }

    pub fn scales(&self) -> NormalizationScales {
        NormalizationScales::new(&self.geometry, &self.material)
    }
}

/// Rectangular grid over the physical plane; `nx`, `ny` count points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                vec![lo]
            } else {
                {
                let m = (n - 1) as f64;
                // Exactly mirrored when lo = -hi.
                (0..n).map(|i| (lo * (m - i as f64) + hi * i as f64) / m).collect()
            }
            }
        };
        let xs = axis(self.x_min, self.x_max, self.nx);
        let ys = axis(self.y_min, self.y_max, self.ny);
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    /// `None` inside the tunnel, above the surface, on either boundary, or at
    /// points too far away to resolve.
    pub field: Option<PhysicalField>,
}

/// Evaluates the grid row by row in parallel; output order follows
/// [`GridSpec::points`].
pub fn evaluate_grid(spec: &GridSpec, ev: &Evaluator) -> Vec<GridRow> {
    let margin = 1e-6 * ev.geometry.radius;
    let centre = ev.geometry.centre();
    spec.points()
        .into_par_iter()
        .map(|(x, y)| {
            let z = Complex64::new(x, y);
            let inside = y < -margin && (z - centre).norm() > ev.geometry.radius + margin;
            let field = if inside { ev.physical_at(z).ok() } else { None };
            GridRow { x, y, field }
        })
        .collect()
}
