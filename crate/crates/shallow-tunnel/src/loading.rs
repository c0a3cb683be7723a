//! Initial stress, the tractions released on the tunnel periphery, and the
//! loading coefficients that feed the solver right-hand sides.
//!
//! Units: lengths in m, unit weight in kN/m^3, stresses in kPa.

use crate::error::{Result, TunnelError};
use crate::geometry::{DerivedGeometry, TunnelGeometry};
use crate::series::IndexedSeries;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Strain,
    Stress,
}

/// Elastic constants plus the initial-stress parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Unit weight in kN/m^3.
    pub gamma: f64,
    /// Lateral stress coefficient.
    pub k0: f64,
    /// Young's modulus in kPa.
    pub e: f64,
    /// Poisson ratio.
    pub nu: f64,
    pub plane: Plane,
    /// Kolosov coefficient.
    pub kappa: f64,
    /// Shear modulus in kPa.
    pub g: f64,
    /// Exponent `ln(kappa) / 2pi` of the Riemann-Hilbert kernel.
    pub lambda: f64,
}

impl Material {
    pub fn new(gamma: f64, k0: f64, e: f64, nu: f64, plane: Plane) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(TunnelError::InvalidConfig(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(k0 >= 0.0) || !k0.is_finite() {
            return Err(TunnelError::InvalidConfig(format!("k0 must be >= 0, got {k0}")));
        }
        if !(e > 0.0) || !e.is_finite() {
            return Err(TunnelError::InvalidConfig(format!("E must be positive, got {e}")));
        }
        if !(nu > 0.0 && nu < 0.5) {
            return Err(TunnelError::InvalidConfig(format!("nu must lie in (0, 0.5), got {nu}")));
        }
        let kappa = match plane {
            Plane::Strain => 3.0 - 4.0 * nu,
            Plane::Stress => (3.0 - nu) / (1.0 + nu),
        };
        Ok(Self {
            gamma,
            k0,
            e,
            nu,
            plane,
            kappa,
            g: e / (2.0 * (1.0 + nu)),
            lambda: kappa.ln() / (2.0 * PI),
        })
    }
}

/// Initial stress `(sigma_x, sigma_y, tau_xy)` at depth coordinate `y <= 0`.
pub fn initial_stress(y: f64, m: &Material) -> Result<(f64, f64, f64)> {
    if y > 0.0 {
        return Err(TunnelError::OutsideDomain(format!("y = {y} lies above the ground surface")));
    }
    Ok((m.k0 * m.gamma * y, m.gamma * y, 0.0))
}

/// Traction `(X, Y)` released on the periphery at local polar angle `vartheta`
/// about the tunnel centre.
pub fn periphery_traction(vartheta: f64, geom: &TunnelGeometry, m: &Material) -> (f64, f64) {
    let (s, c) = vartheta.sin_cos();
    let y = -geom.depth + geom.radius * s;
    (m.k0 * m.gamma * y * c, m.gamma * y * s)
}

/// Net force exerted on the periphery, kN/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resultant {
    pub fx: f64,
    pub fy: f64,
}

pub fn resultant(geom: &TunnelGeometry, m: &Material) -> Resultant {
    Resultant { fx: 0.0, fy: m.gamma * PI * geom.radius * geom.radius }
}

/// Integrates `f` over a circle of radius `radius` traversed clockwise with
/// the positive length element `|dS| = -radius d(angle)`, using the periodic
/// trapezoid rule on `nodes` points. `f` receives the angle.
pub fn clockwise_circle_integral<F>(radius: f64, nodes: usize, f: F) -> (f64, f64)
where
    F: Fn(f64) -> (f64, f64),
{
    let step = 2.0 * PI / nodes as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    // Angle runs from 2pi down to 0; with |dS| = -radius d(angle) every
    // panel contributes a positive length radius * step.
    for j in (0..nodes).rev() {
        let (x, y) = f(j as f64 * step);
        sx += x;
        sy += y;
    }
    (sx * radius * step, sy * radius * step)
}

/// Partial-fraction and lumped-load constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadingConstants {
    pub r: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
}

impl LoadingConstants {
    /// `f_k = K1 r^k`.
    pub fn f(&self, k: i32) -> f64 {
        self.k1 * self.r.powi(k)
    }

    /// `g_k = K2 k r^(k-1) + K3 (k-1) r^(k-2)`.
    pub fn g(&self, k: i32) -> f64 {
        let kf = k as f64;
        self.k2 * kf * self.r.powi(k - 1) + self.k3 * (kf - 1.0) * self.r.powi(k - 2)
    }

    /// Traction-series coefficient `E_k` for any integer `k`.
    pub fn e(&self, k: i32) -> f64 {
        let r = self.r;
        match k {
            1 => self.l1 * self.g(1) + self.l2 * r - self.l6 * r,
            0 => self.l1 * self.g(2) + self.l2 - self.l4 * r + self.l5 - self.l6 * r * r,
            k if k >= 2 => {
                let rk = r.powi(k);
                let kf = k as f64;
                self.l1 * self.f(k - 2) + self.l2 * rk - self.l6 * rk / kf + self.l6 * rk / (kf - 1.0)
            }
            _ => {
                let k = -k;
                let kf = k as f64;
                let rk = r.powi(k);
                self.l1 * self.g(k + 2)
                    + self.l3 * (kf - 1.0) * r.powi(k - 2)
                    - self.l3 * kf * rk
                    + self.l4 * r.powi(k - 1)
                    - self.l4 * r.powi(k + 1)
                    + self.l6 * rk / kf
                    - self.l6 * r.powi(k + 2) / (kf + 1.0)
            }
        }
    }
}

pub fn loading_constants(geom: &TunnelGeometry, dg: &DerivedGeometry, m: &Material) -> LoadingConstants {
    let r = dg.r;
    let r2 = r * r;
    let q = (1.0 - r2) * (1.0 - r2);
    let (a, rad, g) = (dg.a, geom.radius, m.gamma);
    LoadingConstants {
        r,
        k1: r2 / q,
        k2: r / q,
        k3: (1.0 - 2.0 * r2) / q,
        l1: -m.k0 * g * a * a * q,
        l2: -g * a * a,
        l3: g * a * a * r2,
        l4: g * a * rad,
        l5: -g * a * r * rad,
        l6: g * rad * rad,
    }
}

/// Dense `E_k` for `k` in `[-n, n]`.
pub fn compute_e(n: usize, lc: &LoadingConstants) -> Result<IndexedSeries> {
    if n < 2 {
        return Err(TunnelError::InvalidConfig(format!("truncation order must be >= 2, got {n}")));
    }
    let n = n as i32;
    Ok(IndexedSeries::from_fn(-n, n, |k| lc.e(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derive_geometry;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn benchmark() -> (TunnelGeometry, DerivedGeometry, Material) {
        let t = TunnelGeometry::new(5.0, 10.0, 1000.0).unwrap();
        let m = Material::new(20.0, 0.8, 20_000.0, 0.3, Plane::Strain).unwrap();
        (t, derive_geometry(&t).unwrap(), m)
    }

    #[test]
    fn material_constants() {
        let (_, _, m) = benchmark();
        assert!((m.kappa - 1.8).abs() < 1e-15);
        assert!((m.g - 7692.307692307692).abs() < 1e-9);
        assert!((m.lambda - 0.093549).abs() < 1e-6);
        let s = Material::new(20.0, 0.8, 20_000.0, 0.3, Plane::Stress).unwrap();
        assert!((s.kappa - 2.7 / 1.3).abs() < 1e-15);
        assert!(Material::new(20.0, 0.8, 20_000.0, 0.6, Plane::Strain).is_err());
        assert!(Material::new(20.0, 0.8, 0.0, 0.3, Plane::Strain).is_err());
    }

    #[test]
    fn initial_stress_examples() {
        let (_, _, m) = benchmark();
        assert_eq!(initial_stress(0.0, &m).unwrap(), (0.0, 0.0, 0.0));
        let (sx, sy, t) = initial_stress(-10.0, &m).unwrap();
        assert!((sx + 160.0).abs() < 1e-12 && (sy + 200.0).abs() < 1e-12 && t == 0.0);
        let h = Material::new(20.0, 1.0, 20_000.0, 0.3, Plane::Strain).unwrap();
        let (sx, sy, _) = initial_stress(-10.0, &h).unwrap();
        assert_eq!(sx, sy);
        assert!(initial_stress(1.0, &m).is_err());
    }

    #[test]
    fn traction_examples() {
        let (t, _, m) = benchmark();
        let (x, y) = periphery_traction(PI / 2.0, &t, &m);
        assert!(x.abs() < 1e-12 && (y + 100.0).abs() < 1e-12);
        let (x, y) = periphery_traction(0.0, &t, &m);
        assert!((x + 160.0).abs() < 1e-12 && y.abs() < 1e-12);
    }

    #[test]
    fn resultant_examples() {
        let (t, _, m) = benchmark();
        let r = resultant(&t, &m);
        assert_eq!(r.fx, 0.0);
        assert!((r.fy - 1570.796).abs() < 1e-3);
        let z = Material::new(0.0, 0.8, 20_000.0, 0.3, Plane::Strain).unwrap();
        assert_eq!(resultant(&t, &z).fy, 0.0);
        let zero = TunnelGeometry { radius: 0.0, depth: 10.0, x0: 10.0 };
        assert_eq!(resultant(&zero, &m).fy, 0.0);
    }

    #[test]
    fn resultant_from_quadrature() {
        let (t, _, m) = benchmark();
        let (fx, fy) = clockwise_circle_integral(t.radius, 10_000, |v| periphery_traction(v, &t, &m));
        let exact = resultant(&t, &m).fy;
        assert!(fx.abs() <= 1e-8 * exact);
        assert!((fy - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn constants_examples() {
        let (t, dg, m) = benchmark();
        let lc = loading_constants(&t, &dg, &m);
        let r = 2.0 - 3f64.sqrt();
        let k2 = r / (1.0 - r * r).powi(2);
        assert!((lc.k2 - k2).abs() < 1e-14);
        // The commonly quoted six-digit value 0.311003 is off in its last digit.
        assert!((lc.k2 - 0.311003).abs() < 2e-6);
        assert!((lc.l6 - 500.0).abs() < 1e-10);
        assert!((lc.l2 + 1500.0).abs() < 1e-9);
        let deep = TunnelGeometry::new(1e-4, 1e4, 1.0).unwrap();
        let lc = loading_constants(&deep, &derive_geometry(&deep).unwrap(), &m);
        assert!(lc.k1 < 1e-15 && (lc.k3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_fraction_identity() {
        let (t, dg, m) = benchmark();
        let lc = loading_constants(&t, &dg, &m);
        let r = dg.r;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
            let lhs = 1.0 / ((1.0 - r * w) * (w - r) * (w - r));
            let rhs = lc.k1 / (1.0 - r * w) + (lc.k2 * w + lc.k3) / ((w - r) * (w - r));
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
            let mut series = Complex64::new(0.0, 0.0);
            for k in 0..200 {
                series += lc.f(k) * w.powi(k);
                if k >= 1 {
                    series += lc.g(k) * w.powi(-k);
                }
            }
            assert!((lhs - series).norm() <= 1e-12 * lhs.norm());
        }
    }

    /// Fourier coefficients of `-2i (1 - r e^{it})` times the single-valued part
    /// of the integrated tunnel traction, computed by direct summation.
    fn e_oracle(t: &TunnelGeometry, dg: &DerivedGeometry, m: &Material, ks: &[i32]) -> Vec<f64> {
        let (r, a, rad, g, k0) = (dg.r, dg.a, t.radius, m.gamma, m.k0);
        let i = Complex64::i();
        let nodes = 4096;
        let vals: Vec<Complex64> = (0..nodes)
            .map(|j| {
                let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
                let one_rw = 1.0 - r * w;
                let w_r = w - r;
                let integ = -i * k0 * g * a * a * (1.0 - r * r).powi(2) * w * w
                    / (2.0 * one_rw * one_rw * w_r * w_r)
                    - i * g * a * a / (2.0 * one_rw * one_rw)
                    + i * g * a * a * r * r / (2.0 * w_r * w_r)
                    + i * g * a * rad / (2.0 * w_r)
                    - i * g * a * r * rad / (2.0 * one_rw)
                    + i * g * rad * rad / 2.0 * (one_rw / (1.0 - r / w)).ln();
                -2.0 * i * one_rw * integ
            })
            .collect();
        ks.iter()
            .map(|&k| {
                let s: Complex64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k as f64) * j as f64 / nodes as f64))
                    .sum();
                let c = s / nodes as f64;
                assert!(c.im.abs() < 1e-9 * c.norm().max(1.0));
                c.re
            })
            .collect()
    }

    #[test]
    fn e_series_matches_fourier_oracle() {
        let ks: Vec<i32> = (-12..=12).collect();
        let (t, dg, m) = benchmark();
        let lc = loading_constants(&t, &dg, &m);
        let oracle = e_oracle(&t, &dg, &m, &ks);
        for (k, o) in ks.iter().zip(&oracle) {
            assert!((lc.e(*k) - o).abs() <= 1e-9 * o.abs().max(1.0), "k = {k}");
        }
        assert!((lc.e(1) + 857.4374157795924).abs() < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let rad = rng.gen_range(1.0..8.0);
            let t = TunnelGeometry::new(rad, rad * rng.gen_range(1.5..4.0), rng.gen_range(5.0..500.0)).unwrap();
            let m = Material::new(rng.gen_range(15.0..25.0), rng.gen_range(0.5..1.5), 2e4, 0.3, Plane::Strain).unwrap();
            let dg = derive_geometry(&t).unwrap();
            let lc = loading_constants(&t, &dg, &m);
            let oracle = e_oracle(&t, &dg, &m, &ks);
            for (k, o) in ks.iter().zip(&oracle) {
                assert!((lc.e(*k) - o).abs() <= 1e-9 * o.abs().max(1.0), "k = {k}");
            }
        }
    }

    #[test]
    fn e_series_properties() {
        let (t, dg, m) = benchmark();
        let lc = loading_constants(&t, &dg, &m);
        let e = compute_e(50, &lc).unwrap();
        assert_eq!(e.lo(), -50);
        assert_eq!(e.hi(), 50);
        for k in 20..=50 {
            let ratio = (e.get(k) / e.get(k - 1)).abs();
            assert!((ratio - dg.r).abs() < 0.1 * dg.r, "k = {k}, ratio {ratio}");
            let ratio = (e.get(-k) / e.get(-k + 1)).abs();
            assert!((ratio - dg.r).abs() < 0.1 * dg.r, "k = -{k}, ratio {ratio}");
        }
        let z = Material::new(0.0, 0.8, 20_000.0, 0.3, Plane::Strain).unwrap();
        let e0 = compute_e(20, &loading_constants(&t, &dg, &z)).unwrap();
        assert!(e0.values().iter().all(|v| *v == 0.0));
        assert!(compute_e(1, &lc).is_err());
    }
}
