//! Taylor coefficients of the Riemann-Hilbert kernel
//! `X(zeta) = (zeta - e^{-i theta0})^{-1/2 - i lambda} (zeta - e^{i theta0})^{-1/2 + i lambda}`
//! inside and outside the unit circle, and the Lanczos sigma factors.

use crate::error::{Result, TunnelError};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Real coefficients indexed by a contiguous integer window `[lo, hi]`.
/// Reads outside the window return zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSeries {
    lo: i32,
    values: Vec<f64>,
}

impl IndexedSeries {
    pub fn zeros(lo: i32, hi: i32) -> Self {
        assert!(hi >= lo - 1, "empty window [{lo}, {hi}]");
        Self { lo, values: vec![0.0; (hi - lo + 1) as usize] }
    }

    pub fn from_fn(lo: i32, hi: i32, f: impl FnMut(i32) -> f64) -> Self {
        Self { lo, values: (lo..=hi).map(f).collect() }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, k: i32) -> f64 {
        let idx = k - self.lo;
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }

    /// Panics when `k` lies outside the window.
    pub fn set(&mut self, k: i32, v: f64) {
        let idx = (k - self.lo) as usize;
        self.values[idx] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.lo + i as i32, *v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { lo: self.lo, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Adds `other` entrywise over this window.
    pub fn add_assign(&mut self, other: &IndexedSeries) {
        for (k, v) in self.values.iter_mut().enumerate() {
            *v += other.get(self.lo + k as i32);
        }
    }
}

/// Kernel expansion coefficients: `X = sum alpha_k zeta^k` for `|zeta| < 1`
/// and `X = sum beta_k zeta^{-k}` for `|zeta| > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularExpansion {
    /// `alpha_0 ..= alpha_{2N}`.
    pub alpha: Vec<f64>,
    /// `beta_0 ..= beta_{2N+2}` with `beta_0 = 0` as a placeholder.
    pub beta: Vec<f64>,
    pub lambda: f64,
    pub theta0: f64,
    /// Largest imaginary part discarded while forming the coefficients.
    pub max_imag_residue: f64,
}

impl AngularExpansion {
    pub fn new(n: usize, lambda: f64, theta0: f64) -> Result<Self> {
        let (alpha, ra) = alpha_with_residue(2 * n, lambda, theta0)?;
        let (beta, rb) = beta_with_residue(2 * n + 2, lambda, theta0)?;
        Ok(Self { alpha, beta, lambda, theta0, max_imag_residue: ra.max(rb) })
    }

    /// `alpha_k`, zero for negative or out-of-table indices.
    #[inline]
    pub fn alpha(&self, k: i32) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.alpha.get(k as usize).copied().unwrap_or(0.0)
        }
    }

    /// `beta_k`, zero for `k < 1` or out-of-table indices.
    #[inline]
    pub fn beta(&self, k: i32) -> f64 {
        if k < 1 {
            0.0
        } else {
            self.beta.get(k as usize).copied().unwrap_or(0.0)
        }
    }
}

const RESIDUE_TOL: f64 = 1e-12;

/// `a_k / k!` for `k = 0..=m`, built by the ratio
/// `(1/2 - i lambda - k) / k * rot` so no factorial is ever formed.
fn scaled_products(m: usize, lambda: f64, rot: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(Complex64::new(1.0, 0.0));
    for k in 1..=m {
        let kf = k as f64;
        let prev = out[k - 1];
        out.push(prev * Complex64::new(0.5 - kf, -lambda) / kf * rot);
    }
    out
}

/// Conjugate self-convolution `sum_{l=0}^{k} c_l conj(c_{k-l})` and the sum
/// of term magnitudes used to scale the reality check.
fn self_convolution(c: &[Complex64], k: usize) -> (Complex64, f64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for l in 0..=k {
        let t = c[l] * c[k - l].conj();
        s += t;
        mag += t.norm();
    }
    (s, mag)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn alpha_with_residue(m: usize, lambda: f64, theta0: f64) -> Result<(Vec<f64>, f64)> {
    if m < 2 {
        return Err(TunnelError::InvalidConfig(format!("alpha table needs M >= 2, got {m}")));
    }
    let pref = -(-2.0 * lambda * theta0).exp();
    let (s, c) = theta0.sin_cos();
    let a = scaled_products(m, lambda, Complex64::from_polar(1.0, theta0));
    let mut out = Vec::with_capacity(m + 1);
    out.push(pref);
    out.push(pref * (c - 2.0 * lambda * s));
    let mut worst: f64 = 0.0;
    for k in 2..=m {
        let (sum, mag) = self_convolution(&a, k);
        let v = sum * (pref * sign(k));
        let resid = v.im.abs() / mag.max(1.0);
        if resid > RESIDUE_TOL {
            return Err(TunnelError::NumericalInstability(format!(
                "alpha_{k} has imaginary residue {:.3e}",
                v.im
            )));
        }
        worst = worst.max(resid);
        out.push(v.re);
    }
    Ok((out, worst))
}

fn beta_with_residue(m: usize, lambda: f64, theta0: f64) -> Result<(Vec<f64>, f64)> {
    if m < 3 {
        return Err(TunnelError::InvalidConfig(format!("beta table needs M >= 3, got {m}")));
    }
    let (s, c) = theta0.sin_cos();
    let b = scaled_products(m - 1, lambda, Complex64::from_polar(1.0, -theta0));
    let mut out = vec![0.0, 1.0, c + 2.0 * lambda * s];
    let mut worst: f64 = 0.0;
    for k in 3..=m {
        let (sum, mag) = self_convolution(&b, k - 1);
        let v = sum * sign(k - 1);
        let resid = v.im.abs() / mag.max(1.0);
        if resid > RESIDUE_TOL {
            return Err(TunnelError::NumericalInstability(format!(
                "beta_{k} has imaginary residue {:.3e}",
                v.im
            )));
        }
        worst = worst.max(resid);
        out.push(v.re);
    }
    Ok((out, worst))
}

/// `alpha_0 ..= alpha_m`.
pub fn compute_alpha(m: usize, lambda: f64, theta0: f64) -> Result<Vec<f64>> {
    alpha_with_residue(m, lambda, theta0).map(|(v, _)| v)
}

/// `beta_0 ..= beta_m`, with `beta_0 = 0` unused.
pub fn compute_beta(m: usize, lambda: f64, theta0: f64) -> Result<Vec<f64>> {
    beta_with_residue(m, lambda, theta0).map(|(v, _)| v)
}

/// Lanczos sigma factors `L_k` for truncation order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterWeights {
    n: usize,
    values: IndexedSeries,
}

impl FilterWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `L_k`; zero for `|k| >= N`.
    #[inline]
    pub fn get(&self, k: i32) -> f64 {
        self.values.get(k)
    }

    /// Multiplies every entry of `s` by its weight.
    pub fn apply(&self, s: &IndexedSeries) -> IndexedSeries {
        IndexedSeries::from_fn(s.lo(), s.hi(), |k| self.get(k) * s.get(k))
    }
}

pub fn lanczos_weights(n: usize) -> Result<FilterWeights> {
    if n < 1 {
        return Err(TunnelError::InvalidConfig("filter order must be >= 1".into()));
    }
    let ni = n as i32;
    let values = IndexedSeries::from_fn(-ni, ni, |k| {
        if k == 0 {
            1.0
        } else if k.abs() >= ni {
            0.0
        } else {
            let x = k as f64 * PI / n as f64;
            x.sin() / x
        }
    });
    Ok(FilterWeights { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.09354892837886262;

    fn theta0_benchmark() -> f64 {
        2.0 * (75f64.sqrt() / 10.0).atan()
    }

    /// `log X` at `target` by integrating `d log X / d zeta` from a far point
    /// where `zeta X -> 1`. Paths into the disc pass through `zeta = -1`.
    fn log_kernel_path(lambda: f64, theta0: f64, pts: &[Complex64]) -> Complex64 {
        let p = Complex64::new(-0.5, -lambda);
        let q = Complex64::new(-0.5, lambda);
        let e1 = Complex64::from_polar(1.0, -theta0);
        let e2 = Complex64::from_polar(1.0, theta0);
        let z0 = pts[0];
        let mut l = -z0.ln() + p * (1.0 - e1 / z0).ln() + q * (1.0 - e2 / z0).ln();
        let dlog = |z: Complex64| p / (z - e1) + q / (z - e2);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // Composite Gauss-Legendre on a graded mesh; integrand is smooth
            // along segments that stay away from the branch points.
            let panels = 4000;
            let gl = [(-0.7745966692414834, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.7745966692414834, 5.0 / 9.0)];
            for j in 0..panels {
                let s0 = (j as f64 / panels as f64).powi(3);
                let s1 = ((j + 1) as f64 / panels as f64).powi(3);
                for (x, wgt) in gl {
                    let s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * x;
                    // s = 0 sits at the segment end, where the mesh is finest.
                    let z = b + (a - b) * s;
                    l += dlog(z) * (b - a) * (0.5 * (s1 - s0) * wgt);
                }
            }
        }
        l
    }

    #[test]
    fn closed_forms() {
        let th = theta0_benchmark();
        let e = AngularExpansion::new(50, LAMBDA, th).unwrap();
        assert!((e.alpha(0) + 0.76561).abs() < 1e-5);
        assert!((e.alpha(1) - 0.0324).abs() < 1e-4);
        assert_eq!(e.beta(1), 1.0);
        assert!((e.beta(2) - 0.3281).abs() < 1e-4);
        assert!(e.max_imag_residue <= 1e-12);
        assert_eq!(e.alpha.len(), 101);
        assert_eq!(e.beta.len(), 103);
        let a = compute_alpha(6, 0.0, 1.0).unwrap();
        assert_eq!(a[0], -1.0);
        let b = compute_beta(6, 0.0, PI / 2.0).unwrap();
        assert!(b[2].abs() < 1e-16);
        assert!(compute_alpha(1, 0.1, 1.0).is_err());
        assert!(compute_beta(2, 0.1, 1.0).is_err());
    }

    #[test]
    fn closed_forms_agree_with_convolution() {
        let th = theta0_benchmark();
        let a = scaled_products(3, LAMBDA, Complex64::from_polar(1.0, th));
        let pref = -(-2.0 * LAMBDA * th).exp();
        let alpha1 = (-(self_convolution(&a, 1).0) * pref).re;
        assert!((alpha1 - compute_alpha(4, LAMBDA, th).unwrap()[1]).abs() < 1e-15);
        let b = scaled_products(3, LAMBDA, Complex64::from_polar(1.0, -th));
        let beta2 = (-(self_convolution(&b, 1).0)).re;
        assert!((beta2 - compute_beta(4, LAMBDA, th).unwrap()[2]).abs() < 1e-15);
    }

    #[test]
    fn large_orders_stay_finite() {
        let a = compute_alpha(600, LAMBDA, 1.0).unwrap();
        assert!(a.iter().all(|v| v.is_finite()));
        let b = compute_beta(600, LAMBDA, 1.0).unwrap();
        assert!(b.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn kernel_reconstruction() {
        for &(lambda, theta0) in &[(LAMBDA, theta0_benchmark()), (LAMBDA, 0.2), (0.05, 2.5)] {
            let e = AngularExpansion::new(300, lambda, theta0).unwrap();
            for j in 0..50 {
                let rho = 0.1 + 0.7 * (j % 10) as f64 / 9.0;
                let th = -PI + 2.0 * PI * (j as f64 + 0.5) / 50.0;
                let z = Complex64::from_polar(rho, th);
                let sum: Complex64 = (0..e.alpha.len()).map(|k| e.alpha[k] * z.powi(k as i32)).sum();
                let via = Complex64::new(-0.5, 0.0);
                let far = Complex64::new(-1e3, 0.0);
                let oracle = log_kernel_path(lambda, theta0, &[far, via, z]).exp();
                assert!((sum - oracle).norm() <= 1e-8 * oracle.norm(), "interior {z}: {sum} vs {oracle}");
            }
            for j in 0..50 {
                let rho = 1.25 + 3.0 * (j % 10) as f64;
                let th = -PI + 2.0 * PI * (j as f64 + 0.5) / 50.0;
                let z = Complex64::from_polar(rho, th);
                let sum: Complex64 = (1..e.beta.len()).map(|k| e.beta[k] * z.powi(-(k as i32))).sum();
                let far = z * (1e3 / rho);
                let oracle = log_kernel_path(lambda, theta0, &[far, z]).exp();
                assert!((sum - oracle).norm() <= 1e-8 * oracle.norm(), "exterior {z}: {sum} vs {oracle}");
            }
            let z = Complex64::from_polar(1e6, 0.3);
            let sum: Complex64 = (1..e.beta.len()).map(|k| e.beta[k] * z.powi(-(k as i32))).sum();
            assert!((sum * z - 1.0).norm() < 1e-5);
        }
    }

    #[test]
    fn lanczos_examples() {
        let w = lanczos_weights(50).unwrap();
        assert_eq!(w.get(0), 1.0);
        assert_eq!(w.get(50), 0.0);
        assert_eq!(w.get(-50), 0.0);
        assert_eq!(w.get(77), 0.0);
        assert!((w.get(25) - 2.0 / PI).abs() < 1e-15);
        assert!(lanczos_weights(0).is_err());
    }

    #[test]
    fn indexed_series_window() {
        let mut s = IndexedSeries::zeros(-2, 3);
        s.set(-2, 1.5);
        s.set(3, -4.0);
        assert_eq!(s.get(-3), 0.0);
        assert_eq!(s.get(4), 0.0);
        assert_eq!(s.get(-2), 1.5);
        assert_eq!(s.max_abs(), 4.0);
        assert_eq!((s.lo(), s.hi()), (-2, 3));
        let mut t = IndexedSeries::from_fn(-1, 1, |k| k as f64);
        t.add_assign(&s);
        assert_eq!(t.values(), &[-1.0, 0.0, 1.0]);
        assert_eq!(s.scaled(2.0).get(3), -8.0);
    }

    proptest! {
        #[test]
        fn filter_symmetry(n in 1usize..200) {
            let w = lanczos_weights(n).unwrap();
            let ni = n as i32;
            prop_assert_eq!(w.get(ni), 0.0);
            for k in -ni..=ni {
                prop_assert_eq!(w.get(k), w.get(-k));
                prop_assert!((0.0..=1.0).contains(&w.get(k)));
            }
        }

        #[test]
        fn coefficients_are_real(lambda in 0.0f64..0.2, theta0 in 0.01f64..3.1) {
            let e = AngularExpansion::new(40, lambda, theta0).unwrap();
            prop_assert!(e.max_imag_residue <= 1e-12);
            prop_assert_eq!(e.beta(1), 1.0);
            prop_assert!((e.alpha(0) + (-2.0 * lambda * theta0).exp()).abs() < 1e-15);
        }
    }
}
