//! Iterative series solution of the mixed boundary value problem.
//!
//! The unknown real coefficients `d_n`, `|n| <= N`, of the sectionally
//! analytic function are found rep by rep: each rep solves three small dense
//! systems whose matrices never change, with right-hand sides built from the
//! previous rep's increments. Totals are the sum of all increments.

use crate::error::{Result, TunnelError};
use crate::fields::displacement_series;
use crate::geometry::{derive_geometry, DerivedGeometry, TunnelGeometry};
use crate::loading::{compute_e, loading_constants, LoadingConstants, Material};
use crate::numerics::{DenseMatrix, DenseVector, Factorized};
use crate::series::{lanczos_weights, AngularExpansion, IndexedSeries};
use num_complex::Complex64;

/// Largest inner radius for which every iteration coefficient is below one.
pub fn convergence_radius_bound() -> f64 {
    1.0 / (2.0 + 3f64.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Truncation order `N`.
    pub n: usize,
    /// Stop once the largest increment is at most this.
    pub epsilon: f64,
    pub max_reps: usize,
    /// Apply Lanczos sigma factors to the recovered coefficients.
    pub lanczos: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { n: 50, epsilon: 1e-16, max_reps: 500, lanczos: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(TunnelError::InvalidConfig(format!("N must be >= 4, got {}", self.n)));
        }
        if !(self.epsilon > 0.0) {
            return Err(TunnelError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_reps < 1 {
            return Err(TunnelError::InvalidConfig("max_reps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Coefficients of the four-unknown system for `(d_-1, d_0, d_1, C_a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemBlocks {
    /// `I_n`, `n` in `[-N, N]`.
    pub i: IndexedSeries,
    /// `J_n`, `n` in `[-N, N]`.
    pub j: IndexedSeries,
    pub i_prime: f64,
    pub j_prime: f64,
}

pub fn assemble_blocks(
    series: &AngularExpansion,
    lc: &LoadingConstants,
    geom: &TunnelGeometry,
    m: &Material,
    n: usize,
) -> SystemBlocks {
    let r = lc.r;
    let r2 = r * r;
    let al = |k: i32| series.alpha(k);
    let be = |k: i32| series.beta(k);
    let ni = n as i32;
    let i = IndexedSeries::from_fn(-ni, ni, |k| match k {
        0 => -3.0 * r2 * al(0),
        -1 => -3.0 * r2 * al(1),
        k if k >= 1 => 2.0 * be(k),
        k => (2.0 - r2) * al(-k - 2) - 3.0 * r2 * al(-k),
    });
    let j = IndexedSeries::from_fn(-ni, ni, |k| match k {
        0 => (1.0 - 2.0 * r2) * al(0) - 2.0 * r2 * be(2),
        -1 => (1.0 - 2.0 * r2) * al(1) - 2.0 * r2 * be(1),
        k if k >= 1 => -2.0 * r2 * be(k + 2),
        k => (1.0 - 2.0 * r2) * al(-k) + 3.0 * al(-k - 2),
    });
    let grr = m.gamma * geom.radius * geom.radius;
    let kap = m.kappa;
    let i_prime = -grr * (1.0 - r2) / (1.0 + kap) + (1.0 - kap) / (1.0 + kap) * grr * r2 * r.ln() - r * lc.e(1);
    let j_prime = -grr * (1.0 - r2) / (1.0 + kap) + (1.0 - kap) / (1.0 + kap) * grr * r.ln() + lc.e(0);
    SystemBlocks { i, j, i_prime, j_prime }
}

/// `A1(i,j) = alpha_{j-i}`, `A2(i,j) = beta_{j-i+1}` (both upper triangular,
/// order `N-1`), and the 4x4 matrix over `(d_-1, d_0, d_1, C_a)`.
pub fn assemble_matrices(
    series: &AngularExpansion,
    blocks: &SystemBlocks,
    r: f64,
    n: usize,
) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let size = n - 1;
    let a1 = DenseMatrix::from_fn(size, size, |i, j| if j >= i { series.alpha((j - i) as i32) } else { 0.0 });
    let a2 = DenseMatrix::from_fn(size, size, |i, j| if j >= i { series.beta((j - i + 1) as i32) } else { 0.0 });
    #[rustfmt::skip]
    let a3 = DenseMatrix::from_row_slice(4, 4, &[
        blocks.i.get(-1), blocks.i.get(0), blocks.i.get(1), 2.0 * r * r,
        blocks.j.get(-1), blocks.j.get(0), blocks.j.get(1), 2.0,
        series.alpha(0), 0.0, 0.0, 0.0,
        0.0, series.beta(1), series.beta(2), 0.0,
    ]);
    (a1, a2, a3)
}

/// `A_k = sum_{n=-N}^{k} alpha_{k-n} d_n` on `[-N, N]` and
/// `B_k = sum_{n=k+1}^{N} beta_{n-k} d_n` on `[-N-2, N-1]`.
pub fn compute_ab(d: &IndexedSeries, series: &AngularExpansion, n: usize) -> (IndexedSeries, IndexedSeries) {
    let ni = n as i32;
    let a = IndexedSeries::from_fn(-ni, ni, |k| (-ni..=k).map(|m| series.alpha(k - m) * d.get(m)).sum());
    let b = IndexedSeries::from_fn(-ni - 2, ni - 1, |k| {
        ((k + 1).max(-ni)..=ni).map(|m| series.beta(m - k) * d.get(m)).sum()
    });
    (a, b)
}

/// Laurent coefficients of `psi'(zeta) = i sum psi_k zeta^k`,
/// `psi_k = (k+1)/2 (A_{k-1} - A_{k+1}) - B_{-k-2}`, on `[-N-1, N+1]`.
pub fn psi_coefficients(a: &IndexedSeries, b: &IndexedSeries, n: usize) -> IndexedSeries {
    let ni = n as i32;
    IndexedSeries::from_fn(-ni - 1, ni + 1, |k| {
        0.5 * (k + 1) as f64 * (a.get(k - 1) - a.get(k + 1)) - b.get(-k - 2)
    })
}

/// Real constant making the displacement vanish at `zeta = 1`.
pub fn compute_c0(a: &IndexedSeries, b: &IndexedSeries, kappa: f64, n: usize) -> f64 {
    -displacement_series(Complex64::new(1.0, 0.0), a, b, kappa, n).im
}

/// One rep's contribution to the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Increment {
    /// `d_n` for `n` in `[-N, N]`.
    pub d: IndexedSeries,
    pub ca: f64,
}

impl Increment {
    pub fn max_abs(&self) -> f64 {
        self.d.max_abs()
    }
}

/// Everything fixed for one case: constants, tables and factored systems.
#[derive(Debug, Clone)]
pub struct Problem {
    pub geometry: TunnelGeometry,
    pub derived: DerivedGeometry,
    pub material: Material,
    pub config: SolverConfig,
    pub series: AngularExpansion,
    pub loading: LoadingConstants,
    /// `E_k` on `[-N, N]`.
    pub e: IndexedSeries,
    pub blocks: SystemBlocks,
    systems: [Factorized; 3],
}

impl Problem {
    pub fn new(geom: &TunnelGeometry, m: &Material, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let derived = derive_geometry(geom)?;
        let n = cfg.n;
        let series = AngularExpansion::new(n, m.lambda, derived.theta0)?;
        let loading = loading_constants(geom, &derived, m);
        let e = compute_e(n, &loading)?;
        let blocks = assemble_blocks(&series, &loading, geom, m, n);
        let (a1, a2, a3) = assemble_matrices(&series, &blocks, derived.r, n);
        let systems = [Factorized::new(a1)?, Factorized::new(a2)?, Factorized::new(a3)?];
        Ok(Self {
            geometry: *geom,
            derived,
            material: *m,
            config: *cfg,
            series,
            loading,
            e,
            blocks,
            systems,
        })
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn condition_numbers(&self) -> [f64; 3] {
        [self.systems[0].condition(), self.systems[1].condition(), self.systems[2].condition()]
    }

    pub fn matrices(&self) -> [&DenseMatrix; 3] {
        [self.systems[0].matrix(), self.systems[1].matrix(), self.systems[2].matrix()]
    }

    /// Constants `(-gamma R^2 / 2(1+kappa), kappa gamma R^2 / 2(1+kappa))`
    /// that `A_-1` and `B_-1` must equal.
    pub fn constraint_values(&self) -> (f64, f64) {
        let grr = self.material.gamma * self.geometry.radius * self.geometry.radius;
        let k = self.material.kappa;
        (-grr / (2.0 * (1.0 + k)), k * grr / (2.0 * (1.0 + k)))
    }

    fn solve_outer(&self, rhs1: Vec<f64>, rhs2: Vec<f64>) -> Result<IndexedSeries> {
        let n = self.n() as i32;
        let x1 = self.systems[0].solve(&DenseVector::from_vec(rhs1))?;
        let x2 = self.systems[1].solve(&DenseVector::from_vec(rhs2))?;
        let mut d = IndexedSeries::zeros(-n, n);
        for (j, (v1, v2)) in x1.iter().zip(x2.iter()).enumerate() {
            d.set(-(j as i32 + 2), *v1);
            d.set(j as i32 + 2, *v2);
        }
        Ok(d)
    }

    /// Fills `d_-1, d_0, d_1` and returns `C_a` given the outer coefficients.
    fn solve_centre(&self, d: &mut IndexedSeries, c: [f64; 4]) -> Result<f64> {
        let n = self.n() as i32;
        let (bi, bj) = (&self.blocks.i, &self.blocks.j);
        let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
        for m in 2..=n {
            s1 += bi.get(-m) * d.get(-m) + bi.get(m) * d.get(m);
            s2 += bj.get(-m) * d.get(-m) + bj.get(m) * d.get(m);
            s3 += self.series.alpha(m - 1) * d.get(-m);
            s4 += self.series.beta(m + 1) * d.get(m);
        }
        let b = DenseVector::from_vec(vec![c[0] - s1, c[1] - s2, c[2] - s3, c[3] - s4]);
        let x = self.systems[2].solve(&b)?;
        d.set(-1, x[0]);
        d.set(0, x[1]);
        d.set(1, x[2]);
        Ok(x[3])
    }

    /// Rep 0: right-hand sides driven by the periphery loading.
    pub fn initial_phase(&self) -> Result<Increment> {
        let n = self.n() as i32;
        let r = self.derived.r;
        let r2 = r * r;
        let e = &self.e;
        let rhs1 = (2..=n)
            .map(|k| -0.5 * (k - 1) as f64 * r.powi(k - 1) * e.get(1 - k))
            .collect();
        let rhs2 = (1..n)
            .map(|k| {
                let kf = k as f64;
                -0.5 * kf * (kf + 1.0) * (1.0 - r2) * r.powi(k) * e.get(-k) - 0.5 * (kf + 1.0) * r.powi(k + 1) * e.get(k + 1)
            })
            .collect();
        let mut d = self.solve_outer(rhs1, rhs2)?;
        let (am1, bm1) = self.constraint_values();
        let ca = self.solve_centre(&mut d, [self.blocks.i_prime, self.blocks.j_prime, am1, bm1])?;
        Ok(Increment { d, ca })
    }

    /// Rep `q + 1` from the rep-`q` increment; the centre system is homogeneous.
    pub fn iteration_phase(&self, prev: &Increment) -> Result<Increment> {
        let n = self.n() as i32;
        let r = self.derived.r;
        let r2 = r * r;
        let q = 1.0 - r2;
        let (a, b) = compute_ab(&prev.d, &self.series, self.n());
        let rhs1 = (2..=n)
            .map(|k| {
                let kf = k as f64;
                let c = (kf - 1.0) / kf;
                c * a.get(-k - 1) + r.powi(2 * k - 2) * b.get(-k) - c * r.powi(2 * k) * b.get(-k - 1)
                    + (kf - 1.0) * q * r.powi(2 * k - 2) * (a.get(k - 1) - a.get(k - 2))
            })
            .collect();
        let rhs2 = (1..n)
            .map(|k| {
                let kf = k as f64;
                let c = (kf + 1.0) / kf;
                c * r2 * b.get(k - 1) + r.powi(2 * k + 2) * a.get(k) - c * r.powi(2 * k + 2) * a.get(k - 1)
                    - q * a.get(-k - 2)
                    + (kf + 1.0) * q * r.powi(2 * k) * b.get(-k - 1)
                    - kf * q * r.powi(2 * k + 2) * b.get(-k - 2)
                    + kf * (kf + 1.0) * q * q * r.powi(2 * k) * (a.get(k) - a.get(k - 1))
            })
            .collect();
        let mut d = self.solve_outer(rhs1, rhs2)?;
        let ca = self.solve_centre(&mut d, [0.0; 4])?;
        Ok(Increment { d, ca })
    }
}

/// Converged coefficients and diagnostics for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCoefficients {
    pub n: usize,
    /// `d_n` on `[-N, N]`.
    pub d: IndexedSeries,
    pub ca: f64,
    /// Unfiltered `A_k` on `[-N, N]`.
    pub a: IndexedSeries,
    /// Unfiltered `B_k` on `[-N-2, N-1]`.
    pub b: IndexedSeries,
    /// `psi_k` on `[-N-1, N+1]`, filtered when `lanczos` is set.
    pub psi: IndexedSeries,
    /// Displacement constant, from filtered coefficients when `lanczos` is set.
    pub c0: f64,
    pub lanczos: bool,
    pub kappa: f64,
    /// Number of iteration reps after the initial phase.
    pub reps: usize,
    /// 2-norm condition numbers of the three systems.
    pub cond: [f64; 3],
    /// `max |d^(q)|` for `q = 0 ..= reps`.
    pub history: Vec<f64>,
    /// `r <= 1/(2 + sqrt 3)`, the range where convergence is guaranteed.
    pub within_convergence_bound: bool,
}

/// Runs the initial phase and iterates until the increment falls below
/// `epsilon`, returning the increment sequence alongside the totals.
pub fn iterate(problem: &Problem) -> Result<(Vec<Increment>, Vec<f64>)> {
    let cfg = &problem.config;
    let mut incs = vec![problem.initial_phase()?];
    let mut history = vec![incs[0].max_abs()];
    while *history.last().unwrap() > cfg.epsilon {
        if history.len() > cfg.max_reps {
            return Err(TunnelError::NonConvergence {
                reps: history.len() - 1,
                last: *history.last().unwrap(),
                history,
            });
        }
        let next = problem.iteration_phase(incs.last().unwrap())?;
        let m = next.max_abs();
        if !m.is_finite() {
            return Err(TunnelError::NumericalInstability(format!(
                "increment became non-finite at rep {}",
                history.len()
            )));
        }
        history.push(m);
        incs.push(next);
    }
    Ok((incs, history))
}

pub fn run_solver(geom: &TunnelGeometry, m: &Material, cfg: &SolverConfig) -> Result<SolutionCoefficients> {
    let problem = Problem::new(geom, m, cfg)?;
    solve_problem(&problem)
}

pub fn solve_problem(problem: &Problem) -> Result<SolutionCoefficients> {
    let n = problem.n();
    let ni = n as i32;
    let (incs, history) = iterate(problem)?;
    let mut d = IndexedSeries::zeros(-ni, ni);
    let mut ca = 0.0;
    for inc in &incs {
        d.add_assign(&inc.d);
        ca += inc.ca;
    }
    let (a, b) = compute_ab(&d, &problem.series, n);
    let kappa = problem.material.kappa;
    let lanczos = problem.config.lanczos;
    let (fa, fb) = if lanczos {
        let w = lanczos_weights(n)?;
        (w.apply(&a), w.apply(&b))
    } else {
        (a.clone(), b.clone())
    };
    let psi = psi_coefficients(&fa, &fb, n);
    let c0 = compute_c0(&fa, &fb, kappa, n);
    Ok(SolutionCoefficients {
        n,
        d,
        ca,
        a,
        b,
        psi,
        c0,
        lanczos,
        kappa,
        reps: history.len() - 1,
        cond: problem.condition_numbers(),
        history,
        within_convergence_bound: problem.derived.r <= convergence_radius_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loading::Plane;
    use proptest::prelude::*;

    fn case(hr: f64, k0: f64, x0h: f64, gamma: f64) -> (TunnelGeometry, Material) {
        let rad = 5.0;
        let h = hr * rad;
        (
            TunnelGeometry::new(rad, h, x0h * h).unwrap(),
            Material::new(gamma, k0, 20_000.0, 0.3, Plane::Strain).unwrap(),
        )
    }

    #[test]
    fn matrices_structure() {
        let (g, m) = case(2.0, 0.8, 1.0, 20.0);
        let p = Problem::new(&g, &m, &SolverConfig::default()).unwrap();
        let [a1, a2, a3] = p.matrices();
        assert_eq!(a1.nrows(), 49);
        for i in 0..49 {
            assert!((a1[(i, i)] + 0.76561).abs() < 1e-5);
            assert_eq!(a2[(i, i)], 1.0);
            for j in 0..i {
                assert_eq!(a1[(i, j)], 0.0);
                assert_eq!(a2[(i, j)], 0.0);
            }
        }
        assert_eq!(a3[(2, 0)], p.series.alpha(0));
        assert_eq!((a3[(2, 1)], a3[(2, 2)], a3[(2, 3)]), (0.0, 0.0, 0.0));
        assert_eq!(a3[(3, 1)], 1.0);
    }

    #[test]
    fn blocks_examples() {
        let (g, m) = case(2.0, 0.8, 1.0, 20.0);
        let p = Problem::new(&g, &m, &SolverConfig::default()).unwrap();
        assert_eq!(p.blocks.i.get(1), 2.0);
        let r = p.derived.r;
        assert_eq!(p.blocks.i.get(0), -3.0 * r * r * p.series.alpha(0));
        assert!((p.blocks.i.get(0) - 0.164906).abs() < 1e-6);
        let (g, m) = case(2.0, 0.8, 1.0, 0.0);
        let p = Problem::new(&g, &m, &SolverConfig::default()).unwrap();
        assert_eq!(p.blocks.i_prime, 0.0);
        assert_eq!(p.blocks.j_prime, 0.0);
    }

    #[test]
    fn compute_ab_unit_vector() {
        let (g, m) = case(2.0, 0.8, 1.0, 20.0);
        let p = Problem::new(&g, &m, &SolverConfig { n: 10, ..Default::default() }).unwrap();
        let mut d = IndexedSeries::zeros(-10, 10);
        let (a, b) = compute_ab(&d, &p.series, 10);
        assert_eq!(a.max_abs() + b.max_abs(), 0.0);
        d.set(-1, 1.0);
        let (a, b) = compute_ab(&d, &p.series, 10);
        for k in -10..=10 {
            let expect = if k >= -1 { p.series.alpha(k + 1) } else { 0.0 };
            assert_eq!(a.get(k), expect);
        }
        for k in -12..=9 {
            let expect = if k <= -2 { p.series.beta(-1 - k) } else { 0.0 };
            assert_eq!(b.get(k), expect);
        }
    }

    #[test]
    fn initial_phase_identities() {
        let (g, m) = case(2.0, 0.8, 100.0, 20.0);
        let p = Problem::new(&g, &m, &SolverConfig::default()).unwrap();
        let inc = p.initial_phase().unwrap();
        let (a, b) = compute_ab(&inc.d, &p.series, 50);
        assert!((a.get(-1) + 89.28571428571429).abs() < 1e-9);
        assert!((b.get(-1) - 160.71428571428572).abs() < 1e-9);
        let zero = p.iteration_phase(&Increment { d: IndexedSeries::zeros(-50, 50), ca: 0.0 }).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert_eq!(zero.ca, 0.0);
    }

    #[test]
    fn weightless_case_is_trivial() {
        let (g, m) = case(2.0, 0.8, 100.0, 0.0);
        let s = run_solver(&g, &m, &SolverConfig::default()).unwrap();
        assert_eq!(s.d.max_abs(), 0.0);
        assert_eq!(s.ca, 0.0);
        assert_eq!(s.c0, 0.0);
        assert_eq!(s.reps, 0);
    }

    #[test]
    fn benchmark_convergence() {
        let (g, m) = case(2.0, 0.8, 100.0, 20.0);
        let s = run_solver(&g, &m, &SolverConfig::default()).unwrap();
        assert!(s.reps <= 30, "reps = {}", s.reps);
        assert!(s.cond.iter().all(|c| *c < 100.0), "{:?}", s.cond);
        assert!(s.history.last().unwrap() <= &1e-16);
        for w in s.history[1..].windows(2) {
            assert!(w[1] < w[0]);
        }
        let grr = 500.0;
        assert!((s.a.get(-1) + 89.28571428571429).abs() <= 1e-10 * grr);
        assert!((s.b.get(-1) - 160.71428571428572).abs() <= 1e-10 * grr);
        assert!(s.within_convergence_bound);
        assert!(s.c0.is_finite());
    }

    #[test]
    fn superposition_matches_totals() {
        let (g, m) = case(2.0, 1.2, 10.0, 20.0);
        let p = Problem::new(&g, &m, &SolverConfig::default()).unwrap();
        let (incs, _) = iterate(&p).unwrap();
        let s = solve_problem(&p).unwrap();
        // Accumulate in reverse order as an independent pass.
        let mut total = IndexedSeries::zeros(-50, 50);
        for inc in incs.iter().rev() {
            total.add_assign(&inc.d);
        }
        for k in -50..=50 {
            assert!((total.get(k) - s.d.get(k)).abs() <= 1e-13 * s.d.max_abs());
        }
        // A and B are linear in d, so summing per-rep A and B reproduces the totals.
        let mut a_sum = IndexedSeries::zeros(-50, 50);
        for inc in &incs {
            a_sum.add_assign(&compute_ab(&inc.d, &p.series, 50).0);
        }
        for k in -50..=50 {
            assert!((a_sum.get(k) - s.a.get(k)).abs() <= 1e-13 * s.a.max_abs());
        }
    }

    #[test]
    fn non_convergence_reported() {
        let (g, m) = case(1.1, 0.8, 100.0, 20.0);
        let cfg = SolverConfig { max_reps: 5, ..Default::default() };
        match run_solver(&g, &m, &cfg) {
            Err(TunnelError::NonConvergence { reps, history, .. }) => {
                assert_eq!(reps, 5);
                assert_eq!(history.len(), 6);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let (g, m) = case(2.0, 0.8, 1.0, 20.0);
        for cfg in [
            SolverConfig { n: 3, ..Default::default() },
            SolverConfig { epsilon: 0.0, ..Default::default() },
            SolverConfig { max_reps: 0, ..Default::default() },
        ] {
            assert!(matches!(run_solver(&g, &m, &cfg), Err(TunnelError::InvalidConfig(_))));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn constraints_hold_for_any_case(hr in 2.0f64..4.0, k0 in 0.5f64..1.5, x0h in 0.5f64..200.0, nu in 0.1f64..0.45) {
            let rad = 5.0;
            let g = TunnelGeometry::new(rad, hr * rad, x0h * hr * rad).unwrap();
            let m = Material::new(20.0, k0, 20_000.0, nu, Plane::Strain).unwrap();
            let s = run_solver(&g, &m, &SolverConfig::default()).unwrap();
            let grr = 20.0 * rad * rad;
            let k = m.kappa;
            prop_assert!((s.a.get(-1) + grr / (2.0 * (1.0 + k))).abs() <= 1e-10 * grr);
            prop_assert!((s.b.get(-1) - k * grr / (2.0 * (1.0 + k))).abs() <= 1e-10 * grr);
            for w in s.history[1..].windows(2) {
                prop_assert!(w[1] < w[0]);
            }
        }

        #[test]
        fn linear_in_gamma(gamma in 1.0f64..40.0) {
            let (g, m1) = case(2.0, 0.8, 10.0, gamma);
            let (_, m2) = case(2.0, 0.8, 10.0, 2.0 * gamma);
            let s1 = run_solver(&g, &m1, &SolverConfig::default()).unwrap();
            let s2 = run_solver(&g, &m2, &SolverConfig::default()).unwrap();
            let tol = 1e-12 * s1.d.max_abs();
            for k in -50..=50 {
                prop_assert!((s2.d.get(k) - 2.0 * s1.d.get(k)).abs() <= 2.0 * tol);
                prop_assert!((s2.a.get(k) - 2.0 * s1.a.get(k)).abs() <= 2.0 * 1e-12 * s1.a.max_abs());
            }
            for k in -52..=49 {
                prop_assert!((s2.b.get(k) - 2.0 * s1.b.get(k)).abs() <= 2.0 * 1e-12 * s1.b.max_abs());
            }
            prop_assert!((s2.ca - 2.0 * s1.ca).abs() <= 1e-12 * s1.ca.abs().max(1.0));
            prop_assert!((s2.c0 - 2.0 * s1.c0).abs() <= 1e-12 * s1.c0.abs().max(1.0));
        }
    }
}
