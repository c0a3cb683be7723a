//! Dense real linear algebra for the small systems assembled by the solver.

use crate::error::{Result, TunnelError};
use nalgebra::{DMatrix, DVector, Dyn, LU};

pub type DenseMatrix = DMatrix<f64>;
pub type DenseVector = DVector<f64>;

/// Systems whose 2-norm condition number exceeds this are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Ratio of largest to smallest singular value; `+inf` when singular.
pub fn condition_number_2norm(a: &DenseMatrix) -> f64 {
    assert!(a.is_square(), "condition number needs a square matrix");
    if a.nrows() == 0 {
        return 1.0;
    }
    let sv = a.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// A partial-pivoting LU factorization kept for repeated solves.
#[derive(Debug, Clone)]
pub struct Factorized {
    matrix: DenseMatrix,
    lu: LU<f64, Dyn, Dyn>,
    cond: f64,
}

impl Factorized {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(TunnelError::InvalidConfig(format!(
                "matrix is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(TunnelError::SolverFailure { cond: f64::INFINITY });
        }
        let cond = condition_number_2norm(&a);
        if !(cond <= MAX_CONDITION) {
            return Err(TunnelError::SolverFailure { cond });
        }
        let lu = a.clone().lu();
        Ok(Self { matrix: a, lu, cond })
    }

    pub fn condition(&self) -> f64 {
        self.cond
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector> {
        let x = self
            .lu
            .solve(b)
            .ok_or(TunnelError::SolverFailure { cond: self.cond })?;
        let resid = (&self.matrix * &x - b).norm();
        if !(resid <= 1e-10 * b.norm().max(1.0)) {
            return Err(TunnelError::SolverFailure { cond: self.cond });
        }
        Ok(x)
    }
}

pub fn solve_dense(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    Factorized::new(a.clone())?.solve(b)
}
