//! Dense helpers shared by the regression and concave objectives: principal submatrices,
//! extremal eigenvalues and the k-sparse eigenvalue enumeration.

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Default cap on the number of sets an exhaustive enumeration may visit.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

pub fn principal_submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// `(λ_min, λ_max)` of a symmetric matrix.
pub fn symmetric_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    match m.nrows() {
        0 => (0.0, 0.0),
        1 => (m[(0, 0)], m[(0, 0)]),
        _ => {
            let eig = SymmetricEigen::new(m.clone());
            let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
    }
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol * (1.0 + m[(i, j)].abs())))
}

/// Extremal eigenvalues over all `k × k` principal submatrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEigenBounds {
    pub k: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub min_support: Vec<usize>,
    pub max_support: Vec<usize>,
}

/// Exact k-sparse eigenvalues by enumeration of all `C(d, k)` supports (lexicographic order;
/// first extremum wins on ties).
pub fn sparse_eigenvalues(c: &DMatrix<f64>, k: usize, budget: u64) -> Result<SparseEigenBounds> {
    let d = c.nrows();
    if !c.is_square() {
        return Err(Error::domain("matrix must be square"));
    }
    if k == 0 || k > d {
        return Err(Error::domain(format!("sparsity {k} must lie in 1..={d}")));
    }
    let count = binomial(d, k);
    if count > budget {
        return Err(Error::resource(
            format!("{count} principal submatrices of order {k}; use a restricted-strong-concavity bound instead"),
            budget,
        ));
    }
    let mut out = SparseEigenBounds {
        k,
        lambda_min: f64::INFINITY,
        lambda_max: f64::NEG_INFINITY,
        min_support: Vec::new(),
        max_support: Vec::new(),
    };
    for support in (0..d).combinations(k) {
        let (lo, hi) = symmetric_extremes(&principal_submatrix(c, &support));
        if lo < out.lambda_min {
            out.lambda_min = lo;
            out.min_support = support.clone();
        }
        if hi > out.lambda_max {
            out.lambda_max = hi;
            out.max_support = support;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(1000, 500), u64::MAX);
    }

    #[test]
    fn identity_sparse_eigenvalues() {
        let c = DMatrix::<f64>::identity(5, 5);
        for k in 1..=5 {
            let b = sparse_eigenvalues(&c, k, ENUMERATION_BUDGET).unwrap();
            assert_relative_eq!(b.lambda_min, 1.0, epsilon = 1e-12);
            assert_relative_eq!(b.lambda_max, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let rho = 0.3;
        let c = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
        let b = sparse_eigenvalues(&c, 2, ENUMERATION_BUDGET).unwrap();
        assert_relative_eq!(b.lambda_min, 1.0 - rho, epsilon = 1e-12);
        assert_relative_eq!(b.lambda_max, 1.0 + rho, epsilon = 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let c = DMatrix::<f64>::identity(30, 30);
        assert!(matches!(sparse_eigenvalues(&c, 15, 1000), Err(Error::Resource { .. })));
    }
}
