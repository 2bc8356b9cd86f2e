//! Small dense helpers shared by the geometry and solver modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest pivot count as zero.
const PIVOT_RTOL: f64 = 1e-13;

/// Solves `a x = b` with LU and partial pivoting, rejecting numerically
/// singular matrices instead of returning a least-squares answer.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let u = lu.u();
    let max_pivot = u.diagonal().iter().fold(0.0_f64, |m, p| m.max(p.abs()));
    let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
    if !(max_pivot > 0.0) || !(min_pivot > PIVOT_RTOL * max_pivot) {
        return Err(Error::Singular(what));
    }
    lu.solve(b).ok_or(Error::Singular(what))
}

/// True when `a` is numerically invertible by the same criterion as [`solve`].
pub fn is_invertible(a: &DMatrix<f64>) -> bool {
    if a.nrows() == 0 {
        return true;
    }
    let u = a.clone().lu().u();
    let max_pivot = u.diagonal().iter().fold(0.0_f64, |m, p| m.max(p.abs()));
    let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
    max_pivot > 0.0 && min_pivot > PIVOT_RTOL * max_pivot
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Central-difference step `eps^(1/3) (1 + |x|)`.
pub fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.abs())
}

/// Finite-difference Jacobian of `f` at `x` using central differences.
pub fn fd_jacobian<F>(mut f: F, x: &DVector<f64>, rel_step: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    let mut xp = x.clone();
    for j in 0..n {
        let step = rel_step * (1.0 + x[j].abs());
        xp[j] = x[j] + step;
        let fp = f(&xp)?;
        xp[j] = x[j] - step;
        let fm = f(&xp)?;
        xp[j] = x[j];
        cols.push((fp - fm) / (2.0 * step));
    }
    if cols.is_empty() {
        return Ok(DMatrix::zeros(0, 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(solve(&a, &b, "test"), Err(Error::Singular("test")));
        assert!(!is_invertible(&a));
    }

    #[test]
    fn solves_permuted_system() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![3.0, 5.0]);
        let x = solve(&a, &b, "test").unwrap();
        assert_eq!(x.as_slice(), &[5.0, 3.0]);
    }

    #[test]
    fn fd_jacobian_of_quadratic() {
        let x = DVector::from_vec(vec![1.0, -2.0]);
        let jac = fd_jacobian(
            |z| Ok(DVector::from_vec(vec![z[0] * z[0], z[0] * z[1]])),
            &x,
            1e-6,
        )
        .unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, -2.0, 1.0]);
        assert!(max_abs(&(jac - want)) < 1e-8);
    }
}
