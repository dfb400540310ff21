//! Small dense linear algebra on jets and on plain values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{FinslerError, Result};
use crate::jet::{Jet, Scalar};

/// Matrices whose value part has a larger condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e10;

pub type JetMatrix<T> = Vec<Vec<Jet<T>>>;

pub fn values<T: Scalar + Into<Complex64>>(m: &JetMatrix<T>) -> DMatrix<Complex64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].value().into())
}

/// 2-norm condition number from singular values.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Gauss-Jordan inverse of a matrix of jets, pivoting on the value part.
pub fn invert_jets<T>(m: &JetMatrix<T>) -> Result<JetMatrix<T>>
where
    T: Scalar + Into<Complex64>,
{
    let n = m.len();
    let cond = condition_number(&values(m));
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(FinslerError::Degenerate { condition: cond });
    }
    let proto = &m[0][0];
    let zero = Jet::constant(proto.nvars(), proto.order(), T::zero());
    let one = Jet::constant(proto.nvars(), proto.order(), T::one());
    let mut a: JetMatrix<T> = m.to_vec();
    let mut inv: JetMatrix<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[x][col]
                    .value()
                    .modulus()
                    .total_cmp(&a[y][col].value().modulus())
            })
            .expect("non-empty range");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            for j in 0..n {
                a[row][j] = &a[row][j] - &(&f * &a[col][j]);
                inv[row][j] = &inv[row][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

pub fn min_eigen_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn min_eigen_symmetric(m: &DMatrix<f64>) -> f64 {
    let h = (m + m.transpose()) * 0.5;
    h.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// LU solve with a condition check.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let c = condition_number(&a.map(|x| Complex64::new(x, 0.0)));
    if !c.is_finite() || c > MAX_CONDITION {
        return Err(FinslerError::Degenerate { condition: c });
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(FinslerError::Degenerate { condition: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::lift_all;

    #[test]
    fn jet_inverse_matches_derivative_of_inverse() {
        // M(x) = [[2 + x, 1], [1, 3]]; d/dx (M^-1)_00 = -(M^-1 E00 M^-1)_00
        let x = &lift_all(&[0.0], 2)[0];
        let c = |v: f64| Jet::constant(1, 2, v);
        let m = vec![vec![x + 2.0, c(1.0)], vec![c(1.0), c(3.0)]];
        let inv = invert_jets(&m).unwrap();
        let m0 = nalgebra::Matrix2::new(2.0, 1.0, 1.0, 3.0);
        let i0 = m0.try_inverse().unwrap();
        assert!((inv[0][0].value() - i0[(0, 0)]).abs() < 1e-14);
        let e = nalgebra::Matrix2::new(1.0, 0.0, 0.0, 0.0);
        let d = -(i0 * e * i0);
        assert!((inv[0][0].partial(&[1]) - d[(0, 0)]).abs() < 1e-14);
        assert!((inv[1][0].partial(&[1]) - d[(1, 0)]).abs() < 1e-14);
    }

    #[test]
    fn singular_is_degenerate() {
        let c = |v: f64| Jet::constant(1, 1, v);
        let m = vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]];
        assert!(matches!(invert_jets(&m), Err(FinslerError::Degenerate { .. })));
    }

    #[test]
    fn eigen_helpers() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((min_eigen_symmetric(&m) - 1.0).abs() < 1e-12);
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        assert!((min_eigen_hermitian(&h) - 1.0).abs() < 1e-12);
    }
}
