//! Max-norm on vectors and the operator norm it induces on matrices.
//!
//! Every distance in the crate is measured with these two norms, which makes
//! `‖E‖ = 1` exact and keeps the matrix norm submultiplicative.

use nalgebra::DMatrix;

/// `max_i |v_i|`; zero for the empty vector.
pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `max_i |a_i - b_i|`.
pub fn vec_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Induced ℓ∞ operator norm: the largest absolute row sum.
pub fn matrix_norm(m: &DMatrix<f64>) -> f64 {
    col_major_norm(m.as_slice(), m.nrows(), m.ncols())
}

/// [`matrix_norm`] of `a - b` without allocating the difference.
pub fn matrix_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let (r, c) = a.shape();
    let (sa, sb) = (a.as_slice(), b.as_slice());
    (0..r)
        .map(|i| (0..c).map(|j| (sa[j * r + i] - sb[j * r + i]).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Row-sum norm of a column-major `rows × cols` buffer.
pub(crate) fn col_major_norm(data: &[f64], rows: usize, cols: usize) -> f64 {
    (0..rows)
        .map(|i| (0..cols).map(|j| data[j * rows + i].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_norm() {
        assert_eq!(matrix_norm(&DMatrix::identity(2, 2)), 1.0);
        assert_eq!(matrix_norm(&DMatrix::identity(5, 5)), 1.0);
    }

    #[test]
    fn max_row_sum() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(matrix_norm(&m), 7.0);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(matrix_norm(&DMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn dist_matches_norm_of_difference() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -4.0, 5.0, 0.5]);
        let b = DMatrix::from_row_slice(2, 3, &[0.0, -1.0, 3.0, 2.0, 5.0, 1.5]);
        assert_eq!(matrix_dist(&a, &b), matrix_norm(&(&a - &b)));
    }

    #[test]
    fn vector_norms() {
        assert_eq!(vec_norm(&[]), 0.0);
        assert_eq!(vec_norm(&[1.0, -3.0, 2.0]), 3.0);
        assert_eq!(vec_dist(&[1.0, 2.0], &[1.5, -1.0]), 3.0);
    }
}
