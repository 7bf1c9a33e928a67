//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|v| v * t).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `out = M v` for a row-major `rows × cols` matrix.
pub fn matvec(m: &[f64], rows: usize, cols: usize, v: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.len(), rows * cols);
    m.chunks_exact(cols).take(rows).map(|r| dot(r, v)).collect()
}

/// Largest eigenvalue of a symmetric matrix.
pub fn lambda_max(sym: DMatrix<f64>) -> f64 {
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the column space of `m`.
///
/// Singular values at or below `rel_tol · σ₁` are treated as zero.
pub fn range_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| smax > 0.0 && **s > rel_tol * smax)
        .map(|(k, _)| k)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis (as rows) of the row space of `m`.
pub fn row_space_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    range_basis(&m.transpose(), rel_tol).transpose()
}

/// Component of `v` orthogonal to the row space spanned by orthonormal `rows`.
pub fn project_out_rows(rows: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let v = DVector::from_column_slice(v);
    let coeffs = rows * &v;
    let residual = &v - rows.transpose() * coeffs;
    residual.iter().copied().collect()
}

pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c])
}

pub fn from_row_major(data: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_max_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0, 2.0]));
        assert!((lambda_max(m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn range_basis_drops_null_directions() {
        // rank-one 3x2 matrix
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 0.0, 0.0]);
        let b = range_basis(&m, 1e-12);
        assert_eq!(b.ncols(), 1);
        let col: Vec<f64> = b.column(0).iter().copied().collect();
        assert!((norm(&col) - 1.0).abs() < 1e-12);
        assert!(col[2].abs() < 1e-12);
    }

    #[test]
    fn project_out_rows_leaves_orthogonal_part() {
        let rows = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let r = project_out_rows(&rows, &[3.0, 1.0, -2.0]);
        assert_eq!(r, vec![0.0, 1.0, -2.0]);
    }
}
