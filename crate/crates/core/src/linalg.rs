//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Orthonormal basis (as columns) of the column space of `m`, keeping singular
/// directions whose singular value exceeds `cutoff`.
pub fn column_space(m: &DMatrix<f64>, cutoff: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, cutoff: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad to at least n rows so the SVD returns a full right factor.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    out
}

/// Reduced row echelon form with partial pivoting. Rows that vanish are dropped.
pub fn rref(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let (best, best_val) = (pivot_row..rows)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            for r in pivot_row..rows {
                a[(r, col)] = 0.0;
            }
            continue;
        }
        a.swap_rows(pivot_row, best);
        let p = a[(pivot_row, col)];
        for c in 0..cols {
            a[(pivot_row, c)] /= p;
        }
        for r in 0..rows {
            if r != pivot_row {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in 0..cols {
                        let v = a[(pivot_row, c)];
                        a[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    a.rows(0, pivot_row).into_owned()
}

pub fn sym_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn skew_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn basis_vector(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sorted_sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = sym_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-14);
    }

    #[test]
    fn rref_is_canonical() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 1.0, -1.0, 0.0]);
        let b = DMatrix::from_row_slice(2, 3, &[0.0, 2.0, 0.0, 3.0, 0.0, 0.0]);
        let ra = rref(&a, 1e-12);
        let rb = rref(&b, 1e-12);
        assert!((ra - rb).norm() < 1e-14);
    }

    #[test]
    fn column_space_rank() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]);
        assert_eq!(column_space(&m, 1e-9).ncols(), 2);
    }
}
