//! Matrix kernels shared by the solvers: Kronecker and Khatri-Rao products,
//! tolerance-aware least squares, and column-subset rank probes.

use itertools::Itertools;
use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Default relative rank tolerance for an `rows x cols` problem:
/// `max(rows, cols) * eps`, the usual numerical-rank cutoff scale.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

fn resolve_rank_tol(rank_tol: f64, rows: usize, cols: usize) -> Result<f64> {
    if !rank_tol.is_finite() || rank_tol < 0.0 {
        return Err(Error::argument(format!(
            "rank_tol must be finite and >= 0, got {rank_tol}"
        )));
    }
    if rank_tol == 0.0 {
        Ok(default_rank_tol(rows, cols))
    } else {
        Ok(rank_tol)
    }
}

/// Kronecker product `a (x) b`. Row `(i, j)` of the result, with `i` indexing
/// rows of `a` and `j` rows of `b`, is stored at `i * b.nrows() + j`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Khatri-Rao (columnwise Kronecker) product of two matrices with the same
/// column count. Column `r` of the result is `a_col_r (x) b_col_r`, so rows
/// of `b` vary fastest along the result's rows.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::argument(format!(
            "khatri_rao needs equal column counts, got {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let (ma, mb, r) = (a.nrows(), b.nrows(), a.ncols());
    let mut out = Matrix::zeros(ma * mb, r);
    for c in 0..r {
        for i in 0..ma {
            let aic = a[(i, c)];
            for j in 0..mb {
                out[(i * mb + j, c)] = aic * b[(j, c)];
            }
        }
    }
    Ok(out)
}

/// Solves `min_X ||A X - B||_F` column by column.
///
/// Well-conditioned tall systems go through column-pivoted QR; everything
/// else (wide, rank-deficient, or ill-conditioned at `rank_tol`) falls back
/// to an SVD pseudo-inverse, which returns the minimum-norm solution.
/// `rank_tol` is relative to the largest singular value; `0.0` selects
/// `max(rows, cols) * eps`.
pub fn solve_least_squares(a: &Matrix, b: &Matrix, rank_tol: f64) -> Result<Matrix> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Err(Error::argument("least squares needs a nonempty matrix"));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::argument(format!(
            "row mismatch: coefficient matrix has {} rows, right-hand side has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let tol = resolve_rank_tol(rank_tol, a.nrows(), a.ncols())?;

    if a.nrows() >= a.ncols() {
        if let Some(x) = try_qr_solve(a, b, tol) {
            return Ok(x);
        }
    }
    svd_solve(a, b, tol)
}

/// QR path. Returns `None` when pivoting reveals the system is rank-deficient
/// or ill-conditioned at `tol`, signalling the caller to use the SVD instead.
fn try_qr_solve(a: &Matrix, b: &Matrix, tol: f64) -> Option<Matrix> {
    let n = a.ncols();
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    // Pivoting orders |r_kk| (roughly) decreasingly; |r_00| / |r_nn| is a
    // cheap condition estimate for the triangular factor.
    let r00 = r[(0, 0)].abs();
    let rnn = r[(n - 1, n - 1)].abs();
    if rnn <= tol * r00 || r00 == 0.0 {
        return None;
    }

    let mut qtb = b.clone();
    qr.q_tr_mul(&mut qtb);
    // R * (P^T x) = top rows of Q^T b; back-substitute, then undo the pivot.
    let mut x = r.solve_upper_triangular(&qtb.rows(0, n))?;
    qr.p().inv_permute_rows(&mut x);
    Some(x)
}

fn svd_solve(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    let svd = SVD::new(a.clone(), true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, tol * sigma_max)
        .map_err(|e| Error::numerical(format!("svd solve failed: {e}")))
}

/// Smallest singular value of `a` (zero for any rank-deficient matrix).
pub fn smallest_singular_value(a: &Matrix) -> f64 {
    a.singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn numerical_rank(a: &Matrix, tol: f64) -> usize {
    let sv = a.singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * sigma_max).count()
}

/// Maximum column count accepted by [`k_rank`]; subset enumeration is
/// combinatorial in the number of columns.
pub const K_RANK_MAX_COLS: usize = 12;

/// Kruskal rank: the largest `k` such that every set of `k` columns of `a`
/// is linearly independent. Rank tests use SVDs of the column subsets with
/// the same relative tolerance convention as [`solve_least_squares`].
pub fn k_rank(a: &Matrix, rank_tol: f64) -> Result<usize> {
    if a.ncols() == 0 {
        return Err(Error::argument("k_rank of an empty matrix is undefined"));
    }
    if a.ncols() > K_RANK_MAX_COLS {
        return Err(Error::unsupported(format!(
            "k_rank enumeration is capped at {K_RANK_MAX_COLS} columns, got {}",
            a.ncols()
        )));
    }
    let tol = resolve_rank_tol(rank_tol, a.nrows(), a.ncols())?;

    let max_k = a.nrows().min(a.ncols());
    for k in 1..=max_k {
        let all_independent = (0..a.ncols()).combinations(k).all(|cols| {
            let sub = a.select_columns(cols.iter());
            numerical_rank(&sub, tol) == k
        });
        if !all_independent {
            return Ok(k - 1);
        }
    }
    Ok(max_k)
}
