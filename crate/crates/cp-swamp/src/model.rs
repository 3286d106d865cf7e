//! CP model state: the factor matrices of a rank-R decomposition, the
//! quantities derived from them (fit error, gradient, stationarity measure),
//! and uniqueness checks on a computed solution.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{k_rank, khatri_rao, K_RANK_MAX_COLS};
use crate::tensor::{fmt_f64, matricize, DenseTensor, Matrix};

/// Factor matrices `F_1, ..., F_N` of a rank-R CP model. Factor `F_n` has
/// `I_n` rows and `R` columns; column `r` across all factors defines the
/// r-th rank-one term.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    factors: Vec<Matrix>,
    rank: usize,
}

impl FactorSet {
    /// Validates that at least two factors are present, that all share one
    /// column count `R >= 1`, and that every factor has at least one row.
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::argument(format!(
                "a CP model needs at least 2 factor matrices, got {}",
                factors.len()
            )));
        }
        let rank = factors[0].ncols();
        if rank == 0 {
            return Err(Error::argument("factor matrices must have rank >= 1"));
        }
        for (n, f) in factors.iter().enumerate() {
            if f.ncols() != rank {
                return Err(Error::argument(format!(
                    "factor {} has {} columns, expected rank {rank}",
                    n + 1,
                    f.ncols()
                )));
            }
            if f.nrows() == 0 {
                return Err(Error::argument(format!("factor {} has no rows", n + 1)));
            }
        }
        Ok(FactorSet { factors, rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of modes N.
    pub fn order(&self) -> usize {
        self.factors.len()
    }

    /// Tensor extents implied by the factor row counts.
    pub fn row_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.nrows()).collect()
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    /// Factor matrix for a 1-based mode.
    pub fn factor(&self, mode: usize) -> &Matrix {
        assert!(
            (1..=self.order()).contains(&mode),
            "mode {mode} out of range for order {}",
            self.order()
        );
        &self.factors[mode - 1]
    }

    /// Replaces one factor, keeping the shape invariants.
    pub fn set_factor(&mut self, mode: usize, f: Matrix) -> Result<()> {
        if !(1..=self.order()).contains(&mode) {
            return Err(Error::argument(format!(
                "mode {mode} out of range for order {}",
                self.order()
            )));
        }
        let old = &self.factors[mode - 1];
        if f.shape() != old.shape() {
            return Err(Error::argument(format!(
                "factor {mode} must stay {}x{}, got {}x{}",
                old.nrows(),
                old.ncols(),
                f.nrows(),
                f.ncols()
            )));
        }
        self.factors[mode - 1] = f;
        Ok(())
    }

    /// Khatri-Rao product of all factors except mode `n`, taken in
    /// descending mode order:
    /// `K_n = F_N (.) ... (.) F_{n+1} (.) F_{n-1} (.) ... (.) F_1`.
    ///
    /// With this ordering, row `j` of `K_n` matches column `j` of the mode-n
    /// matricization (index `i_1` fastest), so the model's unfolding is
    /// exactly `F_n * K_n^T`.
    ///
    /// Panics if `mode` is not in `1..=order`.
    pub fn khatri_rao_excluding(&self, mode: usize) -> Matrix {
        assert!(
            (1..=self.order()).contains(&mode),
            "mode {mode} out of range for order {}",
            self.order()
        );
        let mut acc: Option<Matrix> = None;
        for (k, f) in self.factors.iter().enumerate().rev() {
            if k + 1 == mode {
                continue;
            }
            acc = Some(match acc {
                None => f.clone(),
                Some(a) => khatri_rao(&a, f).expect("factors share a rank"),
            });
        }
        acc.expect("order >= 2 leaves at least one factor")
    }

    fn check_tensor(&self, t: &DenseTensor) -> Result<()> {
        if t.dims() != self.row_dims().as_slice() {
            return Err(Error::argument(format!(
                "tensor extents {:?} do not match factor rows {:?}",
                t.dims(),
                self.row_dims()
            )));
        }
        Ok(())
    }

    /// Frobenius-norm fit error `||T - [[F_1, ..., F_N]]||_F`, evaluated
    /// through the mode-1 identity (the mode-1 unfolding shares the tensor's
    /// storage, so no rearrangement is needed).
    pub fn fit_error(&self, t: &DenseTensor) -> Result<f64> {
        self.check_tensor(t)?;
        let k = self.khatri_rao_excluding(1);
        let model = &self.factors[0] * k.transpose();
        let ss: f64 = model
            .as_slice()
            .iter()
            .zip(t.values())
            .map(|(m, v)| (v - m) * (v - m))
            .sum();
        Ok(ss.sqrt())
    }

    /// Gradient of the squared fit error with respect to each factor:
    /// `grad_{F_n} = -2 (T_(n) - F_n K_n^T) K_n`.
    pub fn gradient(&self, t: &DenseTensor) -> Result<Vec<Matrix>> {
        self.check_tensor(t)?;
        (1..=self.order())
            .map(|n| {
                let k = self.khatri_rao_excluding(n);
                let tn = matricize(t, n)?;
                let residual = tn - &self.factors[n - 1] * k.transpose();
                Ok((residual * k) * -2.0)
            })
            .collect()
    }

    /// Scale-aware stationarity measure:
    /// `max_n ||T_(n) K_n - F_n K_n^T K_n||_F / (1 + ||T_(n) K_n||_F)`.
    ///
    /// Zero exactly at critical points of the squared fit error; the
    /// denominator keeps the measure comparable across problem sizes.
    pub fn critical_point_residual(&self, t: &DenseTensor) -> Result<f64> {
        self.check_tensor(t)?;
        let mut worst: f64 = 0.0;
        for n in 1..=self.order() {
            let k = self.khatri_rao_excluding(n);
            let tn = matricize(t, n)?;
            let tnk = tn * &k;
            let gram = k.transpose() * &k;
            let num = (&tnk - &self.factors[n - 1] * gram).norm();
            worst = worst.max(num / (1.0 + tnk.norm()));
        }
        Ok(worst)
    }

    /// Stacks all factor entries into one vector, factors in mode order and
    /// each factor column-major. Inverse of [`devectorize_factors`].
    pub fn vectorize(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.factors.iter().map(|f| f.len()).sum());
        for f in &self.factors {
            out.extend_from_slice(f.as_slice());
        }
        out
    }

    /// Rescales every factor column to unit Euclidean norm and returns the
    /// per-component weights `w_r = prod_n ||F_n[:, r]||`. Zero columns keep
    /// weight zero and are left untouched. The weighted normalized model
    /// reproduces the original exactly.
    pub fn normalized(&self) -> (FactorSet, Vec<f64>) {
        let mut factors = self.factors.clone();
        let mut weights = vec![1.0; self.rank];
        for f in &mut factors {
            for r in 0..self.rank {
                let norm = f.column(r).norm();
                if norm > 0.0 {
                    let mut col = f.column_mut(r);
                    col /= norm;
                    weights[r] *= norm;
                } else {
                    weights[r] = 0.0;
                }
            }
        }
        (
            FactorSet {
                factors,
                rank: self.rank,
            },
            weights,
        )
    }

    /// Kruskal-condition report for this solution; see [`UniquenessReport`].
    /// Requires rank at most [`K_RANK_MAX_COLS`].
    pub fn uniqueness_report(&self, rank_tol: f64) -> Result<UniquenessReport> {
        if self.rank > K_RANK_MAX_COLS {
            return Err(Error::unsupported(format!(
                "uniqueness checks are capped at rank {K_RANK_MAX_COLS}, got {}",
                self.rank
            )));
        }
        let k_ranks: Vec<usize> = self
            .factors
            .iter()
            .map(|f| k_rank(f, rank_tol))
            .collect::<Result<_>>()?;
        let kruskal_sum: usize = k_ranks.iter().sum();
        let kruskal_threshold = 2 * self.rank + self.order() - 1;
        Ok(UniquenessReport {
            rank: self.rank,
            k_ranks,
            kruskal_sum,
            kruskal_threshold,
            kruskal_sufficient: kruskal_sum >= kruskal_threshold,
            generic_sufficient: self.generic_uniqueness_bound(),
        })
    }

    /// Order-3 generic uniqueness test: with the largest extent as the third
    /// mode and `R` at most that extent, a rank-R decomposition of an
    /// `I x J x K` tensor is unique for generic factors when
    /// `R (R - 1) / 2 <= I (I - 1) J (J - 1) / 4`.
    /// Returns `None` when the order is not 3 or `R` exceeds every extent.
    fn generic_uniqueness_bound(&self) -> Option<bool> {
        if self.order() != 3 {
            return None;
        }
        let mut dims = self.row_dims();
        dims.sort_unstable();
        let (i, j, k) = (dims[0], dims[1], dims[2]);
        if self.rank > k {
            return None;
        }
        let r = self.rank;
        Some(r * (r - 1) * 2 <= i * (i - 1) * j * (j - 1))
    }
}

/// Rebuilds a [`FactorSet`] from the layout produced by
/// [`FactorSet::vectorize`].
pub fn devectorize_factors(row_dims: &[usize], rank: usize, data: &[f64]) -> Result<FactorSet> {
    let expected: usize = row_dims.iter().map(|&d| d * rank).sum();
    if data.len() != expected {
        return Err(Error::argument(format!(
            "expected {expected} entries for row dims {row_dims:?} at rank {rank}, got {}",
            data.len()
        )));
    }
    let mut factors = Vec::with_capacity(row_dims.len());
    let mut offset = 0;
    for &d in row_dims {
        let len = d * rank;
        factors.push(Matrix::from_column_slice(d, rank, &data[offset..offset + len]));
        offset += len;
    }
    FactorSet::new(factors)
}

/// Outcome of the Kruskal and generic uniqueness checks on a factor set.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub rank: usize,
    /// Kruskal rank of each factor matrix, in mode order.
    pub k_ranks: Vec<usize>,
    pub kruskal_sum: usize,
    /// `2R + N - 1`; a Kruskal-rank sum at or above this certifies
    /// essential uniqueness.
    pub kruskal_threshold: usize,
    pub kruskal_sufficient: bool,
    /// Order-3 generic-uniqueness inequality, when applicable.
    pub generic_sufficient: Option<bool>,
}

impl fmt::Display for UniquenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank: {}", self.rank)?;
        let ks: Vec<String> = self.k_ranks.iter().map(|k| k.to_string()).collect();
        writeln!(f, "mode k-ranks: {}", ks.join(" "))?;
        writeln!(
            f,
            "Kruskal sum {} vs threshold {}: uniqueness {}",
            self.kruskal_sum,
            self.kruskal_threshold,
            if self.kruskal_sufficient {
                "certified"
            } else {
                "not certified"
            }
        )?;
        match self.generic_sufficient {
            Some(true) => writeln!(f, "generic order-3 bound: holds"),
            Some(false) => writeln!(f, "generic order-3 bound: fails"),
            None => writeln!(f, "generic order-3 bound: not applicable"),
        }
    }
}

/// Writes the factor text format: `factors N R`, then for each factor a line
/// with its row count followed by its entries one per line, column-major.
pub fn write_factors(factors: &FactorSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "factors {} {}", factors.order(), factors.rank());
    for f in factors.factors() {
        let _ = writeln!(out, "{}", f.nrows());
        for v in f.as_slice() {
            let _ = writeln!(out, "{}", fmt_f64(*v));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads the factor text format written by [`write_factors`]. Errors carry
/// the path and 1-based line number.
pub fn read_factors(path: impl AsRef<Path>) -> Result<FactorSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file; expected `factors N R` header"))?;
    let (order, rank) = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["factors", n, r] => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::parse(path, 1, format!("invalid order {n:?}")))?;
            let r: usize = r
                .parse()
                .map_err(|_| Error::parse(path, 1, format!("invalid rank {r:?}")))?;
            (n, r)
        }
        _ => {
            return Err(Error::parse(
                path,
                1,
                format!("expected `factors N R` header, found {header:?}"),
            ))
        }
    };
    if order < 2 || rank == 0 {
        return Err(Error::parse(path, 1, "need order >= 2 and rank >= 1"));
    }

    let mut factors = Vec::with_capacity(order);
    for n in 1..=order {
        let (line_no, rows_line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, text.lines().count(), "missing factor row count"))?;
        let rows: usize = rows_line.parse().map_err(|_| {
            Error::parse(
                path,
                line_no,
                format!("invalid row count {rows_line:?} for factor {n}"),
            )
        })?;
        if rows == 0 {
            return Err(Error::parse(path, line_no, "factor row count must be >= 1"));
        }
        let mut values = Vec::with_capacity(rows * rank);
        for _ in 0..rows * rank {
            let (line_no, value_line) = lines.next().ok_or_else(|| {
                Error::parse(
                    path,
                    text.lines().count(),
                    format!("factor {n} is missing entries"),
                )
            })?;
            let v: f64 = value_line.parse().map_err(|_| {
                Error::parse(path, line_no, format!("invalid value {value_line:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(path, line_no, "non-finite value"));
            }
            values.push(v);
        }
        factors.push(Matrix::from_column_slice(rows, rank, &values));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(path, line_no, "trailing content after factors"));
    }
    FactorSet::new(factors)
}
