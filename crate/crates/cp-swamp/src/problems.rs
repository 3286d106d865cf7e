//! Built-in reference problems, one per classic swamp cause, plus synthetic
//! problem generators.
//!
//! * [`example1`]: well-conditioned 3x3x3 rank-2 problem where a column
//!   permutation in the initial guess sends plain ALS through a swamp.
//! * [`example2`]: 2x2x2 tensor of rank 3 fitted at rank 2; the best rank-2
//!   approximation sits on a degenerate boundary and ALS crawls toward it.
//! * [`example3`]: fifth-order rank-3 tensor whose ground-truth factors
//!   contain a nearly collinear column pair in two modes, keeping the
//!   Khatri-Rao systems close to rank-deficient.
//!
//! The first two use the exact matrices and initial guesses that the
//! examples in this crate's test suite are calibrated against; the third is
//! generated from seeded random factors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::FactorSet;
use crate::solver::random_factors;
use crate::tensor::{from_rank_one_sum, DenseTensor, Matrix};

/// A reference problem: the tensor, the rank of its featured run, the
/// initial guess that featured run starts from, and the factors the tensor
/// was built from.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub tensor: DenseTensor,
    /// Rank of the featured run (not always the tensor's true rank; see
    /// [`example2`]).
    pub rank: usize,
    /// Initial guess for the featured run, with `rank` columns per factor.
    pub init: FactorSet,
    /// Factors the tensor was constructed from.
    pub truth: FactorSet,
}

/// 3x3x3 rank-2 problem. The initial guess reuses the true factors but with
/// the columns of the second one swapped; that mismatch is enough to drag
/// plain ALS through a long plateau, while the true factors themselves are
/// well conditioned.
pub fn example1() -> Problem {
    let a = Matrix::from_row_slice(3, 2, &[1., 2., 2., 1., 3., 2.]);
    let b = Matrix::from_row_slice(3, 2, &[2., 1., -1., 3., 1., -1.]);
    let c = Matrix::from_row_slice(3, 2, &[3., 1., 1., 2., 2., 2.]);
    let truth = FactorSet::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
    let b_swapped = Matrix::from_row_slice(3, 2, &[1., 2., 3., -1., -1., 1.]);
    let init = FactorSet::new(vec![a, b_swapped, c]).unwrap();
    Problem {
        name: "example1".into(),
        tensor: from_rank_one_sum(&truth),
        rank: 2,
        init,
        truth,
    }
}

/// 2x2x2 tensor of rank 3, featured at rank 2. Rank-3 tensors of this size
/// are limits of rank-2 ones, so the rank-2 fit error can be driven toward
/// zero only along a degenerate path with growing factor norms; plain ALS
/// from the pinned initial guess spends tens of thousands of sweeps there.
pub fn example2() -> Problem {
    let a = Matrix::from_row_slice(2, 3, &[1., 2., 3., 2., 1., 2.]);
    let b = Matrix::from_row_slice(2, 3, &[2., 1., 1., -1., 3., 1.]);
    let c = Matrix::from_row_slice(2, 3, &[3., 1., 2., 1., 2., -1.]);
    let truth = FactorSet::new(vec![a, b, c]).unwrap();
    let init = FactorSet::new(vec![
        Matrix::from_row_slice(2, 2, &[0.1679, 0.7127, 0.9787, 0.5005]),
        Matrix::from_row_slice(2, 2, &[0.4711, 0.6820, 0.0596, 0.0424]),
        Matrix::from_row_slice(2, 2, &[0.0714, 0.0967, 0.5216, 0.8181]),
    ])
    .unwrap();
    Problem {
        name: "example2".into(),
        tensor: from_rank_one_sum(&truth),
        rank: 2,
        init,
        truth,
    }
}

/// Extents of the [`example3`] tensor.
pub const EXAMPLE3_DIMS: [usize; 5] = [3, 3, 3, 3, 3];
/// Cosine between the nearly collinear ground-truth column pairs of
/// [`example3`].
pub const EXAMPLE3_COSINE: f64 = 1.0 - 1e-6;
const EXAMPLE3_TRUTH_SEED: u64 = 49;
const EXAMPLE3_INIT_SEED: u64 = 3;

/// Seeded factors with entries uniform in `[-1, 1)`. Ground truths need
/// sign-mixed columns: a nearly collinear pair of columns can then nearly
/// cancel, which is what starves the Khatri-Rao systems of rank along the
/// optimization path. All-positive factors make the same pair benign, so
/// the solver's `[0, 1)` initial guesses stay as they are.
fn centered_factors(dims: &[usize], rank: usize, seed: u64) -> Result<FactorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FactorSet::new(
        dims.iter()
            .map(|&d| {
                Matrix::from_iterator(
                    d,
                    rank,
                    (0..d * rank).map(|_| rng.random::<f64>() * 2.0 - 1.0),
                )
            })
            .collect(),
    )
}

/// Fifth-order rank-3 problem with built-in rank deficiency: the first two
/// ground-truth factors each have their first two columns at cosine
/// `1 - 1e-6`, so every Khatri-Rao system involving them is nearly singular
/// and plain ALS wades through a swamp before escaping. The seeds are pinned
/// to an instance where that swamp is pronounced under plain ALS and absent
/// under the proximal solver.
pub fn example3() -> Problem {
    let mut truth = centered_factors(&EXAMPLE3_DIMS, 3, EXAMPLE3_TRUTH_SEED).unwrap();
    for mode in [1, 2] {
        let f = with_column_cosine(truth.factor(mode), 0, 1, EXAMPLE3_COSINE).unwrap();
        truth.set_factor(mode, f).unwrap();
    }
    let init = random_factors(&EXAMPLE3_DIMS, 3, EXAMPLE3_INIT_SEED).unwrap();
    Problem {
        name: "example3".into(),
        tensor: from_rank_one_sum(&truth),
        rank: 3,
        init,
        truth,
    }
}

/// Built-in problem by number, 1 through 3.
pub fn by_number(which: usize) -> Result<Problem> {
    match which {
        1 => Ok(example1()),
        2 => Ok(example2()),
        3 => Ok(example3()),
        other => Err(Error::argument(format!(
            "no example {other}; available examples are 1, 2, 3"
        ))),
    }
}

/// Returns `m` with column `j` redirected so that the cosine between
/// columns `i` and `j` is exactly `cosine`, keeping column `j`'s norm.
/// The new column lies in the span of the old two, so the construction is
/// deterministic.
pub fn with_column_cosine(m: &Matrix, i: usize, j: usize, cosine: f64) -> Result<Matrix> {
    if i == j || i >= m.ncols() || j >= m.ncols() {
        return Err(Error::argument(format!(
            "need two distinct column indices below {}, got {i} and {j}",
            m.ncols()
        )));
    }
    if !(-1.0..=1.0).contains(&cosine) {
        return Err(Error::argument(format!(
            "cosine must lie in [-1, 1], got {cosine}"
        )));
    }
    let ci = m.column(i);
    let cj = m.column(j);
    let (ni, nj) = (ci.norm(), cj.norm());
    if ni == 0.0 || nj == 0.0 {
        return Err(Error::argument("columns must be nonzero"));
    }
    let u = ci.clone_owned() / ni;
    // Component of column j orthogonal to u; fixes the rotation plane.
    let mut v = cj.clone_owned() - &u * cj.dot(&u);
    let vn = v.norm();
    if vn <= 1e-12 * nj {
        return Err(Error::argument(
            "columns are already parallel; the target plane is degenerate",
        ));
    }
    v /= vn;
    let new_col = (u * cosine + v * (1.0 - cosine * cosine).sqrt()) * nj;
    let mut out = m.clone();
    out.set_column(j, &new_col);
    Ok(out)
}

/// Random CP problem: a tensor assembled from uniform `[0, 1)` factors of
/// the given rank, returned together with those factors.
pub fn random_rank_tensor(
    dims: &[usize],
    rank: usize,
    seed: u64,
) -> Result<(DenseTensor, FactorSet)> {
    let truth = random_factors(dims, rank, seed)?;
    Ok((from_rank_one_sum(&truth), truth))
}
