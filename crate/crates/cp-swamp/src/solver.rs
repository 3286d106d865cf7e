//! Alternating least squares for CP decomposition and its proximally
//! regularized variant.
//!
//! One iteration is a full sweep over the modes in order `1..=N`. For each
//! mode the factor is replaced by the minimizer of a linear least-squares
//! sub-problem while all other factors stay fixed (block Gauss-Seidel):
//!
//! * plain ALS minimizes `||T_(n) - F K_n^T||_F^2`;
//! * the proximal variant adds `lambda_k ||F - F_n^k||_F^2`, pulling the
//!   update toward the current iterate;
//! * the Tikhonov variant adds `lambda_k ||F||_F^2` instead, pulling it
//!   toward zero.
//!
//! Both regularized variants shrink `lambda` geometrically each sweep, so
//! they approach plain ALS as the iteration settles.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{smallest_singular_value, solve_least_squares};
use crate::model::FactorSet;
use crate::tensor::{matricize, DenseTensor, Matrix};

/// Update rule used for the per-mode sub-problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain alternating least squares.
    Als,
    /// Proximally regularized ALS: penalty `lambda ||F - F_current||^2`.
    Rals,
    /// Tikhonov-regularized ALS: penalty `lambda ||F||^2`.
    TikhonovAls,
}

impl Method {
    fn uses_lambda(self) -> bool {
        !matches!(self, Method::Als)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Als => "als",
            Method::Rals => "rals",
            Method::TikhonovAls => "tals",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "als" => Ok(Method::Als),
            "rals" => Ok(Method::Rals),
            "tals" => Ok(Method::TikhonovAls),
            other => Err(Error::argument(format!(
                "unknown method {other:?}; expected als, rals, or tals"
            ))),
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Fit error reached `fit_tol`.
    ConvergedFit,
    /// Relative fit-error change dropped below `rel_change_tol`.
    ConvergedChange,
    /// Iteration budget exhausted.
    MaxIters,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::ConvergedFit => "converged-fit",
            Status::ConvergedChange => "converged-change",
            Status::MaxIters => "max-iters",
        })
    }
}

/// Tuning knobs for [`decompose`]. `Default` gives the settings used
/// throughout the examples.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Sweep budget; must be at least 1.
    pub max_iters: usize,
    /// Absolute fit-error threshold for declaring convergence.
    pub fit_tol: f64,
    /// Per-sweep fit-change threshold: the run stops with
    /// [`Status::ConvergedChange`] when
    /// `|f_k - f_{k-1}| / (1 + f_{k-1})` drops to this value or below.
    /// `0.0` disables the check.
    pub rel_change_tol: f64,
    /// Initial regularization weight (ignored by plain ALS).
    pub lambda0: f64,
    /// Geometric shrink factor applied to lambda after every sweep,
    /// in `(0, 1]`.
    pub decay: f64,
    /// Floor for the lambda schedule; must not exceed `lambda0`.
    pub lambda_min: f64,
    /// Relative rank tolerance handed to the least-squares kernel;
    /// `0.0` selects the size-based default.
    pub rank_tol: f64,
    /// Seed for the random initial guess when `init` is `None`.
    pub seed: u64,
    /// Explicit initial factors; row dims and rank must match the problem.
    pub init: Option<FactorSet>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 50_000,
            fit_tol: 1e-5,
            rel_change_tol: 0.0,
            lambda0: 1.0,
            decay: 0.75,
            lambda_min: 1e-12,
            rank_tol: 0.0,
            seed: 0,
            init: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self, method: Method, dims: &[usize], rank: usize) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::argument("max_iters must be at least 1"));
        }
        for (name, v) in [
            ("fit_tol", self.fit_tol),
            ("rel_change_tol", self.rel_change_tol),
            ("rank_tol", self.rank_tol),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::argument(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if method.uses_lambda() {
            if !self.lambda0.is_finite() || self.lambda0 < 0.0 {
                return Err(Error::argument(format!(
                    "lambda0 must be finite and >= 0, got {}",
                    self.lambda0
                )));
            }
            if !(self.decay > 0.0 && self.decay <= 1.0) {
                return Err(Error::argument(format!(
                    "decay must lie in (0, 1], got {}",
                    self.decay
                )));
            }
            if !self.lambda_min.is_finite()
                || self.lambda_min < 0.0
                || self.lambda_min > self.lambda0
            {
                return Err(Error::argument(format!(
                    "lambda_min must satisfy 0 <= lambda_min <= lambda0, got {}",
                    self.lambda_min
                )));
            }
        }
        if let Some(init) = &self.init {
            if init.row_dims() != dims {
                return Err(Error::argument(format!(
                    "initial factors have row dims {:?}, tensor has extents {dims:?}",
                    init.row_dims()
                )));
            }
            if init.rank() != rank {
                return Err(Error::argument(format!(
                    "initial factors have rank {}, requested rank {rank}",
                    init.rank()
                )));
            }
        }
        Ok(())
    }
}

/// One sweep's worth of trace data.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based sweep number.
    pub iter: usize,
    /// Fit error after the sweep.
    pub fit_error: f64,
    /// Regularization weight used during the sweep (0 for plain ALS).
    pub lambda: f64,
    /// Smallest singular value of `K_n` as used by each mode's solve,
    /// in mode order.
    pub sigma_min: Vec<f64>,
    /// Frobenius norm of each factor update during the sweep, in mode order.
    pub delta: Vec<f64>,
}

/// Per-sweep history of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// Number of modes, fixing the per-row vector lengths.
    pub n_modes: usize,
    /// Fit threshold the run was stopped against; diagnostics use it to
    /// tell a plateau near convergence from a genuine stall.
    pub fit_tol: f64,
    pub rows: Vec<TraceRow>,
}

/// Result of a [`decompose`] run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub status: Status,
    /// Sweeps actually performed (equals `trace.rows.len()`).
    pub iterations: usize,
    /// Fit error of the initial guess, before the first sweep.
    pub initial_fit_error: f64,
    /// Fit error of the returned factors.
    pub fit_error: f64,
    pub factors: FactorSet,
    pub trace: IterationTrace,
}

/// Uniform `[0, 1)` initial factors from a seeded generator. Factors are
/// filled in mode order, each column-major, so a seed pins the full guess.
pub fn random_factors(dims: &[usize], rank: usize, seed: u64) -> Result<FactorSet> {
    if rank == 0 {
        return Err(Error::argument("rank must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FactorSet::new(
        dims.iter()
            .map(|&d| {
                Matrix::from_iterator(d, rank, (0..d * rank).map(|_| rng.random::<f64>()))
            })
            .collect(),
    )
}

/// One plain alternating-least-squares sweep: for each mode in order,
/// the factor is replaced by the minimum-norm least-squares minimizer of
/// `||T_(n) - F K_n^T||_F` against the other current factors, so later
/// modes already see the earlier updates.
pub fn als_step(t: &DenseTensor, f: &FactorSet, rank_tol: f64) -> Result<FactorSet> {
    step(Method::Als, t, f, 0.0, rank_tol)
}

/// One proximally regularized sweep: each mode minimizes
/// `||T_(n) - F K_n^T||_F^2 + lambda_k ||F - F_n||_F^2` around the current
/// iterate `F_n`. With `lambda_k == 0` the result equals [`als_step`] bit
/// for bit, since the solve takes the identical unregularized path.
pub fn rals_step(
    t: &DenseTensor,
    f: &FactorSet,
    lambda_k: f64,
    rank_tol: f64,
) -> Result<FactorSet> {
    step(Method::Rals, t, f, lambda_k, rank_tol)
}

/// One ridge-regularized sweep: like [`rals_step`] but the penalty
/// `lambda ||F||_F^2` shrinks toward zero rather than the current iterate.
pub fn tikhonov_als_step(
    t: &DenseTensor,
    f: &FactorSet,
    lambda: f64,
    rank_tol: f64,
) -> Result<FactorSet> {
    step(Method::TikhonovAls, t, f, lambda, rank_tol)
}

fn step(
    method: Method,
    t: &DenseTensor,
    f: &FactorSet,
    lambda: f64,
    rank_tol: f64,
) -> Result<FactorSet> {
    if !(lambda >= 0.0) {
        return Err(Error::argument(format!("lambda must be >= 0, got {lambda}")));
    }
    if f.row_dims() != t.dims() {
        return Err(Error::argument(format!(
            "factor row dims {:?} do not match tensor dims {:?}",
            f.row_dims(),
            t.dims()
        )));
    }
    let mut factors = f.clone();
    for mode in 1..=t.order() {
        let tn_t = matricize(t, mode)?.transpose();
        update_mode(method, &mut factors, &tn_t, mode, lambda, rank_tol)?;
    }
    Ok(factors)
}

/// Solves the mode-`n` sub-problem and replaces that factor in place.
/// Returns the smallest singular value of `K_n` and the Frobenius norm of
/// the factor update.
///
/// With `lambda == 0` every method reduces to the same unregularized solve;
/// the regularized objectives are handled as stacked least squares,
/// `[K_n; sqrt(lambda) I] X = [T_(n)^T; sqrt(lambda) G^T]` with `G` the
/// current factor (proximal) or zero (Tikhonov), which reproduces the
/// penalized normal equations without forming Gram matrices.
fn update_mode(
    method: Method,
    factors: &mut FactorSet,
    tn_t: &Matrix,
    mode: usize,
    lambda: f64,
    rank_tol: f64,
) -> Result<(f64, f64)> {
    let k = factors.khatri_rao_excluding(mode);
    let sigma = smallest_singular_value(&k);
    let rank = factors.rank();

    let x = if lambda == 0.0 {
        solve_least_squares(&k, tn_t, rank_tol)?
    } else {
        let sqrt_l = lambda.sqrt();
        let m = k.nrows();
        let mut a = Matrix::zeros(m + rank, rank);
        a.view_mut((0, 0), (m, rank)).copy_from(&k);
        for r in 0..rank {
            a[(m + r, r)] = sqrt_l;
        }
        let mut b = Matrix::zeros(m + rank, tn_t.ncols());
        b.view_mut((0, 0), (m, tn_t.ncols())).copy_from(tn_t);
        if method == Method::Rals {
            b.view_mut((m, 0), (rank, tn_t.ncols()))
                .copy_from(&(factors.factor(mode).transpose() * sqrt_l));
        }
        solve_least_squares(&a, &b, rank_tol)?
    };

    let updated = x.transpose();
    let delta = (&updated - factors.factor(mode)).norm();
    factors.set_factor(mode, updated)?;
    Ok((sigma, delta))
}

/// Runs the chosen method on `t` at the given rank.
///
/// The initial guess comes from `config.init` when present, otherwise from
/// [`random_factors`] with `config.seed`. Stopping checks run once per
/// sweep, in order: fit tolerance, then relative-change stall, then the
/// iteration budget.
pub fn decompose(
    t: &DenseTensor,
    rank: usize,
    method: Method,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if rank == 0 {
        return Err(Error::argument("rank must be at least 1"));
    }
    if t.order() < 2 {
        return Err(Error::argument(
            "decomposition needs an order-2 or higher tensor",
        ));
    }
    config.validate(method, t.dims(), rank)?;

    let mut factors = match &config.init {
        Some(init) => init.clone(),
        None => random_factors(t.dims(), rank, config.seed)?,
    };
    let order = t.order();

    // The unfoldings never change; precompute each right-hand side once.
    let unfoldings_t: Vec<Matrix> = (1..=order)
        .map(|n| Ok(matricize(t, n)?.transpose()))
        .collect::<Result<_>>()?;

    let initial_fit_error = factors.fit_error(t)?;
    let mut trace = IterationTrace {
        n_modes: order,
        fit_tol: config.fit_tol,
        rows: Vec::new(),
    };
    let mut lambda = if method.uses_lambda() {
        config.lambda0
    } else {
        0.0
    };
    let mut prev_fit = initial_fit_error;
    let mut status = Status::MaxIters;

    for iter in 1..=config.max_iters {
        let mut sigma_min = Vec::with_capacity(order);
        let mut delta = Vec::with_capacity(order);
        for n in 1..=order {
            let (s, d) = update_mode(
                method,
                &mut factors,
                &unfoldings_t[n - 1],
                n,
                lambda,
                config.rank_tol,
            )?;
            sigma_min.push(s);
            delta.push(d);
        }
        let fit_error = factors.fit_error(t)?;
        trace.rows.push(TraceRow {
            iter,
            fit_error,
            lambda,
            sigma_min,
            delta,
        });

        if fit_error <= config.fit_tol {
            status = Status::ConvergedFit;
            break;
        }
        if config.rel_change_tol > 0.0 {
            let rel = (prev_fit - fit_error).abs() / (1.0 + prev_fit);
            if rel <= config.rel_change_tol {
                status = Status::ConvergedChange;
                break;
            }
        }
        prev_fit = fit_error;
        if method.uses_lambda() {
            lambda = (config.decay * lambda).max(config.lambda_min);
        }
    }

    let fit_error = trace.rows.last().map_or(initial_fit_error, |r| r.fit_error);
    Ok(SolveReport {
        method,
        status,
        iterations: trace.rows.len(),
        initial_fit_error,
        fit_error,
        factors,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::from_rank_one_sum;

    fn random_problem(seed: u64, dims: &[usize], rank: usize) -> DenseTensor {
        from_rank_one_sum(&random_factors(dims, rank, seed).unwrap())
    }

    fn perturbed(f: &FactorSet, eps: f64, seed: u64) -> FactorSet {
        let noise = random_factors(&f.row_dims(), f.rank(), seed).unwrap();
        FactorSet::new(
            f.factors()
                .iter()
                .zip(noise.factors())
                .map(|(a, n)| a + n * eps)
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn method_round_trips_through_strings() {
        for m in [Method::Als, Method::Rals, Method::TikhonovAls] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("newton".parse::<Method>().is_err());
    }

    #[test]
    fn random_factors_deterministic_and_in_range() {
        let a = random_factors(&[3, 4, 2], 2, 42).unwrap();
        let b = random_factors(&[3, 4, 2], 2, 42).unwrap();
        assert_eq!(a, b);
        let c = random_factors(&[3, 4, 2], 2, 43).unwrap();
        assert_ne!(a, c);
        for f in a.factors() {
            assert!(f.iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }

    #[test]
    fn exact_init_converges_immediately() {
        let truth = random_factors(&[3, 3, 3], 2, 5).unwrap();
        let t = from_rank_one_sum(&truth);
        let cfg = SolverConfig {
            init: Some(truth.clone()),
            fit_tol: 1e-10,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Als, &cfg).unwrap();
        assert_eq!(report.status, Status::ConvergedFit);
        assert_eq!(report.iterations, 1);
        assert!(report.initial_fit_error < 1e-10);
        assert!(report.fit_error < 1e-10);
    }

    #[test]
    fn near_solution_init_converges_for_all_methods() {
        let truth = random_factors(&[4, 3, 3], 2, 8).unwrap();
        let t = from_rank_one_sum(&truth);
        for method in [Method::Als, Method::Rals, Method::TikhonovAls] {
            let cfg = SolverConfig {
                init: Some(perturbed(&truth, 1e-3, 99)),
                fit_tol: 1e-8,
                max_iters: 2000,
                lambda0: 1e-3,
                ..SolverConfig::default()
            };
            let report = decompose(&t, 2, method, &cfg).unwrap();
            assert_eq!(report.status, Status::ConvergedFit, "{method}");
            assert!(report.fit_error <= 1e-8);
            assert_eq!(report.iterations, report.trace.rows.len());
        }
    }

    #[test]
    fn als_sweeps_never_increase_fit() {
        for seed in 0..20u64 {
            let t = random_problem(1000 + seed, &[4, 3, 3], 3);
            let cfg = SolverConfig {
                seed,
                max_iters: 60,
                fit_tol: 0.0,
                ..SolverConfig::default()
            };
            let report = decompose(&t, 3, Method::Als, &cfg).unwrap();
            let mut prev = report.initial_fit_error;
            for row in &report.trace.rows {
                assert!(
                    row.fit_error <= prev + 1e-12 * (1.0 + prev),
                    "seed {seed}, sweep {}: {} > {prev}",
                    row.iter,
                    row.fit_error
                );
                prev = row.fit_error;
            }
        }
    }

    #[test]
    fn rals_satisfies_per_sweep_descent_inequality() {
        // Each proximal sub-step improves the squared fit by at least
        // lambda times its squared update; summed over a sweep this gives
        // f_prev^2 - f_new^2 >= lambda * sum_n delta_n^2.
        for seed in 0..10u64 {
            let t = random_problem(2000 + seed, &[3, 3, 4], 3);
            let cfg = SolverConfig {
                seed,
                max_iters: 80,
                fit_tol: 0.0,
                ..SolverConfig::default()
            };
            let report = decompose(&t, 3, Method::Rals, &cfg).unwrap();
            let mut prev = report.initial_fit_error;
            for row in &report.trace.rows {
                let gain = prev * prev - row.fit_error * row.fit_error;
                let bound = row.lambda * row.delta.iter().map(|d| d * d).sum::<f64>();
                assert!(
                    gain >= bound - 1e-9 * (1.0 + prev * prev),
                    "seed {seed}, sweep {}: gain {gain} < bound {bound}",
                    row.iter
                );
                prev = row.fit_error;
            }
        }
    }

    #[test]
    fn huge_lambda_freezes_proximal_iterates() {
        let t = random_problem(7, &[3, 3, 3], 2);
        let init = random_factors(&[3, 3, 3], 2, 70).unwrap();
        let cfg = SolverConfig {
            init: Some(init.clone()),
            max_iters: 3,
            fit_tol: 0.0,
            lambda0: 1e12,
            decay: 1.0,
            lambda_min: 1e12,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Rals, &cfg).unwrap();
        for (f, f0) in report.factors.factors().iter().zip(init.factors()) {
            assert!((f - f0).norm() < 1e-6, "moved by {}", (f - f0).norm());
        }
        assert!((report.fit_error - report.initial_fit_error).abs() < 1e-4);
    }

    #[test]
    fn huge_lambda_shrinks_tikhonov_iterates_toward_zero() {
        let t = random_problem(7, &[3, 3, 3], 2);
        let init = random_factors(&[3, 3, 3], 2, 70).unwrap();
        let cfg = SolverConfig {
            init: Some(init.clone()),
            max_iters: 1,
            fit_tol: 0.0,
            lambda0: 1e12,
            decay: 1.0,
            lambda_min: 1e12,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::TikhonovAls, &cfg).unwrap();
        for f in report.factors.factors() {
            assert!(f.norm() < 1e-6, "norm {}", f.norm());
        }
    }

    #[test]
    fn tikhonov_first_update_satisfies_ridge_normal_equations() {
        // Mode 1 updates first, so after one sweep the returned factor 1 is
        // the ridge solution built from the initial modes 2 and 3:
        // (K^T K + lambda I) F_1^T = K^T T_(1)^T.
        let t = random_problem(31, &[4, 3, 3], 2);
        let init = random_factors(&[4, 3, 3], 2, 32).unwrap();
        let lambda = 0.37;
        let cfg = SolverConfig {
            init: Some(init.clone()),
            max_iters: 1,
            fit_tol: 0.0,
            lambda0: lambda,
            lambda_min: 0.0,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::TikhonovAls, &cfg).unwrap();
        let k = init.khatri_rao_excluding(1);
        let t1t = matricize(&t, 1).unwrap().transpose();
        let lhs = (k.transpose() * &k + Matrix::identity(2, 2) * lambda)
            * report.factors.factor(1).transpose();
        let rhs = k.transpose() * t1t;
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn rals_first_update_satisfies_proximal_normal_equations() {
        // Same setup as the ridge check, with the proximal right-hand side:
        // (K^T K + lambda I) F_1^T = K^T T_(1)^T + lambda (F_1^0)^T.
        let t = random_problem(31, &[4, 3, 3], 2);
        let init = random_factors(&[4, 3, 3], 2, 32).unwrap();
        let lambda = 0.37;
        let cfg = SolverConfig {
            init: Some(init.clone()),
            max_iters: 1,
            fit_tol: 0.0,
            lambda0: lambda,
            lambda_min: 0.0,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Rals, &cfg).unwrap();
        let k = init.khatri_rao_excluding(1);
        let t1t = matricize(&t, 1).unwrap().transpose();
        let lhs = (k.transpose() * &k + Matrix::identity(2, 2) * lambda)
            * report.factors.factor(1).transpose();
        let rhs = k.transpose() * t1t + init.factor(1).transpose() * lambda;
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn lambda_schedule_decays_to_floor() {
        let t = random_problem(3, &[3, 3, 3], 2);
        let cfg = SolverConfig {
            max_iters: 40,
            fit_tol: 0.0,
            lambda0: 1.0,
            decay: 0.5,
            lambda_min: 1e-3,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Rals, &cfg).unwrap();
        for (k, row) in report.trace.rows.iter().enumerate() {
            let expected = (0.5f64.powi(k as i32)).max(1e-3);
            assert!((row.lambda - expected).abs() <= 1e-15 * expected);
        }
    }

    #[test]
    fn single_sweep_budget_reports_max_iters() {
        let t = random_problem(13, &[3, 3, 3], 2);
        let cfg = SolverConfig {
            max_iters: 1,
            fit_tol: 1e-12,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Als, &cfg).unwrap();
        assert_eq!(report.status, Status::MaxIters);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.trace.rows.len(), 1);
        assert_eq!(report.trace.rows[0].sigma_min.len(), 3);
        assert_eq!(report.trace.rows[0].delta.len(), 3);
    }

    #[test]
    fn zero_iteration_budget_is_an_error() {
        let t = random_problem(13, &[3, 3, 3], 2);
        let cfg = SolverConfig {
            max_iters: 0,
            ..SolverConfig::default()
        };
        assert!(decompose(&t, 2, Method::Als, &cfg).is_err());
    }

    #[test]
    fn rel_change_stop_reports_converged_change() {
        // A rank-1 fit of a rank-3 tensor levels off well above fit_tol,
        // tripping the relative-change stop.
        let t = random_problem(40, &[4, 4, 4], 3);
        let cfg = SolverConfig {
            max_iters: 5000,
            fit_tol: 1e-12,
            rel_change_tol: 1e-9,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 1, Method::Als, &cfg).unwrap();
        assert_eq!(report.status, Status::ConvergedChange);
        assert!(report.iterations < 5000);
    }

    #[test]
    fn rals_with_zero_lambda_matches_als_bitwise() {
        let t = random_problem(55, &[4, 3, 3], 2);
        let base = SolverConfig {
            max_iters: 25,
            fit_tol: 0.0,
            seed: 9,
            lambda0: 0.0,
            lambda_min: 0.0,
            ..SolverConfig::default()
        };
        let als = decompose(&t, 2, Method::Als, &base).unwrap();
        let rals = decompose(&t, 2, Method::Rals, &base).unwrap();
        for (a, b) in als.factors.factors().iter().zip(rals.factors.factors()) {
            assert_eq!(a.as_slice(), b.as_slice());
        }
        for (ra, rb) in als.trace.rows.iter().zip(&rals.trace.rows) {
            assert_eq!(ra.fit_error.to_bits(), rb.fit_error.to_bits());
            assert_eq!(ra.sigma_min, rb.sigma_min);
        }
    }

    #[test]
    fn config_validation_rejects_bad_settings() {
        let t = random_problem(1, &[3, 3, 3], 2);
        let bad = |f: &dyn Fn(&mut SolverConfig)| {
            let mut cfg = SolverConfig::default();
            f(&mut cfg);
            decompose(&t, 2, Method::Rals, &cfg).is_err()
        };
        assert!(bad(&|c| c.fit_tol = -1.0));
        assert!(bad(&|c| c.rel_change_tol = f64::NAN));
        assert!(bad(&|c| c.decay = 0.0));
        assert!(bad(&|c| c.decay = 1.5));
        assert!(bad(&|c| c.lambda0 = -0.5));
        assert!(bad(&|c| c.lambda_min = 2.0 * c.lambda0));
        assert!(bad(&|c| c.rank_tol = -1e-9));
        assert!(bad(&|c| {
            c.init = Some(random_factors(&[3, 3], 2, 0).unwrap())
        }));
        assert!(bad(&|c| {
            c.init = Some(random_factors(&[3, 3, 3], 4, 0).unwrap())
        }));
        assert!(decompose(&t, 0, Method::Als, &SolverConfig::default()).is_err());
    }

    #[test]
    fn als_ignores_lambda_settings() {
        let t = random_problem(72, &[3, 3, 3], 2);
        let a = SolverConfig {
            max_iters: 15,
            fit_tol: 0.0,
            lambda0: 5.0,
            lambda_min: 0.1,
            ..SolverConfig::default()
        };
        let b = SolverConfig {
            max_iters: 15,
            fit_tol: 0.0,
            lambda0: 0.001,
            lambda_min: 0.0,
            ..SolverConfig::default()
        };
        let ra = decompose(&t, 2, Method::Als, &a).unwrap();
        let rb = decompose(&t, 2, Method::Als, &b).unwrap();
        assert_eq!(ra.fit_error.to_bits(), rb.fit_error.to_bits());
        assert!(ra.trace.rows.iter().all(|r| r.lambda == 0.0));
    }

    #[test]
    fn als_step_fixes_exact_factors() {
        let truth = random_factors(&[3, 4, 2], 2, 5).unwrap();
        let t = from_rank_one_sum(&truth);
        let next = als_step(&t, &truth, 0.0).unwrap();
        for (f, f0) in next.factors().iter().zip(truth.factors()) {
            for (a, b) in f.iter().zip(f0.iter()) {
                assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn one_step_equals_one_solver_sweep_bitwise() {
        let t = random_problem(31, &[3, 4, 3], 3);
        let guess = random_factors(&[3, 4, 3], 2, 13).unwrap();
        for (method, lambda) in [
            (Method::Als, 0.0),
            (Method::Rals, 0.4),
            (Method::TikhonovAls, 0.4),
        ] {
            let cfg = SolverConfig {
                init: Some(guess.clone()),
                max_iters: 1,
                fit_tol: 0.0,
                lambda0: lambda,
                lambda_min: 0.0,
                ..SolverConfig::default()
            };
            let report = decompose(&t, 2, method, &cfg).unwrap();
            let stepped = match method {
                Method::Als => als_step(&t, &guess, 0.0).unwrap(),
                Method::Rals => rals_step(&t, &guess, lambda, 0.0).unwrap(),
                Method::TikhonovAls => tikhonov_als_step(&t, &guess, lambda, 0.0).unwrap(),
            };
            for (f, g) in report.factors.factors().iter().zip(stepped.factors()) {
                assert_eq!(f.as_slice(), g.as_slice(), "{method}");
            }
        }
    }

    #[test]
    fn zero_lambda_steps_equal_als_step_bitwise() {
        let t = random_problem(32, &[4, 3, 3], 3);
        let guess = random_factors(&[4, 3, 3], 3, 14).unwrap();
        let plain = als_step(&t, &guess, 0.0).unwrap();
        let proximal = rals_step(&t, &guess, 0.0, 0.0).unwrap();
        let ridge = tikhonov_als_step(&t, &guess, 0.0, 0.0).unwrap();
        for other in [&proximal, &ridge] {
            for (f, g) in plain.factors().iter().zip(other.factors()) {
                assert_eq!(f.as_slice(), g.as_slice());
            }
        }
    }

    #[test]
    fn huge_lambda_step_limits() {
        let t = random_problem(33, &[3, 3, 3], 2);
        let guess = random_factors(&[3, 3, 3], 2, 15).unwrap();
        // The proximal step barely moves; the ridge step collapses to zero.
        let proximal = rals_step(&t, &guess, 1e12, 0.0).unwrap();
        for (f, f0) in proximal.factors().iter().zip(guess.factors()) {
            assert!((f - f0).norm() / f0.norm() <= 1e-6);
        }
        let ridge = tikhonov_als_step(&t, &guess, 1e12, 0.0).unwrap();
        for (f, f0) in ridge.factors().iter().zip(guess.factors()) {
            assert!(f.norm() / f0.norm() <= 1e-3, "{} vs {}", f.norm(), f0.norm());
        }
    }

    #[test]
    fn step_functions_reject_bad_arguments() {
        let t = random_problem(34, &[3, 3, 3], 2);
        let guess = random_factors(&[3, 3, 3], 2, 16).unwrap();
        assert!(rals_step(&t, &guess, -1.0, 0.0).is_err());
        assert!(tikhonov_als_step(&t, &guess, f64::NAN, 0.0).is_err());
        let mismatched = random_factors(&[3, 2, 3], 2, 16).unwrap();
        assert!(als_step(&t, &mismatched, 0.0).is_err());
    }
}
