//! CP tensor decomposition by alternating least squares, with a proximally
//! regularized variant that escapes the "swamps" plain ALS is prone to:
//! long stretches of iterations where the fit barely improves while the
//! factor sub-problems drift toward rank deficiency.
//!
//! The pieces:
//!
//! * [`tensor`]: dense tensor storage, mode-n matricization, rank-one sums,
//!   and the tensor text format.
//! * [`linalg`]: Khatri-Rao and Kronecker products, tolerance-aware least
//!   squares, Kruskal-rank probes.
//! * [`model`]: factor sets with fit error, gradient, stationarity residual,
//!   uniqueness checks, and the factor text format.
//! * [`solver`]: plain ALS, proximally regularized ALS, and Tikhonov ALS,
//!   all with per-sweep traces.
//! * [`diagnostics`]: swamp detection on traces, trace CSV export, and
//!   multi-seed comparison across methods.
//! * [`problems`]: small reference problems exercising the three classic
//!   swamp causes, plus synthetic problem generators.
//!
//! ```
//! use cp_swamp::problems;
//! use cp_swamp::solver::{decompose, Method, SolverConfig};
//!
//! let problem = problems::example1();
//! let config = SolverConfig {
//!     init: Some(problem.init.clone()),
//!     ..SolverConfig::default()
//! };
//! let report = decompose(&problem.tensor, problem.rank, Method::Rals, &config).unwrap();
//! assert!(report.fit_error <= config.fit_tol);
//! ```

pub mod cli;
pub mod diagnostics;
mod error;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use model::FactorSet;
pub use solver::{
    als_step, decompose, rals_step, tikhonov_als_step, Method, SolveReport, SolverConfig, Status,
};
pub use tensor::{DenseTensor, Matrix};
