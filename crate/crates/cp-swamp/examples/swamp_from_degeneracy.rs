//! Fitting below the true rank can be qualitatively harder, not just less
//! accurate. The 2x2x2 tensor here has rank 3, and rank-3 fits converge in a
//! few dozen sweeps. Its best rank-2 approximations are degenerate: the fit
//! error can approach zero only along paths where two rank-one terms grow
//! and nearly cancel. Plain ALS creeps along such a path for tens of
//! thousands of sweeps, tightly correlated with the smallest singular value
//! of the least-squares systems it solves; RALS dampens the cancellation and
//! finishes quickly.
//!
//! Run with `cargo run --example swamp_from_degeneracy`.

use cp_swamp::diagnostics::{detect_swamp, DEFAULT_FLAT_TOL, DEFAULT_WINDOW};
use cp_swamp::problems;
use cp_swamp::solver::{decompose, Method, SolverConfig};

fn main() -> cp_swamp::Result<()> {
    let problem = problems::example2();
    println!(
        "problem: {} ({:?}, true rank {}, fitted at rank {})",
        problem.name,
        problem.tensor.dims(),
        problem.truth.rank(),
        problem.rank
    );

    // At the true rank the problem is easy for both methods.
    println!("\nrank 3, random init:");
    for method in [Method::Als, Method::Rals] {
        let report = decompose(&problem.tensor, 3, method, &SolverConfig::default())?;
        println!(
            "  {:<4} {} after {} sweeps, fit {:.3e}",
            method.to_string(),
            report.status,
            report.iterations,
            report.fit_error
        );
    }

    // At rank 2 the pinned initial guess sends plain ALS into its plateau.
    println!("\nrank 2, pinned init:");
    for method in [Method::Als, Method::Rals] {
        let config = SolverConfig {
            init: Some(problem.init.clone()),
            ..SolverConfig::default()
        };
        let report = decompose(&problem.tensor, problem.rank, method, &config)?;
        let swamp = detect_swamp(&report.trace, DEFAULT_WINDOW, DEFAULT_FLAT_TOL)?;
        println!(
            "  {:<4} {} after {:>5} sweeps, fit {:.3e}",
            method.to_string(),
            report.status,
            report.iterations,
            report.fit_error
        );
        for &(start, end) in &swamp.intervals {
            println!("       plateau over sweeps {start}..={end}");
        }
        if let Some(depth) = swamp.plateau_depth {
            println!("       fit stuck near {depth:.3e} while plateaued");
        }

        // The plateau shows up in the trace as a collapsing smallest
        // singular value of the mode-1 system matrix (the Khatri-Rao
        // product of the other factors).
        if swamp.detected {
            let in_plateau = |iter: usize| {
                swamp
                    .intervals
                    .iter()
                    .any(|&(s, e)| (s..=e).contains(&iter))
            };
            let plateau_sigma = report
                .trace
                .rows
                .iter()
                .filter(|r| in_plateau(r.iter))
                .map(|r| r.sigma_min[0])
                .fold(f64::INFINITY, f64::min);
            let final_sigma = report.trace.rows.last().unwrap().sigma_min[0];
            println!(
                "       sigma_min of the mode-1 system: {plateau_sigma:.3e} at its \
                 plateau low, {final_sigma:.3e} at the last sweep"
            );
        }
    }
    Ok(())
}
