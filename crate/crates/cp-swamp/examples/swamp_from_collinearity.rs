//! Near-collinear factor columns starve the alternating least-squares
//! systems of rank. This fifth-order rank-3 tensor is built from factors
//! whose first two columns sit at cosine 1 - 1e-6 in two of the five modes,
//! so every Khatri-Rao system involving those modes is close to singular.
//! Plain ALS spends most of its run in a detected swamp; RALS, whose
//! proximal term keeps each sub-problem well posed, never enters one.
//!
//! Run with `cargo run --example swamp_from_collinearity`.

use cp_swamp::diagnostics::{detect_swamp, DEFAULT_FLAT_TOL, DEFAULT_WINDOW};
use cp_swamp::problems::{self, EXAMPLE3_COSINE};
use cp_swamp::solver::{decompose, Method, SolverConfig};

fn main() -> cp_swamp::Result<()> {
    let problem = problems::example3();
    println!(
        "problem: {} ({:?}, rank {})",
        problem.name,
        problem.tensor.dims(),
        problem.rank
    );
    for mode in [1, 2] {
        let f = problem.truth.factor(mode);
        let cos = f.column(0).dot(&f.column(1)) / (f.column(0).norm() * f.column(1).norm());
        println!(
            "  mode-{mode} truth columns 0 and 1: cosine {cos:.9} (target {EXAMPLE3_COSINE})"
        );
    }

    println!();
    for method in [Method::Als, Method::Rals] {
        let config = SolverConfig {
            init: Some(problem.init.clone()),
            ..SolverConfig::default()
        };
        let report = decompose(&problem.tensor, problem.rank, method, &config)?;
        let swamp = detect_swamp(&report.trace, DEFAULT_WINDOW, DEFAULT_FLAT_TOL)?;
        println!(
            "{:<4} {} after {:>4} sweeps, fit {:.3e}, swamp {}",
            method.to_string(),
            report.status,
            report.iterations,
            report.fit_error,
            if swamp.detected { "detected" } else { "absent" }
        );

        // Correlate the plateau with the conditioning of the mode-1 system.
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
            for &(start, end) in &swamp.intervals {
                println!("     plateau over sweeps {start}..={end}");
            }
            println!(
                "     mode-1 sigma_min: {plateau_sigma:.3e} at the plateau low vs \
                 {final_sigma:.3e} at the end ({:.3}x)",
                plateau_sigma / final_sigma
            );
        }
    }
    Ok(())
}
