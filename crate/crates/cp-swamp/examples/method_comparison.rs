//! Head-to-head statistics across many random starts. Every method is run
//! from the same per-seed initial guesses, so the differences in the table
//! are attributable to the update rule alone. The runs execute in parallel;
//! set CP_SWAMP_THREADS to cap the worker count. Results are identical
//! either way.
//!
//! Run with `cargo run --example method_comparison`.

use cp_swamp::diagnostics::{
    compare_methods, export_comparison_csv, DEFAULT_FLAT_TOL, DEFAULT_WINDOW,
};
use cp_swamp::problems;
use cp_swamp::solver::{Method, SolverConfig};

fn main() -> cp_swamp::Result<()> {
    let problem = problems::example2();
    let methods = [Method::Als, Method::Rals, Method::TikhonovAls];
    let seeds: Vec<u64> = (0..20).collect();

    // Rank 2 on this tensor forces a degenerate approximation (see the
    // swamp_from_degeneracy example), which separates the methods sharply.
    let config = SolverConfig::default();
    let summary = compare_methods(
        &problem.tensor,
        problem.rank,
        &methods,
        &seeds,
        &config,
        DEFAULT_WINDOW,
        DEFAULT_FLAT_TOL,
    )?;
    print!("{summary}");

    let csv = std::env::temp_dir().join("cp-swamp-example2-compare.csv");
    export_comparison_csv(&summary, &csv)?;
    println!("full statistics written to {}", csv.display());

    // The per-run reports stay available for custom digests, in
    // (method, seed) order.
    let slowest = summary
        .reports
        .iter()
        .max_by_key(|r| r.iterations)
        .unwrap();
    println!(
        "slowest single run: {} took {} sweeps to fit {:.3e}",
        slowest.method, slowest.iterations, slowest.fit_error
    );
    Ok(())
}
