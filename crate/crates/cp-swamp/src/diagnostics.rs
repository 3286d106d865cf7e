//! Swamp detection on iteration traces, trace CSV export, and multi-seed
//! comparison of solver methods.
//!
//! A "swamp" is a long stretch of sweeps where the fit error stays nearly
//! constant well above the convergence threshold before eventually dropping;
//! the detector looks for exactly that pattern in a recorded trace.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{decompose, random_factors, IterationTrace, Method, SolveReport, SolverConfig, Status, TraceRow};
use crate::tensor::{fmt_f64, DenseTensor};

/// Default minimum sweep span for a plateau to count as a swamp.
pub const DEFAULT_WINDOW: usize = 50;
/// Default relative per-sweep improvement below which progress counts
/// as flat.
pub const DEFAULT_FLAT_TOL: f64 = 1e-4;

/// Outcome of [`detect_swamp`].
#[derive(Debug, Clone, PartialEq)]
pub struct SwampReport {
    /// True when at least one qualifying plateau was found.
    pub detected: bool,
    /// Plateaus as inclusive sweep-number ranges `(start, end)`,
    /// each spanning at least the requested window.
    pub intervals: Vec<(usize, usize)>,
    /// Smallest fit error inside the longest detected interval
    /// (ties broken toward the earliest); `None` when nothing was detected.
    pub plateau_depth: Option<f64>,
}

/// Scans a trace for plateaus: maximal runs of consecutive sweeps whose
/// relative fit improvement `(f_k - f_{k+1}) / f_k` stays below `flat_tol`
/// while both fit errors sit above the trace's fit tolerance. A run
/// qualifies as a swamp when its sweep span `end - start` reaches `window`.
pub fn detect_swamp(trace: &IterationTrace, window: usize, flat_tol: f64) -> Result<SwampReport> {
    if window == 0 {
        return Err(Error::argument("window must be at least 1"));
    }
    if !flat_tol.is_finite() || flat_tol < 0.0 {
        return Err(Error::argument(format!(
            "flat_tol must be finite and >= 0, got {flat_tol}"
        )));
    }

    let rows = &trace.rows;
    let flat = |i: usize| -> bool {
        let (f0, f1) = (rows[i].fit_error, rows[i + 1].fit_error);
        f0 > trace.fit_tol && f1 > trace.fit_tol && (f0 - f1) / f0 < flat_tol
    };

    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    let n_pairs = rows.len().saturating_sub(1);
    for i in 0..=n_pairs {
        let is_flat = i < n_pairs && flat(i);
        match (run_start, is_flat) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                // Pairs s..i are flat, covering sweeps rows[s] ..= rows[i].
                let (start, end) = (rows[s].iter, rows[i].iter);
                if end - start >= window {
                    intervals.push((start, end));
                }
                run_start = None;
            }
            _ => {}
        }
    }

    let plateau_depth = intervals
        .iter()
        .max_by_key(|(s, e)| (e - s, usize::MAX - s))
        .map(|&(start, end)| {
            rows.iter()
                .filter(|r| (start..=end).contains(&r.iter))
                .map(|r| r.fit_error)
                .fold(f64::INFINITY, f64::min)
        });

    Ok(SwampReport {
        detected: !intervals.is_empty(),
        intervals,
        plateau_depth,
    })
}

fn trace_header(n_modes: usize) -> String {
    let mut header = String::from("iter,fit_error,lambda");
    for n in 1..=n_modes {
        let _ = write!(header, ",sigma_min_mode{n}");
    }
    for n in 1..=n_modes {
        let _ = write!(header, ",delta_mode{n}");
    }
    header
}

/// Writes a trace as CSV: one row per sweep under the header
/// `iter,fit_error,lambda,sigma_min_mode1,...,delta_mode1,...`.
/// Floats carry 17 significant digits, so a read-back is exact.
pub fn export_trace_csv(trace: &IterationTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = trace_header(trace.n_modes);
    out.push('\n');
    for row in &trace.rows {
        let _ = write!(out, "{},{},{}", row.iter, fmt_f64(row.fit_error), fmt_f64(row.lambda));
        for v in row.sigma_min.iter().chain(&row.delta) {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a CSV written by [`export_trace_csv`].
///
/// The file does not store the run's fit tolerance, so the result carries
/// `fit_tol = 0.0`; swamp detection on a read-back trace therefore treats
/// every positive fit level as above tolerance.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<IterationTrace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file; expected trace header"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols.len() % 2 == 0 || cols[..3] != ["iter", "fit_error", "lambda"] {
        return Err(Error::parse(path, 1, format!("unrecognized header {header:?}")));
    }
    let n_modes = (cols.len() - 3) / 2;
    for n in 1..=n_modes {
        if cols[2 + n] != format!("sigma_min_mode{n}")
            || cols[2 + n_modes + n] != format!("delta_mode{n}")
        {
            return Err(Error::parse(path, 1, format!("unrecognized header {header:?}")));
        }
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let iter: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("invalid iter {:?}", fields[0])))?;
        let mut nums = Vec::with_capacity(fields.len() - 1);
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("invalid value {f:?}")))?;
            nums.push(v);
        }
        rows.push(TraceRow {
            iter,
            fit_error: nums[0],
            lambda: nums[1],
            sigma_min: nums[2..2 + n_modes].to_vec(),
            delta: nums[2 + n_modes..].to_vec(),
        });
    }
    Ok(IterationTrace {
        n_modes,
        fit_tol: 0.0,
        rows,
    })
}

/// Order statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl Stats {
    /// `None` on an empty sample.
    pub fn from_values(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Some(Stats {
            min: sorted[0],
            median,
            mean: sorted.iter().sum::<f64>() / n as f64,
            max: sorted[n - 1],
        })
    }
}

/// Aggregate results of one method across all seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub runs: usize,
    pub converged: usize,
    /// Runs whose trace contained at least one detected swamp interval.
    pub swamped: usize,
    /// Sweep counts of the converged runs; `None` when none converged.
    pub iterations: Option<Stats>,
    /// Final fit errors across all runs.
    pub final_fit: Stats,
    /// Relative fit change `|f_k - f_{k-1}| / (1 + f_{k-1})` at each run's
    /// last sweep, across all runs.
    pub final_rel_change: Stats,
}

impl MethodSummary {
    /// Fraction of seeds that reached the fit tolerance.
    pub fn convergence_rate(&self) -> f64 {
        self.converged as f64 / self.runs as f64
    }
}

/// Results of [`compare_methods`]: one summary per method, plus the
/// per-run reports in `(method, seed)` order for callers that need detail.
#[derive(Debug, Clone)]
pub struct ComparisonSummary {
    pub rank: usize,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodSummary>,
    /// Reports indexed as `method_index * seeds.len() + seed_index`.
    pub reports: Vec<SolveReport>,
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("CP_SWAMP_THREADS") {
        Ok(s) => {
            let n: usize = s.parse().map_err(|_| {
                Error::argument(format!("CP_SWAMP_THREADS must be a positive integer, got {s:?}"))
            })?;
            if n == 0 {
                return Err(Error::argument("CP_SWAMP_THREADS must be a positive integer"));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Runs every method on the same tensor from the same per-seed random
/// initial guesses and aggregates convergence, swamp, and fit statistics.
///
/// Each seed produces one initial factor set shared by all methods, so the
/// comparison isolates the update rule. Runs execute in parallel; the
/// `CP_SWAMP_THREADS` environment variable caps the worker count. Results
/// are aggregated in the given method and seed order, so repeated calls
/// with the same inputs are identical.
///
/// `config.init` must be `None`; swamp detection uses `window`/`flat_tol`
/// as in [`detect_swamp`].
pub fn compare_methods(
    t: &DenseTensor,
    rank: usize,
    methods: &[Method],
    seeds: &[u64],
    config: &SolverConfig,
    window: usize,
    flat_tol: f64,
) -> Result<ComparisonSummary> {
    if methods.is_empty() {
        return Err(Error::argument("compare_methods needs at least one method"));
    }
    if seeds.is_empty() {
        return Err(Error::argument("compare_methods needs at least one seed"));
    }
    if config.init.is_some() {
        return Err(Error::argument(
            "compare_methods generates per-seed initial guesses; config.init must be None",
        ));
    }

    let inits: Vec<_> = seeds
        .iter()
        .map(|&s| random_factors(t.dims(), rank, s))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..seeds.len()).map(move |s| (m, s)))
        .collect();
    let run_all = || -> Vec<Result<SolveReport>> {
        jobs.par_iter()
            .map(|&(mi, si)| {
                let mut cfg = config.clone();
                cfg.seed = seeds[si];
                cfg.init = Some(inits[si].clone());
                decompose(t, rank, methods[mi], &cfg)
            })
            .collect()
    };
    let results = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::argument(format!("CP_SWAMP_THREADS: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    let reports: Vec<SolveReport> = results.into_iter().collect::<Result<_>>()?;

    let mut summaries = Vec::with_capacity(methods.len());
    for (mi, &method) in methods.iter().enumerate() {
        let runs = &reports[mi * seeds.len()..(mi + 1) * seeds.len()];
        let mut converged_iters = Vec::new();
        let mut fits = Vec::with_capacity(runs.len());
        let mut rel_changes = Vec::with_capacity(runs.len());
        let mut swamped = 0;
        for r in runs {
            fits.push(r.fit_error);
            let rows = &r.trace.rows;
            let f_prev = if rows.len() >= 2 {
                rows[rows.len() - 2].fit_error
            } else {
                r.initial_fit_error
            };
            rel_changes.push((f_prev - r.fit_error).abs() / (1.0 + f_prev));
            if r.status == Status::ConvergedFit {
                converged_iters.push(r.iterations as f64);
            }
            if detect_swamp(&r.trace, window, flat_tol)?.detected {
                swamped += 1;
            }
        }
        summaries.push(MethodSummary {
            method,
            runs: runs.len(),
            converged: converged_iters.len(),
            swamped,
            iterations: Stats::from_values(&converged_iters),
            final_fit: Stats::from_values(&fits).expect("at least one seed"),
            final_rel_change: Stats::from_values(&rel_changes).expect("at least one seed"),
        });
    }

    Ok(ComparisonSummary {
        rank,
        seeds: seeds.to_vec(),
        methods: summaries,
        reports,
    })
}

impl fmt::Display for ComparisonSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "rank {} comparison over {} seed(s)",
            self.rank,
            self.seeds.len()
        )?;
        for m in &self.methods {
            write!(
                f,
                "{:<5} converged {}/{} (rate {:.2}) swamped {:>2}",
                m.method.to_string(),
                m.converged,
                m.runs,
                m.convergence_rate(),
                m.swamped
            )?;
            match &m.iterations {
                Some(s) => write!(
                    f,
                    "  iters min/med/mean/max {:.0}/{:.0}/{:.1}/{:.0}",
                    s.min, s.median, s.mean, s.max
                )?,
                None => write!(f, "  iters n/a")?,
            }
            writeln!(
                f,
                "  fit min/med/max {:.3e}/{:.3e}/{:.3e}  relchg med {:.3e}",
                m.final_fit.min, m.final_fit.median, m.final_fit.max, m.final_rel_change.median
            )?;
        }
        Ok(())
    }
}

/// Writes one CSV row per method:
/// `method,runs,converged,convergence_rate,swamped,` iteration stats (empty
/// when no run converged), final-fit stats, then final relative-change stats.
pub fn export_comparison_csv(summary: &ComparisonSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from(
        "method,runs,converged,convergence_rate,swamped,\
         iters_min,iters_median,iters_mean,iters_max,\
         fit_min,fit_median,fit_mean,fit_max,\
         rel_change_min,rel_change_median,rel_change_mean,rel_change_max\n",
    );
    for m in &summary.methods {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            m.method,
            m.runs,
            m.converged,
            fmt_f64(m.convergence_rate()),
            m.swamped
        );
        match &m.iterations {
            Some(s) => {
                let _ = write!(
                    out,
                    ",{},{},{},{}",
                    fmt_f64(s.min),
                    fmt_f64(s.median),
                    fmt_f64(s.mean),
                    fmt_f64(s.max)
                );
            }
            None => out.push_str(",,,,"),
        }
        for s in [&m.final_fit, &m.final_rel_change] {
            let _ = write!(
                out,
                ",{},{},{},{}",
                fmt_f64(s.min),
                fmt_f64(s.median),
                fmt_f64(s.mean),
                fmt_f64(s.max)
            );
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::from_rank_one_sum;

    fn trace_from_fits(fits: &[f64], fit_tol: f64) -> IterationTrace {
        IterationTrace {
            n_modes: 3,
            fit_tol,
            rows: fits
                .iter()
                .enumerate()
                .map(|(i, &f)| TraceRow {
                    iter: i + 1,
                    fit_error: f,
                    lambda: 0.0,
                    sigma_min: vec![1.0; 3],
                    delta: vec![0.0; 3],
                })
                .collect(),
        }
    }

    #[test]
    fn geometric_decay_is_not_a_swamp() {
        let fits: Vec<f64> = (0..300).map(|k| 0.9f64.powi(k)).collect();
        let trace = trace_from_fits(&fits, 1e-12);
        let report = detect_swamp(&trace, 50, 1e-4).unwrap();
        assert!(!report.detected);
        assert!(report.intervals.is_empty());
        assert_eq!(report.plateau_depth, None);
    }

    #[test]
    fn long_plateau_is_detected_with_its_depth() {
        // 200 flat sweeps at 1.0, then rapid convergence.
        let mut fits = vec![1.0; 200];
        fits.extend((1..=30).map(|k| 0.5f64.powi(k)));
        let trace = trace_from_fits(&fits, 1e-5);
        let report = detect_swamp(&trace, 50, 1e-4).unwrap();
        assert!(report.detected);
        assert_eq!(report.intervals, vec![(1, 200)]);
        assert_eq!(report.plateau_depth, Some(1.0));
    }

    #[test]
    fn window_is_a_span_threshold() {
        let mut fits = vec![1.0; 51];
        fits.push(1e-9);
        let trace = trace_from_fits(&fits, 1e-6);
        // Sweeps 1..=51 are flat: span 50.
        assert!(detect_swamp(&trace, 50, 1e-4).unwrap().detected);
        assert!(!detect_swamp(&trace, 51, 1e-4).unwrap().detected);
    }

    #[test]
    fn plateau_below_fit_tol_is_ignored() {
        // Flat, but already converged to the target: not a swamp.
        let fits = vec![1e-9; 300];
        let trace = trace_from_fits(&fits, 1e-5);
        assert!(!detect_swamp(&trace, 50, 1e-4).unwrap().detected);
    }

    #[test]
    fn detection_is_monotone_in_flat_tol() {
        // Slow geometric decay: flat at 1e-2 per sweep, not at 1e-3.
        let fits: Vec<f64> = (0..200).map(|k| (1.0 - 5e-3f64).powi(k)).collect();
        let trace = trace_from_fits(&fits, 1e-12);
        assert!(detect_swamp(&trace, 50, 1e-2).unwrap().detected);
        assert!(!detect_swamp(&trace, 50, 1e-3).unwrap().detected);
    }

    #[test]
    fn two_plateaus_report_two_intervals() {
        let mut fits = vec![2.0; 80];
        fits.extend((1..=40).map(|k| 2.0 * 0.7f64.powi(k)));
        let tail = *fits.last().unwrap();
        fits.extend(vec![tail; 70]);
        fits.extend((1..=20).map(|k| tail * 0.5f64.powi(k)));
        let trace = trace_from_fits(&fits, 1e-12);
        let report = detect_swamp(&trace, 50, 1e-4).unwrap();
        assert_eq!(report.intervals.len(), 2);
        assert_eq!(report.intervals[0].0, 1);
        // Depth comes from the longest (first) interval.
        assert_eq!(report.plateau_depth, Some(2.0));
    }

    #[test]
    fn detect_swamp_validates_arguments() {
        let trace = trace_from_fits(&[1.0, 1.0], 0.0);
        assert!(detect_swamp(&trace, 0, 1e-4).is_err());
        assert!(detect_swamp(&trace, 10, -1.0).is_err());
        assert!(detect_swamp(&trace, 10, f64::NAN).is_err());
    }

    #[test]
    fn empty_trace_yields_empty_report() {
        let trace = trace_from_fits(&[], 1e-5);
        let report = detect_swamp(&trace, 50, 1e-4).unwrap();
        assert!(!report.detected);
    }

    #[test]
    fn trace_csv_round_trip_is_exact() {
        let t = from_rank_one_sum(&random_factors(&[3, 3, 3], 2, 77).unwrap());
        let cfg = SolverConfig {
            max_iters: 12,
            fit_tol: 0.0,
            ..SolverConfig::default()
        };
        let report = decompose(&t, 2, Method::Rals, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        export_trace_csv(&report.trace, &path).unwrap();
        let back = read_trace_csv(&path).unwrap();
        assert_eq!(back.n_modes, 3);
        assert_eq!(back.rows, report.trace.rows);
    }

    #[test]
    fn trace_csv_header_only_for_empty_trace() {
        let trace = IterationTrace {
            n_modes: 4,
            fit_tol: 1e-5,
            rows: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        export_trace_csv(&trace, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "iter,fit_error,lambda,sigma_min_mode1,sigma_min_mode2,sigma_min_mode3,sigma_min_mode4,delta_mode1,delta_mode2,delta_mode3,delta_mode4\n"
        );
        let back = read_trace_csv(&path).unwrap();
        assert_eq!(back.n_modes, 4);
        assert!(back.rows.is_empty());
    }

    #[test]
    fn trace_csv_rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "iter,fit_error\n").unwrap();
        assert!(matches!(
            read_trace_csv(&path),
            Err(Error::Parse { line: 1, .. })
        ));
        std::fs::write(
            &path,
            "iter,fit_error,lambda,sigma_min_mode1,delta_mode1\n1,0.5,0.1,2.0\n",
        )
        .unwrap();
        assert!(matches!(
            read_trace_csv(&path),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn stats_order_statistics() {
        let s = Stats::from_values(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.min, s.median, s.mean, s.max), (1.0, 2.0, 2.0, 3.0));
        let s = Stats::from_values(&[4.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert!(Stats::from_values(&[]).is_none());
    }

    #[test]
    fn swamp_interval_sigma_sits_below_the_tail() {
        // The plateau correlates with near-singular least-squares systems:
        // inside every detected interval the mode-1 system's smallest
        // singular value dips below anything seen after the last plateau.
        let p = crate::problems::example3();
        let cfg = SolverConfig {
            init: Some(p.init.clone()),
            ..SolverConfig::default()
        };
        let report = decompose(&p.tensor, p.rank, Method::Als, &cfg).unwrap();
        let swamp = detect_swamp(&report.trace, 50, 1e-4).unwrap();
        assert!(swamp.detected);
        let last_end = swamp.intervals.last().unwrap().1;
        let tail_min = report
            .trace
            .rows
            .iter()
            .filter(|r| r.iter > last_end)
            .map(|r| r.sigma_min[0])
            .fold(f64::INFINITY, f64::min);
        assert!(tail_min.is_finite(), "run must continue past the swamp");
        for &(s, e) in &swamp.intervals {
            let interval_min = report
                .trace
                .rows
                .iter()
                .filter(|r| (s..=e).contains(&r.iter))
                .map(|r| r.sigma_min[0])
                .fold(f64::INFINITY, f64::min);
            assert!(
                interval_min <= tail_min,
                "interval ({s},{e}) min {interval_min} vs tail min {tail_min}"
            );
        }
    }

    #[test]
    fn compare_methods_is_deterministic_and_fair() {
        let t = from_rank_one_sum(&random_factors(&[4, 3, 3], 2, 123).unwrap());
        let cfg = SolverConfig {
            max_iters: 400,
            fit_tol: 1e-6,
            ..SolverConfig::default()
        };
        let methods = [Method::Als, Method::Rals];
        let seeds = [0u64, 1, 2, 3];
        let a = compare_methods(&t, 2, &methods, &seeds, &cfg, 50, 1e-4).unwrap();
        let b = compare_methods(&t, 2, &methods, &seeds, &cfg, 50, 1e-4).unwrap();
        assert_eq!(a.methods, b.methods);
        for (ra, rb) in a.reports.iter().zip(&b.reports) {
            assert_eq!(ra.fit_error.to_bits(), rb.fit_error.to_bits());
            assert_eq!(ra.iterations, rb.iterations);
        }
        // Both methods start each seed from the same guess.
        for si in 0..seeds.len() {
            assert_eq!(
                a.reports[si].initial_fit_error.to_bits(),
                a.reports[seeds.len() + si].initial_fit_error.to_bits()
            );
        }
        assert_eq!(a.methods[0].runs, 4);
    }

    #[test]
    fn compare_methods_rejects_explicit_init_and_empty_inputs() {
        let t = from_rank_one_sum(&random_factors(&[3, 3, 3], 2, 5).unwrap());
        let mut cfg = SolverConfig::default();
        assert!(compare_methods(&t, 2, &[], &[0], &cfg, 50, 1e-4).is_err());
        assert!(compare_methods(&t, 2, &[Method::Als], &[], &cfg, 50, 1e-4).is_err());
        cfg.init = Some(random_factors(&[3, 3, 3], 2, 0).unwrap());
        assert!(compare_methods(&t, 2, &[Method::Als], &[0], &cfg, 50, 1e-4).is_err());
    }

    #[test]
    fn comparison_csv_has_one_row_per_method() {
        let t = from_rank_one_sum(&random_factors(&[3, 3, 3], 2, 9).unwrap());
        let cfg = SolverConfig {
            max_iters: 200,
            fit_tol: 1e-6,
            ..SolverConfig::default()
        };
        let summary =
            compare_methods(&t, 2, &[Method::Als, Method::Rals], &[0, 1], &cfg, 50, 1e-4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cmp.csv");
        export_comparison_csv(&summary, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("method,runs,converged,convergence_rate,swamped"));
        assert!(lines[0].ends_with("rel_change_max"));
        assert_eq!(lines[0].split(',').count(), 17);
        assert!(lines[1].starts_with("als,2,"));
        assert!(lines[2].starts_with("rals,2,"));
        assert_eq!(lines[1].split(',').count(), 17);
        let display = summary.to_string();
        assert!(display.contains("als"));
        assert!(display.contains("rals"));
        assert!(display.contains("rate"));
    }
}
