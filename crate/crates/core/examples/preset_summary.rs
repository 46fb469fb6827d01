//! Runs a named preset in memory and prints one summary line per
//! sub-experiment.
//!
//! ```text
//! cargo run --release --example preset_summary -- fig5 [runs]
//! ```

use std::path::Path;

use qd_suite::analysis::aggregate;
use qd_suite::harness::{preset, BatchSummary};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn main() -> qd_suite::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig2".to_string());
    let runs: Option<usize> = args.next().and_then(|s| s.parse().ok());
    for mut cfg in preset(&name)? {
        if let Some(n) = runs {
            cfg.seeds.truncate(n);
        }
        let started = std::time::Instant::now();
        let (env, results) = qd_suite::harness::run_in_memory(&cfg, false)?;
        let agg = aggregate(&results)?;
        let s = BatchSummary::build(&cfg, &env, Path::new("."), &agg, &results)?;
        let full = s.run_final_coverage.iter().filter(|&&c| c >= 1.0).count();
        print!(
            "{:<34} union {:.3}  median final {:.3}  full {:>2}/{}  mean-over-time {:.3}",
            s.name,
            s.final_union_coverage,
            median(s.run_final_coverage.clone()),
            full,
            s.runs,
            s.mean_coverage_over_time,
        );
        if let (Some(exceed), Some(mass)) = (s.runs_exceeding_m1, s.histogram_mass_above_m1) {
            print!("  above M1 {exceed}/{}  mass {mass:.3}", s.runs);
        }
        if let Some(reports) = &s.stall_reports {
            let stalled = reports.iter().filter(|r| r.stalled).count();
            let plateau = median(reports.iter().map(|r| r.last_plateau as f64).collect());
            print!("  stalled {stalled}/{}  median plateau {plateau}", reports.len());
        }
        println!("  ({:.1}s)", started.elapsed().as_secs_f64());
    }
    Ok(())
}
