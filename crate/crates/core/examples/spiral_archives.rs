//! Euclidean metric with the angle genotype: how far do bounded, unbounded
//! and grid archives (with or without archive resampling) get toward the
//! center of the spiral?

use qd_suite::harness::{preset, run_in_memory};

fn main() -> qd_suite::Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    println!("{:<32} {:>12} {:>10} {:>12}", "archive", "median final", "full runs", "innermost s");
    for mut cfg in preset("fig3")? {
        cfg.seeds.truncate(runs);
        let (_, results) = run_in_memory(&cfg, false)?;
        let mut finals: Vec<f64> = results.iter().map(|r| r.final_coverage()).collect();
        finals.sort_by(f64::total_cmp);
        let full = finals.iter().filter(|&&c| c >= 1.0).count();
        let innermost = results
            .iter()
            .flat_map(|r| r.final_archive.iter().chain(&r.final_population))
            .filter_map(|i| i.behavior.curve.map(|c| c.s))
            .fold(f64::INFINITY, f64::min);
        println!(
            "{:<32} {:>12.2} {:>7}/{:<2} {:>12.2}",
            cfg.name.trim_start_matches("fig3-"),
            finals[finals.len() / 2],
            full,
            runs,
            innermost
        );
    }
    Ok(())
}
