//! Archive-less Novelty Search on the spiral under the four combinations of
//! distance (Euclidean, geodesic) and genotype (angle, arc length).
//!
//! ```text
//! cargo run --release --example spiral_metric_bias -- [runs]
//! ```

use qd_suite::analysis::aggregate;
use qd_suite::harness::{preset, run_in_memory};

fn main() -> qd_suite::Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    println!("{:<28} {:>6} {:>14}", "setting", "union", "mean final");
    for mut cfg in preset("fig2")? {
        cfg.seeds.truncate(runs);
        let (_, results) = run_in_memory(&cfg, false)?;
        let agg = aggregate(&results)?;
        let mean_final = agg.final_coverage.iter().sum::<f64>() / agg.runs as f64;
        println!(
            "{:<28} {:>6.2} {:>14.3}",
            cfg.name.trim_start_matches("fig2-"),
            agg.final_union_coverage(),
            mean_final
        );
    }
    Ok(())
}
