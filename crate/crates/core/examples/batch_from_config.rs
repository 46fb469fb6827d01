//! Writes a configuration document, runs it as a batch, and reads the
//! aggregate back from disk.

use qd_suite::harness::{load_config, run_batch};

const CONFIG: &str = r#"{
    "name": "ssf-order2",
    "env": {"name": "ssf", "order": 2},
    "algorithm": {"kind": "ns", "sigma": 20, "archive": {"kind": "unstructured", "max_size": 200}},
    "seeds": {"base": 100, "runs": 4},
    "g_max": 300
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("qd-suite-example");
    std::fs::create_dir_all(&out)?;
    let path = out.join("ssf-order2.json");
    std::fs::write(&path, CONFIG)?;

    let mut cfg = load_config(&path)?;
    cfg.output_dir = out.clone();
    let summary = run_batch(&cfg)?;
    println!(
        "{} runs, final coverage {:.3} +/- {:.3}, union {:.3}",
        summary.runs, summary.final_coverage_mean, summary.final_coverage_std, summary.final_union_coverage
    );
    if let Some(reports) = &summary.stall_reports {
        for r in reports {
            println!("  last plateau {}, {} generations on it", r.last_plateau, r.generations_on_plateau);
        }
    }
    let agg = std::fs::read_to_string(summary.directory.join("aggregate.csv"))?;
    println!("aggregate.csv tail:");
    for line in agg.lines().rev().take(3).collect::<Vec<_>>().into_iter().rev() {
        println!("  {line}");
    }
    println!("results in {}", summary.directory.display());
    Ok(())
}
