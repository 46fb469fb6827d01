//! Self-similar staircase: band radii, then Novelty Search with two fixed
//! mutation scales stalling on successive plateaus.

use qd_suite::algorithms::{run, AlgorithmConfig, ArchiveConfig, NsConfig, RunOptions};
use qd_suite::analysis::{ssf_progress, CoverageSpec, DEFAULT_STALL_THRESHOLD};
use qd_suite::environments::{SsfEnv, SsfOutput};

fn main() -> qd_suite::Result<()> {
    let env = SsfEnv::new(1, 16, SsfOutput::RadialScalar)?;
    let radii: Vec<String> = (0..14).map(|i| format!("{}", env.radius(i))).collect();
    println!("R = {}", radii.join(", "));

    let options = RunOptions::new(CoverageSpec::for_env(&env, 100)?);
    for sigma in [20.0, 50.0] {
        let mut ns = NsConfig::new(sigma);
        ns.archive = ArchiveConfig::Unstructured { max_size: Some(200) };
        let algo = AlgorithmConfig::Ns(ns);
        print!("sigma {sigma:>4}: last plateau per seed");
        for seed in 0..8 {
            let r = run(&env, &algo, seed, 1000, &options)?;
            let report = ssf_progress(&r.plateau_trace(), DEFAULT_STALL_THRESHOLD).expect("non-empty trace");
            print!(
                " {}{}",
                report.last_plateau,
                if report.stalled { "" } else { "*" }
            );
        }
        println!("   (* = still moving in the last {DEFAULT_STALL_THRESHOLD} generations)");
    }
    Ok(())
}
