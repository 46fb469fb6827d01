//! Novelty Search started at the saddle of the two-component mixture: the
//! steep narrow mode attracts the search, so the behaviors above M1, which
//! only the wide mode produces, are rarely reached.

use qd_suite::algorithms::{run, AlgorithmConfig, ArchiveConfig, NsConfig, RunOptions};
use qd_suite::analysis::CoverageSpec;
use qd_suite::environments::{DeceptiveEnv, DeceptiveParams, Environment};

fn main() -> qd_suite::Result<()> {
    let env = DeceptiveEnv::new(DeceptiveParams::default(), false)?;
    let (m1, m2) = env.reachable_interval();
    let x = env.saddle();
    println!("M1 = {m1:.4e}, M2 = {m2:.4e}, saddle = ({:.2}, {:.2})", x[0], x[1]);
    println!("[M1, M2] is {:.0}% of the reachable interval", 100.0 * (m2 - m1) / m2);

    let options = RunOptions::new(CoverageSpec::for_env(&env, 100)?);
    for pct in [3.0, 5.0, 10.0] {
        let mut ns = NsConfig::new(pct / 100.0 * env.sigma2());
        ns.archive = ArchiveConfig::Unstructured { max_size: Some(200) };
        let algo = AlgorithmConfig::Ns(ns);
        let runs = 20;
        let mut above = 0;
        let mut final_above = 0;
        for seed in 0..runs {
            let r = run(&env, &algo, seed, 300, &options)?;
            above += usize::from(r.max_behavior_reached() > m1);
            final_above += r
                .final_population
                .iter()
                .filter(|i| env.coverage_value(&i.behavior) > m1)
                .count();
        }
        println!(
            "sigma {pct:>4}% of sigma2: {above}/{runs} runs ever exceed M1, {final_above} final individuals above M1"
        );
    }
    Ok(())
}
