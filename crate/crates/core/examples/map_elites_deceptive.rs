//! MAP-Elites on the deceptive mixture: grid occupancy over generations and
//! the final distribution of behaviors.

use qd_suite::algorithms::{run, AlgorithmConfig, MapElitesConfig, RunOptions};
use qd_suite::analysis::CoverageSpec;
use qd_suite::environments::{DeceptiveEnv, DeceptiveParams};

fn main() -> qd_suite::Result<()> {
    let env = DeceptiveEnv::new(DeceptiveParams::default(), false)?;
    let (m1, m2) = env.reachable_interval();
    let spec = CoverageSpec::for_env(&env, 20)?;
    let options = RunOptions::new(spec.clone());
    let algo = AlgorithmConfig::MapElites(MapElitesConfig::new(0.05 * env.sigma2()));
    let r = run(&env, &algo, 1, 200, &options)?;

    for g in [0, 1, 2, 5, 10, 20, 50, 200] {
        let rec = &r.records[g];
        println!("gen {g:>3}: {:>3} cells, coverage {:.2}", rec.archive_size, rec.coverage);
    }
    println!("\nfinal histogram over [0, M2] (| marks M1):");
    let m1_bin = spec.bin(m1);
    for (bin, count) in r.final_histogram.iter().enumerate() {
        let mark = if bin == m1_bin { '|' } else { ' ' };
        println!("{mark} {:.2e} {}", spec.edge(bin), "#".repeat(*count));
    }
    println!("M2 = {m2:.2e}");
    Ok(())
}
