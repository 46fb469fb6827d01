//! Batch orchestration and result files.
//!
//! Layout of a batch directory:
//!
//! ```text
//! <out>/<experiment>/
//!     aggregate.csv   generation,coverage_mean,coverage_std,union_coverage
//!     aggregate.json
//!     seed_<seed>/
//!         manifest.json
//!         series.csv
//!         final_archive.csv
//!         final_population.csv
//!         coverage_bins.csv
//! ```

pub mod config;
pub mod presets;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    load_config, load_config_with, parse_config, AnalysisSpec, DerivedConstants, EnvSpec, ExperimentConfig,
    Overrides,
};
pub use presets::{preset, PRESET_NAMES};

use crate::algorithms::{run, GenerationRecord, RunOptions, RunResult};
use crate::analysis::{aggregate, ssf_progress, Aggregate, StallReport};
use crate::environments::{Env, Environment};
use crate::error::{QdError, Result};
use crate::rng::GENERATOR_NAME;
use crate::types::Individual;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PARTIAL_MARKER: &str = "PARTIAL";

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub generator: String,
    pub seed: u64,
    /// Resolved configuration restricted to this run's seed; loadable as a
    /// configuration document.
    pub config: ExperimentConfig,
    pub derived: DerivedConstants,
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig, env: &Env, seed: u64) -> Result<Self> {
        let mut config = cfg.clone();
        config.seeds = vec![seed];
        Ok(Self {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            generator: GENERATOR_NAME.to_string(),
            seed,
            config,
            derived: DerivedConstants::of(env, cfg.coverage_spec(env)?),
        })
    }
}

/// Runs one seed of an experiment.
pub fn run_one(cfg: &ExperimentConfig, env: &Env, seed: u64, check_invariants: bool) -> Result<RunResult> {
    let mut options = RunOptions::new(cfg.coverage_spec(env)?);
    options.archive_only_coverage = cfg.analysis.archive_only;
    options.check_invariants = check_invariants;
    run(env, &cfg.algorithm, seed, cfg.g_max, &options)
}

/// Runs every seed of `cfg` in parallel without touching the filesystem.
/// Results come back in seed order.
pub fn run_in_memory(cfg: &ExperimentConfig, check_invariants: bool) -> Result<(Env, Vec<RunResult>)> {
    let env = cfg.validate()?;
    let results = cfg
        .seeds
        .par_iter()
        .map(|&seed| run_one(cfg, &env, seed, check_invariants))
        .collect::<Result<Vec<_>>>()?;
    Ok((env, results))
}

/// Summary of an executed batch.
#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub name: String,
    pub directory: PathBuf,
    pub runs: usize,
    pub final_union_coverage: f64,
    pub final_coverage_mean: f64,
    pub final_coverage_std: f64,
    pub mean_coverage_over_time: f64,
    pub run_final_coverage: Vec<f64>,
    pub run_max_behavior: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs_exceeding_m1: Option<usize>,
    /// Share of the final histogram mass strictly above M1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram_mass_above_m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stall_reports: Option<Vec<StallReport>>,
    pub final_histogram: Vec<usize>,
}

impl BatchSummary {
    pub fn build(cfg: &ExperimentConfig, env: &Env, dir: &Path, agg: &Aggregate, results: &[RunResult]) -> Result<Self> {
        let finals = &agg.final_coverage;
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let std = (finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        let (m1, m2) = match env {
            Env::Deceptive(e) => {
                let (m1, m2) = e.reachable_interval();
                (Some(m1), Some(m2))
            }
            _ => (None, None),
        };
        let mass_above = m1.map(|m1| {
            let total: usize = agg.final_histogram.iter().sum();
            let above: usize = results
                .iter()
                .flat_map(|r| r.final_population.iter().chain(&r.final_archive))
                .filter(|i| env.coverage_value(&i.behavior) > m1)
                .count();
            if total == 0 {
                0.0
            } else {
                above as f64 / total as f64
            }
        });
        let stall_reports = matches!(env, Env::Ssf(_)).then(|| {
            results
                .iter()
                .filter_map(|r| ssf_progress(&r.plateau_trace(), cfg.analysis.stall_threshold))
                .collect()
        });
        Ok(Self {
            name: cfg.name.clone(),
            directory: dir.to_path_buf(),
            runs: agg.runs,
            final_union_coverage: agg.final_union_coverage(),
            final_coverage_mean: mean,
            final_coverage_std: std,
            mean_coverage_over_time: agg.mean_coverage_over_time(),
            run_final_coverage: finals.clone(),
            run_max_behavior: agg.run_max_behavior.clone(),
            m1,
            m2_total: m2,
            runs_exceeding_m1: m1.map(|m| agg.runs_exceeding(m)),
            histogram_mass_above_m1: mass_above,
            stall_reports,
            final_histogram: agg.final_histogram.clone(),
        })
    }
}

/// Executes every seed of `cfg`, writes per-run files and the batch
/// aggregate under `cfg.output_dir/cfg.name`.
///
/// On failure a `PARTIAL` marker is left in the batch directory.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<BatchSummary> {
    let env = cfg.validate()?;
    let dir = cfg.output_dir.join(&cfg.name);
    fs::create_dir_all(&dir).map_err(|e| QdError::io(&dir, e))?;
    let marker = dir.join(PARTIAL_MARKER);
    let _ = fs::remove_file(&marker);

    let outcome = execute(cfg, &env, &dir);
    if outcome.is_err() {
        let _ = fs::write(&marker, "batch did not complete\n");
    }
    outcome
}

fn execute(cfg: &ExperimentConfig, env: &Env, dir: &Path) -> Result<BatchSummary> {
    let work = || -> Result<Vec<RunResult>> {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let result = run_one(cfg, env, seed, false)?;
                write_run(&dir.join(format!("seed_{seed}")), &RunManifest::new(cfg, env, seed)?, env, &result)?;
                Ok(result)
            })
            .collect()
    };
    let results = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| QdError::usage(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let agg = aggregate(&results)?;
    let summary = BatchSummary::build(cfg, env, dir, &agg, &results)?;
    write_aggregate(dir, &agg, &summary)?;
    Ok(summary)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| QdError::io(path, e))
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const SERIES_HEADER: &str =
    "generation,coverage,max_behavior,plateau_index,archive_size,population_novelty_mean";

pub fn series_csv(records: &[GenerationRecord]) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.generation,
            r.coverage,
            r.max_behavior,
            opt(r.plateau_index),
            r.archive_size,
            opt(r.population_novelty_mean)
        );
    }
    out
}

/// `id,born_at,g0..,b0..` plus `angle_t,arc_length_s` for spiral behaviors.
pub fn individuals_csv<E: Environment + ?Sized>(env: &E, individuals: &[Individual]) -> String {
    let mut cols = vec!["id".to_string(), "born_at".to_string()];
    cols.extend((0..env.genotype_dim()).map(|i| format!("g{i}")));
    cols.extend((0..env.behavior_dim()).map(|i| format!("b{i}")));
    let spiral = env.name() == "spiral";
    if spiral {
        cols.extend(["angle_t".to_string(), "arc_length_s".to_string()]);
    }
    let mut out = cols.join(",");
    out.push('\n');
    for ind in individuals {
        let mut row = vec![ind.id.to_string(), ind.born_at.to_string()];
        row.extend(ind.genotype.0.iter().map(f64::to_string));
        row.extend(ind.behavior.values.iter().map(f64::to_string));
        if spiral {
            let c = ind.behavior.curve;
            row.push(opt(c.map(|c| c.t)));
            row.push(opt(c.map(|c| c.s)));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn coverage_bins_csv(result: &RunResult) -> String {
    let mut out = String::from("bin,lower_edge,first_visit,final_count\n");
    for (bin, (first, count)) in result.bin_first_visit.iter().zip(&result.final_histogram).enumerate() {
        let _ = writeln!(out, "{bin},{},{},{count}", result.coverage.edge(bin), opt(*first));
    }
    out
}

pub fn write_run(dir: &Path, manifest: &RunManifest, env: &Env, result: &RunResult) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| QdError::io(dir, e))?;
    let manifest_text = serde_json::to_string_pretty(manifest).map_err(|e| QdError::usage(e.to_string()))?;
    write_file(&dir.join("manifest.json"), &(manifest_text + "\n"))?;
    write_file(&dir.join("series.csv"), &series_csv(&result.records))?;
    write_file(&dir.join("final_archive.csv"), &individuals_csv(env, &result.final_archive))?;
    write_file(&dir.join("final_population.csv"), &individuals_csv(env, &result.final_population))?;
    write_file(&dir.join("coverage_bins.csv"), &coverage_bins_csv(result))?;
    Ok(())
}

fn write_aggregate(dir: &Path, agg: &Aggregate, summary: &BatchSummary) -> Result<()> {
    let mut csv = String::from("generation,coverage_mean,coverage_std,union_coverage\n");
    for r in &agg.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.generation, r.coverage_mean, r.coverage_std, r.union_coverage
        );
    }
    write_file(&dir.join("aggregate.csv"), &csv)?;
    let mut json = serde_json::to_value(summary).map_err(|e| QdError::usage(e.to_string()))?;
    if let Some(obj) = json.as_object_mut() {
        obj.remove("directory");
    }
    let text = serde_json::to_string_pretty(&json).map_err(|e| QdError::usage(e.to_string()))?;
    write_file(&dir.join("aggregate.json"), &(text + "\n"))
}

// ---- reading results back ------------------------------------------------

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| QdError::io(path, e))
}

fn parse_field<T: std::str::FromStr>(s: &str, path: &Path) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| QdError::Parse(format!("{}: bad value `{s}`", path.display())))
}

fn required<T>(v: Option<T>, path: &Path) -> Result<T> {
    v.ok_or_else(|| QdError::Parse(format!("{}: missing value", path.display())))
}

/// Reads the series of a run directory.
pub fn read_series(path: &Path) -> Result<Vec<GenerationRecord>> {
    let text = read(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(SERIES_HEADER) {
        return Err(QdError::Parse(format!("{}: unexpected header", path.display())));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(QdError::Parse(format!("{}: bad row `{line}`", path.display())));
            }
            Ok(GenerationRecord {
                generation: required(parse_field(f[0], path)?, path)?,
                coverage: required(parse_field(f[1], path)?, path)?,
                max_behavior: required(parse_field(f[2], path)?, path)?,
                plateau_index: parse_field(f[3], path)?,
                archive_size: required(parse_field(f[4], path)?, path)?,
                population_novelty_mean: parse_field(f[5], path)?,
            })
        })
        .collect()
}

/// Rebuilds a [`RunResult`] (without individual snapshots) from a run directory.
pub fn load_run_dir(dir: &Path) -> Result<(RunManifest, RunResult)> {
    let manifest_path = dir.join("manifest.json");
    let manifest: RunManifest =
        serde_json::from_str(&read(&manifest_path)?).map_err(|e| QdError::Parse(e.to_string()))?;
    let records = read_series(&dir.join("series.csv"))?;
    let bins_path = dir.join("coverage_bins.csv");
    let mut first = Vec::new();
    let mut hist = Vec::new();
    for line in read(&bins_path)?.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(QdError::Parse(format!("{}: bad row `{line}`", bins_path.display())));
        }
        first.push(parse_field::<usize>(f[2], &bins_path)?);
        hist.push(required(parse_field::<usize>(f[3], &bins_path)?, &bins_path)?);
    }
    let env_name = match manifest.config.env {
        EnvSpec::Spiral { .. } => "spiral",
        EnvSpec::Ssf { .. } => "ssf",
        EnvSpec::Deceptive { .. } => "deceptive",
    };
    let result = RunResult {
        seed: manifest.seed,
        env_name: env_name.to_string(),
        algorithm: manifest.config.algorithm.clone(),
        coverage: manifest.derived.coverage.clone(),
        records,
        final_population: Vec::new(),
        final_archive: Vec::new(),
        bin_first_visit: first,
        final_histogram: hist,
    };
    Ok((manifest, result))
}

/// Recomputes `aggregate.csv`/`aggregate.json` for every batch under `root`
/// (a batch directory, or a directory of batch directories).
pub fn aggregate_dir(root: &Path) -> Result<Vec<PathBuf>> {
    let done = aggregate_tree(root)?;
    if done.is_empty() {
        return Err(QdError::usage(format!("no run directories under {}", root.display())));
    }
    Ok(done)
}

fn aggregate_tree(root: &Path) -> Result<Vec<PathBuf>> {
    let mut done = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| QdError::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();
    let runs: Vec<&PathBuf> = entries
        .iter()
        .filter(|p| p.join("manifest.json").is_file())
        .collect();
    if !runs.is_empty() {
        let mut loaded = runs.iter().map(|p| load_run_dir(p)).collect::<Result<Vec<_>>>()?;
        loaded.sort_by_key(|(m, _)| m.seed);
        let cfg = loaded[0].0.config.clone();
        let env = cfg.env.build()?;
        let results: Vec<RunResult> = loaded.into_iter().map(|(_, r)| r).collect();
        let agg = aggregate(&results)?;
        let mut summary = BatchSummary::build(&cfg, &env, root, &agg, &results)?;
        // individual snapshots are not reloaded
        summary.histogram_mass_above_m1 = None;
        summary.stall_reports = matches!(env, Env::Ssf(_)).then(|| {
            results
                .iter()
                .filter_map(|r| ssf_progress(&r.plateau_trace(), cfg.analysis.stall_threshold))
                .collect()
        });
        write_aggregate(root, &agg, &summary)?;
        done.push(root.to_path_buf());
    } else {
        for sub in &entries {
            done.extend(aggregate_tree(sub)?);
        }
    }
    Ok(done)
}
