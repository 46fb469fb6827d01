//! Novelty Search variants and MAP-Elites, with a shared run loop that
//! records one analysis row per generation.

mod map_elites;
mod ns;

pub use map_elites::{map_elites_generation, MapElitesState};
pub use ns::{ns_generation, NoveltyEval, NsState};

use serde::{Deserialize, Serialize};

use crate::analysis::{behavior_histogram, CoverageSpec};
use crate::archives::{Archive, GridArchive, GridPolicy, GridSpec, UnstructuredArchive};
use crate::environments::{Environment, StartDistribution};
use crate::error::{QdError, Result};
use crate::metric::DistanceMetric;
use crate::rng::RandomSource;
use crate::types::{gaussian_mutate, Genotype, IdCounter, Individual};

/// Archive attached to a Novelty Search run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArchiveConfig {
    None,
    /// `max_size: None` is unbounded.
    Unstructured { max_size: Option<usize> },
    /// `grid: None` uses the environment's default grid.
    Grid {
        grid: Option<GridSpec>,
        #[serde(default)]
        policy: GridPolicy,
    },
}

/// Which individuals novelty is measured against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoveltyPool {
    #[default]
    PopulationOffspringArchive,
    PopulationOffspring,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsConfig {
    pub population_size: usize,
    pub offspring_size: usize,
    pub k: usize,
    pub metric: DistanceMetric,
    pub archive: ArchiveConfig,
    /// Draw parents from archive and population instead of the population only.
    pub resample_from_archive: bool,
    pub sigma: f64,
    pub novelty_pool: NoveltyPool,
    /// Most novel offspring added to an unstructured archive each generation.
    pub archive_add_most_novel: usize,
    /// Uniformly random offspring added to an unstructured archive each generation.
    pub archive_add_random: usize,
}

impl NsConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            population_size: 30,
            offspring_size: 30,
            k: 10,
            metric: DistanceMetric::Euclidean,
            archive: ArchiveConfig::None,
            resample_from_archive: false,
            sigma,
            novelty_pool: NoveltyPool::default(),
            archive_add_most_novel: 1,
            archive_add_random: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(QdError::config("algorithm.population_size", "must be >= 1"));
        }
        if self.k == 0 {
            return Err(QdError::config("algorithm.k", "must be >= 1"));
        }
        check_sigma(self.sigma)?;
        if let ArchiveConfig::Unstructured { max_size: Some(0) } = self.archive {
            return Err(QdError::config("algorithm.archive.max_size", "must be >= 1"));
        }
        if let ArchiveConfig::Grid { grid: Some(g), .. } = &self.archive {
            g.validate()
                .map_err(|e| QdError::config("algorithm.archive.grid", e.to_string()))?;
        }
        if self.resample_from_archive && self.archive == ArchiveConfig::None {
            return Err(QdError::config(
                "algorithm.resample_from_archive",
                "requires an archive",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapElitesConfig {
    pub grid: Option<GridSpec>,
    pub policy: GridPolicy,
    pub batch_size: usize,
    pub initial_batch: usize,
    pub sigma: f64,
}

impl MapElitesConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            grid: None,
            policy: GridPolicy::KeepFirst,
            batch_size: 30,
            initial_batch: 30,
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(QdError::config("algorithm.batch_size", "must be >= 1"));
        }
        if self.initial_batch == 0 {
            return Err(QdError::config("algorithm.initial_batch", "must be >= 1"));
        }
        check_sigma(self.sigma)?;
        if let Some(g) = &self.grid {
            g.validate()
                .map_err(|e| QdError::config("algorithm.grid", e.to_string()))?;
        }
        Ok(())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(QdError::config(
            "algorithm.sigma",
            format!("must be a positive number, got {sigma}"),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmConfig {
    Ns(NsConfig),
    MapElites(MapElitesConfig),
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmConfig::Ns(c) => c.validate(),
            AlgorithmConfig::MapElites(c) => c.validate(),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            AlgorithmConfig::Ns(c) => c.sigma,
            AlgorithmConfig::MapElites(c) => c.sigma,
        }
    }
}

/// Draws `count` evaluated individuals from the environment's start
/// distribution. Gaussian starts use `sigma` as spread and are clamped.
pub fn initialize_population<E: Environment + ?Sized>(
    env: &E,
    count: usize,
    sigma: f64,
    rng: &mut RandomSource,
    ids: &mut IdCounter,
) -> Result<Vec<Individual>> {
    (0..count)
        .map(|_| {
            let genotype = match env.start() {
                StartDistribution::Fixed(g) => g,
                StartDistribution::Gaussian { center } => {
                    gaussian_mutate(&center, sigma, rng, env.bounds())?
                }
            };
            make_individual(env, genotype, 0, ids)
        })
        .collect()
}

pub(crate) fn make_individual<E: Environment + ?Sized>(
    env: &E,
    genotype: Genotype,
    born_at: usize,
    ids: &mut IdCounter,
) -> Result<Individual> {
    let behavior = env.evaluate(&genotype)?;
    Ok(Individual {
        id: ids.next_id(),
        genotype,
        behavior,
        born_at,
    })
}

pub(crate) fn build_archive<E: Environment + ?Sized>(env: &E, cfg: &ArchiveConfig) -> Result<Archive> {
    Ok(match cfg {
        ArchiveConfig::None => Archive::None,
        ArchiveConfig::Unstructured { max_size } => {
            Archive::Unstructured(UnstructuredArchive::new(*max_size)?)
        }
        ArchiveConfig::Grid { grid, policy } => Archive::Grid(GridArchive::new(
            grid.clone().unwrap_or_else(|| env.default_grid()),
            *policy,
        )?),
    })
}

/// One row of a run's time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub coverage: f64,
    pub max_behavior: f64,
    pub plateau_index: Option<i64>,
    pub archive_size: usize,
    /// Mean novelty of the surviving population (Novelty Search only).
    pub population_novelty_mean: Option<f64>,
}

/// Everything a run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub env_name: String,
    pub algorithm: AlgorithmConfig,
    pub coverage: CoverageSpec,
    pub records: Vec<GenerationRecord>,
    pub final_population: Vec<Individual>,
    pub final_archive: Vec<Individual>,
    /// First generation at which each coverage bin was occupied.
    pub bin_first_visit: Vec<Option<usize>>,
    /// Histogram of the final population and archive.
    pub final_histogram: Vec<usize>,
}

impl RunResult {
    pub fn max_behavior_reached(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.max_behavior)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn plateau_trace(&self) -> Vec<i64> {
        self.records.iter().filter_map(|r| r.plateau_index).collect()
    }

    pub fn final_coverage(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.coverage)
    }
}

/// Run-level options that are not part of the algorithm itself.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub coverage: CoverageSpec,
    /// Count only archive members toward coverage.
    pub archive_only_coverage: bool,
    /// Assert population size, archive capacity and grid consistency after
    /// every generation; failures abort the run.
    pub check_invariants: bool,
    /// Hand observers the full novelty evaluation of every `n`-th
    /// generation (0: never). Recording clones the reference pool.
    pub record_novelty_every: usize,
}

impl RunOptions {
    pub fn new(coverage: CoverageSpec) -> Self {
        Self {
            coverage,
            archive_only_coverage: false,
            check_invariants: false,
            record_novelty_every: 0,
        }
    }
}

/// State visible to an observer at the end of a generation.
pub struct GenerationView<'a> {
    pub generation: usize,
    pub population: &'a [Individual],
    pub archive: &'a Archive,
    /// Novelty evaluation of this generation, when recorded.
    pub novelty: Option<&'a NoveltyEval>,
}

enum AlgoState {
    Ns(NsState),
    MapElites(MapElitesState),
}

impl AlgoState {
    fn population(&self) -> &[Individual] {
        match self {
            AlgoState::Ns(s) => &s.population,
            AlgoState::MapElites(s) => &s.last_batch,
        }
    }

    fn archive(&self) -> &Archive {
        match self {
            AlgoState::Ns(s) => &s.archive,
            AlgoState::MapElites(s) => &s.grid,
        }
    }
}

/// Runs generations `0..=g_max` and returns the full result.
pub fn run<E: Environment + ?Sized>(
    env: &E,
    algorithm: &AlgorithmConfig,
    seed: u64,
    g_max: usize,
    options: &RunOptions,
) -> Result<RunResult> {
    run_observed(env, algorithm, seed, g_max, options, |_| Ok(()))
}

/// [`run`] with a callback invoked after every generation, including 0.
pub fn run_observed<E, F>(
    env: &E,
    algorithm: &AlgorithmConfig,
    seed: u64,
    g_max: usize,
    options: &RunOptions,
    mut observer: F,
) -> Result<RunResult>
where
    E: Environment + ?Sized,
    F: FnMut(&GenerationView<'_>) -> Result<()>,
{
    algorithm.validate()?;
    let mut rng = RandomSource::new(seed);
    let mut state = match algorithm {
        AlgorithmConfig::Ns(cfg) => {
            let mut s = NsState::initialize(env, cfg, &mut rng)?;
            s.record_novelty_every = options.record_novelty_every;
            AlgoState::Ns(s)
        }
        AlgorithmConfig::MapElites(cfg) => AlgoState::MapElites(MapElitesState::initialize(env, cfg, &mut rng)?),
    };
    let spec = &options.coverage;
    let mut first_visit: Vec<Option<usize>> = vec![None; spec.bins];
    let mut records = Vec::with_capacity(g_max + 1);

    for generation in 0..=g_max {
        if generation > 0 {
            match (&mut state, algorithm) {
                (AlgoState::Ns(s), AlgorithmConfig::Ns(cfg)) => ns_generation(s, env, cfg, &mut rng)?,
                (AlgoState::MapElites(s), AlgorithmConfig::MapElites(cfg)) => {
                    map_elites_generation(s, env, cfg, &mut rng)?
                }
                _ => unreachable!("state matches configuration"),
            }
        }
        if options.check_invariants {
            check_invariants(&state, algorithm, generation)?;
        }
        records.push(record(env, &state, generation, options, &mut first_visit));
        let view = GenerationView {
            generation,
            population: state.population(),
            archive: state.archive(),
            novelty: match &state {
                AlgoState::Ns(s) => s.last_eval.as_ref(),
                AlgoState::MapElites(_) => None,
            },
        };
        observer(&view)?;
    }

    let final_population = state.population().to_vec();
    let final_archive: Vec<Individual> = state.archive().members().into_iter().cloned().collect();
    let final_histogram = behavior_histogram(
        final_population
            .iter()
            .chain(&final_archive)
            .map(|i| env.coverage_value(&i.behavior)),
        spec,
    );
    Ok(RunResult {
        seed,
        env_name: env.name().to_string(),
        algorithm: algorithm.clone(),
        coverage: spec.clone(),
        records,
        final_population,
        final_archive,
        bin_first_visit: first_visit,
        final_histogram,
    })
}

fn record<E: Environment + ?Sized>(
    env: &E,
    state: &AlgoState,
    generation: usize,
    options: &RunOptions,
    first_visit: &mut [Option<usize>],
) -> GenerationRecord {
    let spec = &options.coverage;
    let archive = state.archive().members();
    let population = state.population();
    let mut hit = vec![false; spec.bins];
    let counted = archive
        .iter()
        .copied()
        .chain(population.iter().filter(|_| !options.archive_only_coverage));
    for ind in counted {
        let bin = spec.bin(env.coverage_value(&ind.behavior));
        hit[bin] = true;
        first_visit[bin].get_or_insert(generation);
    }
    let max_behavior = archive
        .iter()
        .copied()
        .chain(population)
        .map(|i| env.coverage_value(&i.behavior))
        .fold(f64::NEG_INFINITY, f64::max);
    GenerationRecord {
        generation,
        coverage: hit.iter().filter(|h| **h).count() as f64 / spec.bins as f64,
        max_behavior,
        plateau_index: env.plateau_index(max_behavior),
        archive_size: archive.len(),
        population_novelty_mean: match state {
            AlgoState::Ns(s) => Some(s.population_novelty_mean()),
            AlgoState::MapElites(_) => None,
        },
    }
}

fn check_invariants(state: &AlgoState, algorithm: &AlgorithmConfig, generation: usize) -> Result<()> {
    let fail = |message: String| Err(QdError::Invariant { generation, message });
    if let (AlgoState::Ns(s), AlgorithmConfig::Ns(cfg)) = (state, algorithm) {
        if s.population.len() != cfg.population_size {
            return fail(format!(
                "population size {} != {}",
                s.population.len(),
                cfg.population_size
            ));
        }
        if generation > 0 && s.last_offspring_count != cfg.offspring_size {
            return fail(format!(
                "offspring count {} != {}",
                s.last_offspring_count, cfg.offspring_size
            ));
        }
    }
    match state.archive() {
        Archive::Unstructured(a) => {
            if let Some(max) = a.max_size() {
                if a.len() > max {
                    return fail(format!("archive holds {} > {max}", a.len()));
                }
            }
        }
        Archive::Grid(g) => {
            if let Err(e) = g.check_consistency() {
                return fail(e);
            }
        }
        Archive::None => {}
    }
    if let Some(bad) = state
        .population()
        .iter()
        .chain(state.archive().members())
        .find(|i| !i.behavior.is_finite())
    {
        return fail(format!("individual {} has a non-finite behavior", bad.id));
    }
    Ok(())
}
