use std::cmp::Ordering;

use super::{build_archive, initialize_population, make_individual, NoveltyPool, NsConfig};
use crate::archives::Archive;
use crate::environments::Environment;
use crate::error::Result;
use crate::metric::novelty_scores;
use crate::rng::RandomSource;
use crate::types::{gaussian_mutate, IdCounter, Individual};

/// Novelty scores of one generation, with the pool they were measured against.
#[derive(Clone, Debug)]
pub struct NoveltyEval {
    /// Population followed by offspring.
    pub candidates: Vec<Individual>,
    pub scores: Vec<f64>,
    /// Reference pool (self-exclusion by id is applied per query).
    pub pool: Vec<Individual>,
}

/// Mutable state of a Novelty Search run.
#[derive(Clone, Debug)]
pub struct NsState {
    pub generation: usize,
    pub population: Vec<Individual>,
    /// Novelty of each population member, aligned with `population`.
    pub novelty: Vec<f64>,
    pub archive: Archive,
    pub ids: IdCounter,
    pub last_offspring_count: usize,
    /// Keep the novelty evaluation of every `n`-th generation (0: never).
    pub record_novelty_every: usize,
    pub last_eval: Option<NoveltyEval>,
}

impl NsState {
    /// Generation 0: initial population, its novelty, and (for grid
    /// archives) its insertion into the grid.
    pub fn initialize<E: Environment + ?Sized>(
        env: &E,
        cfg: &NsConfig,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut ids = IdCounter::default();
        let population = initialize_population(env, cfg.population_size, cfg.sigma, rng, &mut ids)?;
        let mut archive = build_archive(env, &cfg.archive)?;
        if let Archive::Grid(g) = &mut archive {
            for ind in &population {
                g.insert(ind.clone(), rng);
            }
        }
        let mut state = Self {
            generation: 0,
            novelty: Vec::new(),
            population,
            archive,
            ids,
            last_offspring_count: 0,
            record_novelty_every: 0,
            last_eval: None,
        };
        let pop: Vec<&Individual> = state.population.iter().collect();
        let pool = reference_pool(&pop, &state.archive, cfg.novelty_pool);
        state.novelty = novelty_scores(&pop, &pool, cfg.k, &cfg.metric);
        Ok(state)
    }

    pub fn population_novelty_mean(&self) -> f64 {
        if self.novelty.is_empty() {
            0.0
        } else {
            self.novelty.iter().sum::<f64>() / self.novelty.len() as f64
        }
    }
}

fn reference_pool<'a>(
    candidates: &[&'a Individual],
    archive: &'a Archive,
    which: NoveltyPool,
) -> Vec<&'a Individual> {
    let mut pool = candidates.to_vec();
    if which == NoveltyPool::PopulationOffspringArchive {
        pool.extend(archive.members());
    }
    pool
}

/// Higher novelty first, then ascending id.
fn by_novelty(a: (f64, u64), b: (f64, u64)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// One Novelty Search generation:
/// parents are drawn uniformly (from the population, or population and
/// archive when resampling), mutated and evaluated; population and offspring
/// are scored against population, offspring and archive; the `M` most novel
/// survive; the archive is then updated.
pub fn ns_generation<E: Environment + ?Sized>(
    state: &mut NsState,
    env: &E,
    cfg: &NsConfig,
    rng: &mut RandomSource,
) -> Result<()> {
    state.generation += 1;
    let generation = state.generation;

    let mut offspring = Vec::with_capacity(cfg.offspring_size);
    {
        let mut parents: Vec<&Individual> = state.population.iter().collect();
        if cfg.resample_from_archive {
            parents.extend(state.archive.members());
        }
        for _ in 0..cfg.offspring_size {
            let parent = parents[rng.index(parents.len())];
            let genotype = gaussian_mutate(&parent.genotype, cfg.sigma, rng, env.bounds())?;
            offspring.push(make_individual(env, genotype, generation, &mut state.ids)?);
        }
    }
    state.last_offspring_count = offspring.len();

    let candidates: Vec<&Individual> = state.population.iter().chain(&offspring).collect();
    let pool = reference_pool(&candidates, &state.archive, cfg.novelty_pool);
    let scores = novelty_scores(&candidates, &pool, cfg.k, &cfg.metric);

    state.last_eval = None;
    let every = state.record_novelty_every;
    if every > 0 && generation % every == 0 {
        state.last_eval = Some(NoveltyEval {
            candidates: candidates.iter().map(|&i| i.clone()).collect(),
            scores: scores.clone(),
            pool: pool.iter().map(|&i| i.clone()).collect(),
        });
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| by_novelty((scores[a], candidates[a].id), (scores[b], candidates[b].id)));
    order.truncate(cfg.population_size);
    let next_population: Vec<Individual> = order.iter().map(|&i| candidates[i].clone()).collect();
    let next_novelty: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

    let pop_len = state.population.len();
    let offspring_scores = &scores[pop_len..];
    match &mut state.archive {
        Archive::None => {}
        Archive::Unstructured(a) => {
            let mut ranked: Vec<usize> = (0..offspring.len()).collect();
            ranked.sort_by(|&x, &y| {
                by_novelty((offspring_scores[x], offspring[x].id), (offspring_scores[y], offspring[y].id))
            });
            let (best, rest) = ranked.split_at(cfg.archive_add_most_novel.min(ranked.len()));
            for &i in best {
                a.insert(offspring[i].clone(), rng);
            }
            let rest: Vec<Individual> = rest.iter().map(|&i| offspring[i].clone()).collect();
            a.insert_random(&rest, cfg.archive_add_random, rng);
        }
        Archive::Grid(g) => {
            for ind in &offspring {
                g.insert(ind.clone(), rng);
            }
        }
    }

    state.population = next_population;
    state.novelty = next_novelty;
    Ok(())
}
