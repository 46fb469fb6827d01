use super::{initialize_population, make_individual, MapElitesConfig};
use crate::archives::{Archive, GridArchive};
use crate::environments::Environment;
use crate::error::{QdError, Result};
use crate::rng::RandomSource;
use crate::types::{gaussian_mutate, IdCounter, Individual};

/// Mutable state of a MAP-Elites run. `grid` is always [`Archive::Grid`].
#[derive(Clone, Debug)]
pub struct MapElitesState {
    pub generation: usize,
    pub grid: Archive,
    /// Most recent batch of evaluated individuals (the initial batch at
    /// generation 0).
    pub last_batch: Vec<Individual>,
    pub ids: IdCounter,
}

impl MapElitesState {
    pub fn initialize<E: Environment + ?Sized>(
        env: &E,
        cfg: &MapElitesConfig,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut ids = IdCounter::default();
        let batch = initialize_population(env, cfg.initial_batch, cfg.sigma, rng, &mut ids)?;
        let mut grid = GridArchive::new(cfg.grid.clone().unwrap_or_else(|| env.default_grid()), cfg.policy)?;
        for ind in &batch {
            grid.insert(ind.clone(), rng);
        }
        Ok(Self {
            generation: 0,
            grid: Archive::Grid(grid),
            last_batch: batch,
            ids,
        })
    }

    pub fn grid(&self) -> &GridArchive {
        match &self.grid {
            Archive::Grid(g) => g,
            _ => unreachable!("MAP-Elites always holds a grid"),
        }
    }
}

/// Samples parents uniformly from occupied cells, mutates and evaluates
/// them, and inserts every offspring into the grid.
pub fn map_elites_generation<E: Environment + ?Sized>(
    state: &mut MapElitesState,
    env: &E,
    cfg: &MapElitesConfig,
    rng: &mut RandomSource,
) -> Result<()> {
    let Archive::Grid(grid) = &mut state.grid else {
        unreachable!("MAP-Elites always holds a grid")
    };
    if grid.is_empty() {
        return Err(QdError::usage("MAP-Elites grid has no occupant to sample"));
    }
    state.generation += 1;
    let parents: Vec<_> = grid
        .sample(cfg.batch_size, rng)?
        .into_iter()
        .map(|p| p.genotype.clone())
        .collect();
    let mut batch = Vec::with_capacity(parents.len());
    for parent in parents {
        let child = gaussian_mutate(&parent, cfg.sigma, rng, env.bounds())?;
        batch.push(make_individual(env, child, state.generation, &mut state.ids)?);
    }
    for ind in &batch {
        grid.insert(ind.clone(), rng);
    }
    state.last_batch = batch;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{DeceptiveEnv, DeceptiveParams};

    #[test]
    fn single_occupant_is_the_parent() {
        let env = DeceptiveEnv::new(DeceptiveParams::default(), false).unwrap();
        let mut cfg = MapElitesConfig::new(5.0);
        cfg.batch_size = 1;
        cfg.initial_batch = 1;
        let mut rng = RandomSource::new(4);
        let mut s = MapElitesState::initialize(&env, &cfg, &mut rng).unwrap();
        assert_eq!(s.grid().len(), 1);
        let parent = s.grid().occupants().next().unwrap().genotype.clone();
        // Replay: one index draw over a single cell, then the mutation.
        let mut replay = rng.clone();
        assert_eq!(replay.index(1), 0);
        let expected = gaussian_mutate(&parent, cfg.sigma, &mut replay, env.bounds()).unwrap();
        map_elites_generation(&mut s, &env, &cfg, &mut rng).unwrap();
        assert_eq!(s.last_batch[0].genotype, expected);
    }

    #[test]
    fn occupancy_never_decreases() {
        let env = DeceptiveEnv::new(DeceptiveParams::default(), false).unwrap();
        let cfg = MapElitesConfig::new(10.0);
        let mut rng = RandomSource::new(5);
        let mut s = MapElitesState::initialize(&env, &cfg, &mut rng).unwrap();
        let mut last = s.grid().len();
        for _ in 0..200 {
            map_elites_generation(&mut s, &env, &cfg, &mut rng).unwrap();
            assert!(s.grid().len() >= last);
            last = s.grid().len();
        }
    }
}
