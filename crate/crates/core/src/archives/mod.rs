//! Archives: bounded unstructured sets with random insertion and eviction,
//! and fixed-resolution grids with keep-first occupancy.

mod grid;
mod unstructured;

pub use grid::{GridArchive, GridPolicy, GridSpec};
pub use unstructured::UnstructuredArchive;

use crate::error::Result;
use crate::rng::RandomSource;
use crate::types::Individual;

/// The archive attached to a run.
#[derive(Clone, Debug)]
pub enum Archive {
    None,
    Unstructured(UnstructuredArchive),
    Grid(GridArchive),
}

impl Archive {
    pub fn len(&self) -> usize {
        match self {
            Archive::None => 0,
            Archive::Unstructured(a) => a.len(),
            Archive::Grid(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members in a deterministic order (insertion order, or cell order).
    pub fn members(&self) -> Vec<&Individual> {
        match self {
            Archive::None => Vec::new(),
            Archive::Unstructured(a) => a.members().iter().collect(),
            Archive::Grid(g) => g.occupants().collect(),
        }
    }

    /// `count` members drawn uniformly with replacement.
    pub fn sample(&self, count: usize, rng: &mut RandomSource) -> Result<Vec<&Individual>> {
        match self {
            Archive::None => Err(crate::error::QdError::usage("cannot sample from an absent archive")),
            Archive::Unstructured(a) => a.sample(count, rng),
            Archive::Grid(g) => g.sample(count, rng),
        }
    }
}
