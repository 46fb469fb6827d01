//! Benchmark environments behind a common [`Environment`] contract.

pub mod deceptive;
pub mod spiral;
pub mod ssf;

pub use deceptive::{DeceptiveEnv, DeceptiveParams};
pub use spiral::{Parametrization, SpiralEnv};
pub use ssf::{SsfEnv, SsfOutput};

use crate::archives::GridSpec;
use crate::error::Result;
use crate::types::{Behavior, Bounds, Genotype};

/// How an environment wants its initial population drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum StartDistribution {
    /// Every individual starts at the same genotype.
    Fixed(Genotype),
    /// Isotropic normal around `center` with the mutation sigma as spread.
    Gaussian { center: Genotype },
}

/// A behavior function together with the metadata the algorithms and the
/// analysis need.
///
/// `evaluate` must be pure: the same genotype always yields a bitwise-equal
/// behavior.
pub trait Environment: Send + Sync {
    fn name(&self) -> &'static str;
    fn genotype_dim(&self) -> usize;
    fn bounds(&self) -> &Bounds;
    fn behavior_dim(&self) -> usize;
    fn evaluate(&self, g: &Genotype) -> Result<Behavior>;

    /// Scalar position of a behavior inside the reachable behavior space,
    /// used for coverage binning and "max behavior" reporting.
    fn coverage_value(&self, b: &Behavior) -> f64;

    /// Interval that `coverage_value` ranges over.
    fn coverage_domain(&self) -> (f64, f64);

    /// Grid used by structured archives when the configuration gives none.
    fn default_grid(&self) -> GridSpec;

    fn start(&self) -> StartDistribution;

    /// Index of the last plateau reached by a scalar behavior, for
    /// environments that have plateaus.
    fn plateau_index(&self, _value: f64) -> Option<i64> {
        None
    }
}

/// Any of the built-in environments.
#[derive(Clone, Debug)]
pub enum Env {
    Spiral(SpiralEnv),
    Ssf(SsfEnv),
    Deceptive(DeceptiveEnv),
}

macro_rules! delegate {
    ($self:ident, $e:ident => $body:expr) => {
        match $self {
            Env::Spiral($e) => $body,
            Env::Ssf($e) => $body,
            Env::Deceptive($e) => $body,
        }
    };
}

impl Environment for Env {
    fn name(&self) -> &'static str {
        delegate!(self, e => e.name())
    }
    fn genotype_dim(&self) -> usize {
        delegate!(self, e => e.genotype_dim())
    }
    fn bounds(&self) -> &Bounds {
        delegate!(self, e => e.bounds())
    }
    fn behavior_dim(&self) -> usize {
        delegate!(self, e => e.behavior_dim())
    }
    fn evaluate(&self, g: &Genotype) -> Result<Behavior> {
        delegate!(self, e => e.evaluate(g))
    }
    fn coverage_value(&self, b: &Behavior) -> f64 {
        delegate!(self, e => e.coverage_value(b))
    }
    fn coverage_domain(&self) -> (f64, f64) {
        delegate!(self, e => e.coverage_domain())
    }
    fn default_grid(&self) -> GridSpec {
        delegate!(self, e => e.default_grid())
    }
    fn start(&self) -> StartDistribution {
        delegate!(self, e => e.start())
    }
    fn plateau_index(&self, value: f64) -> Option<i64> {
        delegate!(self, e => e.plateau_index(value))
    }
}
