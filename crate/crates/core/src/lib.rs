//! Benchmark environments and reference algorithms for Quality-Diversity
//! search.
//!
//! Three environments each isolate one difficulty:
//!
//! * [`environments::SpiralEnv`]: an Archimedean spiral reachable through a
//!   biased (angle) or unbiased (arc-length) genotype, where the Euclidean
//!   metric misjudges novelty.
//! * [`environments::SsfEnv`]: a self-similar function whose plateaus grow
//!   without bound, trapping fixed-size mutations.
//! * [`environments::DeceptiveEnv`]: a two-component Gaussian mixture whose
//!   steep narrow mode lures search away from the global maximum.
//!
//! The [`algorithms`] module provides Novelty Search (archive-less,
//! unstructured, grid, resampling) and MAP-Elites; [`analysis`] turns runs
//! into coverage curves, histograms and stall reports; [`harness`] drives
//! seeded batches and writes CSV/JSON results.
//!
//! ```
//! use qd_suite::algorithms::{run, AlgorithmConfig, NsConfig, RunOptions};
//! use qd_suite::analysis::CoverageSpec;
//! use qd_suite::environments::{Parametrization, SpiralEnv};
//!
//! let env = SpiralEnv::new(0.01, 30.0, Parametrization::ArcLength, None).unwrap();
//! let algo = AlgorithmConfig::Ns(NsConfig::new(0.3));
//! let opts = RunOptions::new(CoverageSpec::for_env(&env, 100).unwrap());
//! let result = run(&env, &algo, 42, 20, &opts).unwrap();
//! assert_eq!(result.records.len(), 21);
//! ```

pub mod algorithms;
pub mod analysis;
pub mod archives;
pub mod environments;
pub mod error;
pub mod harness;
pub mod metric;
pub mod rng;
pub mod types;

pub use error::{QdError, Result};
pub use rng::RandomSource;
pub use types::{gaussian_mutate, Behavior, Bounds, CurvePoint, Genotype, Individual};
