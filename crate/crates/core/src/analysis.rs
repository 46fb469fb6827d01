//! Coverage, histograms, plateau stalls and multi-run aggregation.

use serde::{Deserialize, Serialize};

use crate::algorithms::RunResult;
use crate::environments::Environment;
use crate::error::{QdError, Result};
use crate::types::Behavior;

/// Uniform binning of the scalar reachable-behavior interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl CoverageSpec {
    pub const DEFAULT_BINS: usize = 100;

    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(QdError::config("analysis.bins", "must be >= 1"));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(QdError::config(
                "analysis",
                format!("coverage domain [{lo}, {hi}] is degenerate"),
            ));
        }
        Ok(Self { lo, hi, bins })
    }

    /// Spec over the environment's coverage domain.
    pub fn for_env<E: Environment + ?Sized>(env: &E, bins: usize) -> Result<Self> {
        let (lo, hi) = env.coverage_domain();
        Self::new(lo, hi, bins)
    }

    /// Bin of a value, clamped into `[0, bins - 1]`.
    pub fn bin(&self, value: f64) -> usize {
        let raw = ((value - self.lo) / (self.hi - self.lo) * self.bins as f64).floor();
        if raw.is_nan() || raw < 0.0 {
            0
        } else {
            (raw as usize).min(self.bins - 1)
        }
    }

    /// Lower edge of a bin.
    pub fn edge(&self, bin: usize) -> f64 {
        self.lo + (self.hi - self.lo) * bin as f64 / self.bins as f64
    }
}

/// Fraction of bins holding at least one value.
pub fn coverage<I: IntoIterator<Item = f64>>(values: I, spec: &CoverageSpec) -> f64 {
    let mut hit = vec![false; spec.bins];
    for v in values {
        hit[spec.bin(v)] = true;
    }
    hit.iter().filter(|h| **h).count() as f64 / spec.bins as f64
}

/// Coverage of a set of behaviors in an environment's scalar binning.
pub fn behavior_coverage<'a, E, I>(env: &E, behaviors: I, spec: &CoverageSpec) -> f64
where
    E: Environment + ?Sized,
    I: IntoIterator<Item = &'a Behavior>,
{
    coverage(behaviors.into_iter().map(|b| env.coverage_value(b)), spec)
}

/// Per-bin counts.
pub fn behavior_histogram<I: IntoIterator<Item = f64>>(values: I, spec: &CoverageSpec) -> Vec<usize> {
    let mut counts = vec![0; spec.bins];
    for v in values {
        counts[spec.bin(v)] += 1;
    }
    counts
}

/// Plateau progress of an SSF run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StallReport {
    /// Last plateau reached at the end of the trace (-1: none).
    pub last_plateau: i64,
    /// Generations elapsed since that plateau was first reached.
    pub generations_on_plateau: usize,
    pub stalled: bool,
}

pub const DEFAULT_STALL_THRESHOLD: usize = 500;

/// Stall analysis of a per-generation plateau-index trace.
pub fn ssf_progress(plateau_trace: &[i64], threshold: usize) -> Option<StallReport> {
    let last = *plateau_trace.last()?;
    let run = plateau_trace.iter().rev().take_while(|&&p| p == last).count();
    let spent = run - 1;
    Some(StallReport {
        last_plateau: last,
        generations_on_plateau: spent,
        stalled: spent >= threshold,
    })
}

/// One row of an aggregate time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub generation: usize,
    pub coverage_mean: f64,
    pub coverage_std: f64,
    /// Fraction of bins visited by any run up to this generation.
    pub union_coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub rows: Vec<AggregateRow>,
    /// Sum over runs of the final population-and-archive histograms.
    pub final_histogram: Vec<usize>,
    /// Per-run maximum of the `max_behavior` series.
    pub run_max_behavior: Vec<f64>,
    /// Per-run final coverage.
    pub final_coverage: Vec<f64>,
}

impl Aggregate {
    pub fn final_union_coverage(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.union_coverage)
    }

    /// Number of runs whose behavior ever exceeded `threshold`.
    pub fn runs_exceeding(&self, threshold: f64) -> usize {
        self.run_max_behavior.iter().filter(|&&m| m > threshold).count()
    }

    /// Mean over generations of the mean coverage curve.
    pub fn mean_coverage_over_time(&self) -> f64 {
        self.rows.iter().map(|r| r.coverage_mean).sum::<f64>() / self.rows.len().max(1) as f64
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates runs that share one configuration (seeds excepted).
pub fn aggregate(results: &[RunResult]) -> Result<Aggregate> {
    let first = results
        .first()
        .ok_or_else(|| QdError::usage("nothing to aggregate"))?;
    for r in &results[1..] {
        if r.env_name != first.env_name
            || r.algorithm != first.algorithm
            || r.coverage != first.coverage
            || r.records.len() != first.records.len()
        {
            return Err(QdError::usage(format!(
                "cannot aggregate runs with different configurations (seeds {} and {})",
                first.seed, r.seed
            )));
        }
    }
    let bins = first.coverage.bins;
    let mut union_first = vec![usize::MAX; bins];
    for r in results {
        for (u, v) in union_first.iter_mut().zip(&r.bin_first_visit) {
            if let Some(g) = v {
                *u = (*u).min(*g);
            }
        }
    }
    let rows = (0..first.records.len())
        .map(|g| {
            let covs: Vec<f64> = results.iter().map(|r| r.records[g].coverage).collect();
            let (coverage_mean, coverage_std) = mean_std(&covs);
            let visited = union_first.iter().filter(|&&f| f <= g).count();
            AggregateRow {
                generation: first.records[g].generation,
                coverage_mean,
                coverage_std,
                union_coverage: visited as f64 / bins as f64,
            }
        })
        .collect();
    let mut final_histogram = vec![0; bins];
    for r in results {
        for (acc, c) in final_histogram.iter_mut().zip(&r.final_histogram) {
            *acc += c;
        }
    }
    Ok(Aggregate {
        runs: results.len(),
        rows,
        final_histogram,
        run_max_behavior: results.iter().map(RunResult::max_behavior_reached).collect(),
        final_coverage: results.iter().map(|r| r.records.last().map_or(0.0, |x| x.coverage)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> CoverageSpec {
        CoverageSpec::new(0.0, 1.0, 100).unwrap()
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(std::iter::empty(), &spec()), 0.0);
        let all = (0..100).map(|i| (i as f64 + 0.5) / 100.0);
        assert_eq!(coverage(all, &spec()), 1.0);
        assert_eq!(coverage([0.001, 0.002, 0.5], &spec()), 0.02);
        assert!(CoverageSpec::new(0.0, 1.0, 0).is_err());
        assert!(CoverageSpec::new(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn histogram_conserves_mass() {
        assert_eq!(behavior_histogram(std::iter::empty(), &spec()), vec![0; 100]);
        let vals = [-3.0, 0.0, 0.4, 0.41, 0.999, 1.0, 7.0];
        let h = behavior_histogram(vals, &spec());
        assert_eq!(h.iter().sum::<usize>(), vals.len());
        assert_eq!(h[0], 2);
        assert_eq!(h[99], 3);
    }

    #[test]
    fn coverage_monotone_under_union() {
        let mut rng = crate::rng::RandomSource::new(6);
        for _ in 0..200 {
            let a: Vec<f64> = (0..rng.index(30)).map(|_| rng.uniform()).collect();
            let b: Vec<f64> = (0..rng.index(30)).map(|_| rng.uniform()).collect();
            let both = coverage(a.iter().chain(&b).copied(), &spec());
            assert!(both >= coverage(a.iter().copied(), &spec()));
            assert!(both >= coverage(b.iter().copied(), &spec()));
        }
    }

    #[test]
    fn stall_reports() {
        let flat = vec![3i64; 600];
        let r = ssf_progress(&flat, 500).unwrap();
        assert!(r.stalled);
        assert_eq!(r.last_plateau, 3);
        assert_eq!(r.generations_on_plateau, 599);
        let mut moving = vec![0i64; 300];
        moving.extend(vec![1i64; 300]);
        let r = ssf_progress(&moving, 500).unwrap();
        assert!(!r.stalled);
        assert_eq!(r.generations_on_plateau, 299);
        assert!(ssf_progress(&[], 500).is_none());
    }
}
