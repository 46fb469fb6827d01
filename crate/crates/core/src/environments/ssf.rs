//! Self-similar function: alternating linear bands and plateaus of growing
//! width around the origin of an unbounded genotype space.

use serde::{Deserialize, Serialize};

use super::{Environment, StartDistribution};
use crate::archives::GridSpec;
use crate::error::{QdError, Result};
use crate::types::{Behavior, Bounds, Genotype};

/// Increment `R_i - R_{i-1}` of the band-radius sequence.
fn radius_step(i: u64) -> f64 {
    let half = i / 2;
    let j = if i % 2 == 1 { half } else { half - 1 };
    2.0 * (j as f64).powi(3) + 1.0
}

/// Band radius `R_i`: `R_0 = 0`, odd steps add `2 floor(i/2)^3 + 1`, even steps
/// add `2 (floor(i/2) - 1)^3 + 1`.
pub fn ssf_radius(i: usize) -> f64 {
    (1..=i as u64).map(radius_step).sum()
}

/// The sequence `R_0..=R_n`.
pub fn radius_table(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut r = 0.0;
    out.push(r);
    for i in 1..=n as u64 {
        r += radius_step(i);
        out.push(r);
    }
    out
}

/// What the behavior looks like on plateaus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SsfOutput {
    /// 1-D behavior: `||g||` in linear bands, `R_{2k+1}` on plateaus.
    RadialScalar,
    /// N-D behavior: `g` in linear bands, `g R_{2k+1} / ||g||` on plateaus.
    VectorProjection,
}

/// Where a radius falls relative to the band sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Band {
    /// `R_{2k} <= r < R_{2k+1}`.
    Linear { k: usize },
    /// `R_{2k+1} <= r < R_{2k+2}`; `level` is `R_{2k+1}`.
    Plateau { k: usize, level: f64 },
}

#[derive(Clone, Debug)]
pub struct SsfEnv {
    order: usize,
    output: SsfOutput,
    radii: Vec<f64>,
    bounds: Bounds,
}

impl SsfEnv {
    pub const DEFAULT_MAX_BAND_INDEX: usize = 64;
    /// Upper end of the coverage domain is `R_13`.
    pub const COVERAGE_BAND: usize = 13;

    pub fn new(order: usize, max_band_index: usize, output: SsfOutput) -> Result<Self> {
        if order == 0 {
            return Err(QdError::config("env.order", "must be >= 1"));
        }
        if max_band_index < 2 {
            return Err(QdError::config("env.max_band_index", "must be >= 2"));
        }
        Ok(Self {
            order,
            output,
            radii: radius_table(max_band_index),
            bounds: Bounds::Unbounded,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn output(&self) -> SsfOutput {
        self.output
    }

    pub fn max_band_index(&self) -> usize {
        self.radii.len() - 1
    }

    /// `R_i`, continuing the recurrence past the precomputed table if needed.
    pub fn radius(&self, i: usize) -> f64 {
        match self.radii.get(i) {
            Some(r) => *r,
            None => {
                let last = self.radii.len() - 1;
                let mut r = self.radii[last];
                for j in (last + 1) as u64..=i as u64 {
                    r += radius_step(j);
                }
                r
            }
        }
    }

    /// Band containing radius `r >= 0`.
    pub fn band(&self, r: f64) -> Band {
        // First index with R_i > r; the table is strictly increasing.
        let mut upper = self.radii.partition_point(|&x| x <= r);
        if upper == self.radii.len() {
            let mut i = self.radii.len() - 1;
            let mut ri = self.radii[i];
            while ri <= r {
                i += 1;
                ri += radius_step(i as u64);
            }
            upper = i;
        }
        let i = upper - 1; // R_i <= r < R_{i+1}
        if i % 2 == 0 {
            Band::Linear { k: i / 2 }
        } else {
            Band::Plateau {
                k: i / 2,
                level: self.radius(i),
            }
        }
    }

    /// Index `k` of the last plateau `[R_{2k+1}, R_{2k+2})` that a radial
    /// value has reached, or -1 below `R_1`.
    pub fn last_plateau(&self, value: f64) -> i64 {
        match self.band(value.max(0.0)) {
            Band::Plateau { k, .. } => k as i64,
            Band::Linear { k } => k as i64 - 1,
        }
    }
}

impl Environment for SsfEnv {
    fn name(&self) -> &'static str {
        "ssf"
    }

    fn genotype_dim(&self) -> usize {
        self.order
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn behavior_dim(&self) -> usize {
        match self.output {
            SsfOutput::RadialScalar => 1,
            SsfOutput::VectorProjection => self.order,
        }
    }

    fn evaluate(&self, g: &Genotype) -> Result<Behavior> {
        if g.dim() != self.order {
            return Err(QdError::usage(format!(
                "SSF of order {} got a genotype of dimension {}",
                self.order,
                g.dim()
            )));
        }
        let r = g.norm();
        if !r.is_finite() {
            return Err(QdError::usage("SSF genotype must be finite"));
        }
        Ok(match (self.band(r), self.output) {
            (Band::Linear { .. }, SsfOutput::RadialScalar) => Behavior::new(vec![r]),
            (Band::Linear { .. }, SsfOutput::VectorProjection) => Behavior::new(g.0.clone()),
            (Band::Plateau { level, .. }, SsfOutput::RadialScalar) => Behavior::new(vec![level]),
            (Band::Plateau { level, .. }, SsfOutput::VectorProjection) => {
                Behavior::new(g.0.iter().map(|v| v * level / r).collect())
            }
        })
    }

    fn coverage_value(&self, b: &Behavior) -> f64 {
        match self.output {
            SsfOutput::RadialScalar => b.values[0],
            SsfOutput::VectorProjection => b.values.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    fn coverage_domain(&self) -> (f64, f64) {
        (0.0, self.radius(Self::COVERAGE_BAND))
    }

    /// Radial mode: 200 cells over `[0, R_9]`. Vector mode: 20 cells per axis
    /// over `[-R_9, R_9]`.
    fn default_grid(&self) -> GridSpec {
        let r9 = self.radius(9);
        match self.output {
            SsfOutput::RadialScalar => GridSpec::new(vec![0.0], vec![r9], vec![200]),
            SsfOutput::VectorProjection => GridSpec::new(
                vec![-r9; self.order],
                vec![r9; self.order],
                vec![20; self.order],
            ),
        }
        .expect("valid SSF grid")
    }

    fn start(&self) -> StartDistribution {
        StartDistribution::Fixed(Genotype::zeros(self.order))
    }

    fn plateau_index(&self, value: f64) -> Option<i64> {
        Some(self.last_plateau(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    /// Direct transcription of the recurrence, as an oracle.
    fn recurrence(i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let half = (i / 2) as i64;
        let step = if i % 2 == 1 { 2 * half.pow(3) + 1 } else { 2 * (half - 1).pow(3) + 1 };
        recurrence(i - 1) + step as f64
    }

    #[test]
    fn radius_sequence() {
        assert_eq!(ssf_radius(0), 0.0);
        let got: Vec<f64> = (1..=8).map(ssf_radius).collect();
        assert_eq!(got, vec![1.0, 2.0, 5.0, 8.0, 25.0, 42.0, 97.0, 152.0]);
        for i in 0..40 {
            assert_eq!(ssf_radius(i), recurrence(i));
        }
        let table = radius_table(64);
        assert!(table.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn band_widths_follow_cubic_law() {
        for j in 0..=10usize {
            let w = 2.0 * (j as f64).powi(3) + 1.0;
            assert_eq!(ssf_radius(2 * j + 1) - ssf_radius(2 * j), w);
            assert_eq!(ssf_radius(2 * j + 2) - ssf_radius(2 * j + 1), w);
        }
    }

    #[test]
    fn evaluate_examples() {
        let one = SsfEnv::new(1, 64, SsfOutput::RadialScalar).unwrap();
        assert_eq!(one.evaluate(&Genotype::new(vec![0.0])).unwrap().values, vec![0.0]);
        assert_eq!(one.evaluate(&Genotype::new(vec![1.5])).unwrap().values, vec![1.0]);
        assert_eq!(one.evaluate(&Genotype::new(vec![-1.5])).unwrap().values, vec![1.0]);
        let two = SsfEnv::new(2, 64, SsfOutput::RadialScalar).unwrap();
        assert_eq!(two.evaluate(&Genotype::new(vec![3.0, 4.0])).unwrap().values, vec![5.0]);
        assert!(two.evaluate(&Genotype::new(vec![3.0])).is_err());

        let vec2 = SsfEnv::new(2, 64, SsfOutput::VectorProjection).unwrap();
        assert_eq!(vec2.evaluate(&Genotype::new(vec![0.3, 0.4])).unwrap().values, vec![0.3, 0.4]);
        // |g| = 6.5 lies on the plateau [5, 8): projected to radius 5
        let p = vec2.evaluate(&Genotype::new(vec![3.9, 5.2])).unwrap().values;
        assert!((p[0].hypot(p[1]) - 5.0).abs() < 1e-12);
        assert!((p[1] / p[0] - 5.2 / 3.9).abs() < 1e-12);
    }

    #[test]
    fn bands_extend_past_table() {
        let small = SsfEnv::new(1, 4, SsfOutput::RadialScalar).unwrap();
        let big = SsfEnv::new(1, 64, SsfOutput::RadialScalar).unwrap();
        for &x in &[0.5, 9.0, 30.0, 100.0, 300.0, 5_000.0, 1e6] {
            let g = Genotype::new(vec![x]);
            assert_eq!(small.evaluate(&g).unwrap(), big.evaluate(&g).unwrap(), "x={x}");
        }
        assert_eq!(small.radius(20), ssf_radius(20));
    }

    #[test]
    fn piecewise_identity_and_plateaus() {
        let env = SsfEnv::new(3, 64, SsfOutput::RadialScalar).unwrap();
        let mut rng = RandomSource::new(4);
        for j in 0..=5usize {
            let (lo, mid, hi) = (ssf_radius(2 * j), ssf_radius(2 * j + 1), ssf_radius(2 * j + 2));
            for _ in 0..10_000 {
                let dir: Vec<f64> = (0..3).map(|_| rng.standard_normal()).collect();
                let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let linear_r = lo + rng.uniform() * (mid - lo);
                let g = Genotype::new(dir.iter().map(|v| v / n * linear_r).collect());
                assert_eq!(env.evaluate(&g).unwrap().values[0], g.norm());
                let plateau_r = mid + rng.uniform() * (hi - mid);
                let g = Genotype::new(dir.iter().map(|v| v / n * plateau_r).collect());
                if g.norm() >= mid && g.norm() < hi {
                    assert_eq!(env.evaluate(&g).unwrap().values[0], mid);
                }
            }
        }
    }

    #[test]
    fn radial_behavior_is_monotone() {
        let env = SsfEnv::new(1, 64, SsfOutput::RadialScalar).unwrap();
        let mut prev = -1.0;
        for i in 0..20_000 {
            let b = env.evaluate(&Genotype::new(vec![i as f64 * 0.05])).unwrap().values[0];
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn plateau_indices() {
        let env = SsfEnv::new(1, 64, SsfOutput::RadialScalar).unwrap();
        assert_eq!(env.last_plateau(0.5), -1);
        assert_eq!(env.last_plateau(1.0), 0);
        assert_eq!(env.last_plateau(42.5), 2);
        assert_eq!(env.last_plateau(97.0), 3);
        assert_eq!(env.last_plateau(281.0), 4);
    }
}
