//! Domain value types shared by environments, archives and algorithms.

use serde::{Deserialize, Serialize};

use crate::error::{QdError, Result};
use crate::rng::RandomSource;

/// A point of genotype space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genotype(pub Vec<f64>);

impl Genotype {
    pub fn new(values: Vec<f64>) -> Self {
        Genotype(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Genotype(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Position on the spiral curve that produced a behavior: the angle `t` and
/// the arc length `s` from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub s: f64,
}

/// Behavior descriptor. Spiral behaviors also carry the curve position that
/// generated them so that geodesic distances need no projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    pub values: Vec<f64>,
    pub curve: Option<CurvePoint>,
}

impl Behavior {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            curve: None,
        }
    }

    pub fn on_curve(values: Vec<f64>, curve: CurvePoint) -> Self {
        Self {
            values,
            curve: Some(curve),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// An evaluated genotype with bookkeeping. `behavior` is cached at creation.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub id: u64,
    pub genotype: Genotype,
    pub behavior: Behavior,
    pub born_at: usize,
}

/// Per-coordinate closed intervals, or the whole of R^N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bounds {
    Unbounded,
    Box(Vec<(f64, f64)>),
}

impl Bounds {
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        Bounds::Box(vec![(lo, hi); dim])
    }

    pub fn contains(&self, g: &Genotype) -> bool {
        match self {
            Bounds::Unbounded => true,
            Bounds::Box(b) => {
                b.len() == g.dim()
                    && g.0.iter().zip(b).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
            }
        }
    }

    pub fn clamp(&self, g: &mut Genotype) {
        if let Bounds::Box(b) = self {
            for (v, (lo, hi)) in g.0.iter_mut().zip(b) {
                *v = v.clamp(*lo, *hi);
            }
        }
    }
}

/// Perturbs every coordinate with independent `N(0, sigma)` noise and clamps
/// the result into `bounds`.
pub fn gaussian_mutate(
    g: &Genotype,
    sigma: f64,
    rng: &mut RandomSource,
    bounds: &Bounds,
) -> Result<Genotype> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(QdError::usage(format!(
            "mutation sigma must be positive, got {sigma}"
        )));
    }
    let mut out = Genotype(g.0.iter().map(|v| v + sigma * rng.standard_normal()).collect());
    bounds.clamp(&mut out);
    Ok(out)
}

/// Hands out run-unique, strictly increasing individual ids.
#[derive(Clone, Debug, Default)]
pub struct IdCounter(u64);

impl IdCounter {
    pub fn next_id(&mut self) -> u64 {
        let id = self.0;
        self.0 += 1;
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sigma_is_near_identity() {
        let mut rng = RandomSource::new(3);
        let g = Genotype::new(vec![1.0, -2.0, 7.5]);
        let m = gaussian_mutate(&g, 1e-12, &mut rng, &Bounds::Unbounded).unwrap();
        for (a, b) in g.0.iter().zip(&m.0) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn clamps_to_lower_bound() {
        let bounds = Bounds::uniform(1, 0.0, 30.0 * std::f64::consts::PI);
        let mut rng = RandomSource::new(11);
        let g = Genotype::new(vec![0.0]);
        let mut hit_zero = false;
        for _ in 0..100 {
            let m = gaussian_mutate(&g, 5.0, &mut rng, &bounds).unwrap();
            assert!(bounds.contains(&m));
            hit_zero |= m.0[0] == 0.0;
        }
        assert!(hit_zero, "negative draws must clamp to exactly 0");
    }

    #[test]
    fn rejects_non_positive_sigma() {
        let mut rng = RandomSource::new(0);
        let g = Genotype::zeros(2);
        assert!(matches!(
            gaussian_mutate(&g, 0.0, &mut rng, &Bounds::Unbounded),
            Err(QdError::Usage(_))
        ));
        assert!(gaussian_mutate(&g, -1.0, &mut rng, &Bounds::Unbounded).is_err());
        assert!(gaussian_mutate(&g, f64::NAN, &mut rng, &Bounds::Unbounded).is_err());
    }

    #[test]
    fn mutation_mean_matches_parent() {
        let mut rng = RandomSource::new(2024);
        let g = Genotype::new(vec![5.0]);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| gaussian_mutate(&g, 0.3, &mut rng, &Bounds::Unbounded).unwrap().0[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 5.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn ids_are_unique() {
        let mut c = IdCounter::default();
        let ids: Vec<u64> = (0..5).map(|_| c.next_id()).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    }
}
