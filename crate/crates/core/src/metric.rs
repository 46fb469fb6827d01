//! Behavior-space distances and k-nearest-neighbor novelty.

use serde::{Deserialize, Serialize};

use crate::environments::spiral::arc_length_from_origin;
use crate::error::{QdError, Result};
use crate::types::{Behavior, Individual};

/// Distance used to compare behaviors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistanceMetric {
    /// Straight-line distance in the embedding space.
    Euclidean,
    /// Arc length along the Archimedean spiral with scale `a`.
    GeodesicSpiral { a: f64 },
}

impl DistanceMetric {
    /// Distance between two behaviors of equal dimension.
    ///
    /// The geodesic metric uses the arc length cached on each behavior; when a
    /// behavior carries none, its angle is recovered from the radius `r = a t`.
    pub fn distance(&self, x: &Behavior, y: &Behavior) -> f64 {
        match *self {
            DistanceMetric::Euclidean => euclid(&x.values, &y.values),
            DistanceMetric::GeodesicSpiral { a } => {
                (spiral_position(x, a) - spiral_position(y, a)).abs()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::GeodesicSpiral { .. } => "geodesic-spiral",
        }
    }
}

fn spiral_position(b: &Behavior, a: f64) -> f64 {
    match b.curve {
        Some(c) => c.s,
        None => {
            let t = euclid(&b.values, &[0.0, 0.0]) / a;
            arc_length_from_origin(t, a)
        }
    }
}

#[inline]
fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// l2 distance between two behaviors.
pub fn euclidean_distance(x: &Behavior, y: &Behavior) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(QdError::usage(format!(
            "behavior dimensions differ: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(euclid(&x.values, &y.values))
}

/// Mean of the `k` smallest entries of `distances` (all of them when fewer).
///
/// The selected values are summed in ascending order, which makes the result
/// independent of the input ordering down to the last bit.
pub(crate) fn mean_of_k_smallest(distances: &mut [f64], k: usize) -> f64 {
    let n = distances.len();
    debug_assert!(n > 0 && k > 0);
    let k = k.min(n);
    if k < n {
        distances.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    let nearest = &mut distances[..k];
    nearest.sort_unstable_by(f64::total_cmp);
    nearest.iter().sum::<f64>() / k as f64
}

/// Mean distance from `x` to its `min(k, |pool|)` nearest neighbors in `pool`.
///
/// Self-exclusion is the caller's job: pass a pool that does not contain the
/// querying individual. Value-identical entries count as neighbors.
pub fn knn_mean_distance<'a, I>(x: &Behavior, pool: I, k: usize, metric: &DistanceMetric) -> Result<f64>
where
    I: IntoIterator<Item = &'a Behavior>,
{
    if k == 0 {
        return Err(QdError::usage("k must be at least 1"));
    }
    let mut distances = Vec::new();
    for b in pool {
        if b.dim() != x.dim() {
            return Err(QdError::usage(format!(
                "behavior dimensions differ: {} vs {}",
                x.dim(),
                b.dim()
            )));
        }
        distances.push(metric.distance(x, b));
    }
    if distances.is_empty() {
        return Err(QdError::usage("k-NN pool is empty"));
    }
    Ok(mean_of_k_smallest(&mut distances, k))
}

/// Novelty of each query against `pool`, skipping pool entries that share the
/// query's id. A query with no other neighbor scores 0.
pub fn novelty_scores(
    queries: &[&Individual],
    pool: &[&Individual],
    k: usize,
    metric: &DistanceMetric,
) -> Vec<f64> {
    let mut buf = Vec::with_capacity(pool.len());
    queries
        .iter()
        .map(|q| {
            buf.clear();
            buf.extend(
                pool.iter()
                    .filter(|p| p.id != q.id)
                    .map(|p| metric.distance(&q.behavior, &p.behavior)),
            );
            if buf.is_empty() {
                0.0
            } else {
                mean_of_k_smallest(&mut buf, k)
            }
        })
        .collect()
}
