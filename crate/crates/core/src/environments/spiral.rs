//! Archimedean spiral behavior space, reachable through an angle genotype or
//! an arc-length genotype.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Environment, StartDistribution};
use crate::archives::GridSpec;
use crate::error::{QdError, Result};
use crate::types::{Behavior, Bounds, CurvePoint, Genotype};

/// Point `(a t cos t, a t sin t)` of the spiral.
pub fn spiral_point(t: f64, a: f64) -> Result<Behavior> {
    if !(t >= 0.0) {
        return Err(QdError::usage(format!("spiral angle must be >= 0, got {t}")));
    }
    Ok(Behavior::new(vec![a * t * t.cos(), a * t * t.sin()]))
}

/// Arc length from the origin to angle `t`:
/// `(a/2) (t sqrt(t^2+1) + ln(t + sqrt(t^2+1)))`.
pub fn arc_length_from_origin(t: f64, a: f64) -> f64 {
    let root = t.hypot(1.0);
    0.5 * a * (t * root + t.asinh())
}

/// Arc length of the spiral between angles `t1 <= t2`.
pub fn arc_length(t1: f64, t2: f64, a: f64) -> Result<f64> {
    if !(t1 >= 0.0) || !(t1 <= t2) {
        return Err(QdError::usage(format!(
            "arc length needs 0 <= t1 <= t2, got t1={t1}, t2={t2}"
        )));
    }
    Ok(arc_length_from_origin(t2, a) - arc_length_from_origin(t1, a))
}

/// Angle `t` whose arc length from the origin is `s`.
///
/// Safeguarded Newton iteration on the closed form, falling back to bisection
/// whenever a Newton step leaves the current bracket. The residual satisfies
/// `|S(0, t) - s| <= 1e-10 s`.
pub fn invert_arc_length(s: f64, a: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(QdError::usage(format!("arc length must be finite and >= 0, got {s}")));
    }
    if !(a > 0.0) {
        return Err(QdError::usage(format!("spiral scale must be > 0, got {a}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-10 * s;
    // S(0,t) >= a t and S(0,t) >= a t^2 / 2, so t <= min(s/a, sqrt(2s/a)).
    let mut lo = 0.0;
    let mut hi = (s / a).min((2.0 * s / a).sqrt()) * (1.0 + 1e-12) + 1e-12;
    // Initial guess from the large-t asymptote.
    let mut t = (2.0 * s / a).sqrt().min(hi);
    for _ in 0..200 {
        let f = arc_length_from_origin(t, a) - s;
        if f.abs() <= tol {
            return Ok(t);
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let step = f / (a * t.hypot(1.0));
        let next = t - step;
        t = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(t)
}

/// Geodesic distance between the curve points at angles `t1` and `t2`.
pub fn spiral_geodesic_distance(t1: f64, t2: f64, a: f64) -> Result<f64> {
    if !(t1 >= 0.0) || !(t2 >= 0.0) {
        return Err(QdError::usage("spiral angles must be >= 0"));
    }
    Ok((arc_length_from_origin(t1, a) - arc_length_from_origin(t2, a)).abs())
}

/// Genotype encoding for the spiral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    /// Genotype is the angle `t`; Gaussian mutations skew outward.
    Angle,
    /// Genotype is the arc length `s`; Gaussian mutations stay isotropic on the curve.
    ArcLength,
}

#[derive(Clone, Debug)]
pub struct SpiralEnv {
    a: f64,
    alpha: f64,
    parametrization: Parametrization,
    start: Genotype,
    bounds: Bounds,
    total_length: f64,
}

impl SpiralEnv {
    pub const DEFAULT_A: f64 = 0.01;
    pub const DEFAULT_ALPHA: f64 = 30.0;

    /// Default start as a fraction of the angle range: 22 pi with the
    /// defaults, just beyond the arc-length midpoint (about 21.2 pi).
    pub const DEFAULT_START_FRACTION: f64 = 11.0 / 15.0;

    pub fn default_start_angle(alpha: f64) -> f64 {
        Self::DEFAULT_START_FRACTION * alpha * PI
    }

    /// `start_angle` defaults to [`SpiralEnv::default_start_angle`]; the
    /// start genotype in arc-length mode is the arc length of that same angle.
    pub fn new(
        a: f64,
        alpha: f64,
        parametrization: Parametrization,
        start_angle: Option<f64>,
    ) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(QdError::config("env.a", format!("must be > 0, got {a}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(QdError::config("env.alpha", format!("must be > 0, got {alpha}")));
        }
        let t_max = alpha * PI;
        let start_angle = start_angle.unwrap_or(Self::default_start_angle(alpha));
        if !(0.0..=t_max).contains(&start_angle) {
            return Err(QdError::config(
                "env.start_angle",
                format!("must lie in [0, {t_max}], got {start_angle}"),
            ));
        }
        let total_length = arc_length_from_origin(t_max, a);
        let (hi, start) = match parametrization {
            Parametrization::Angle => (t_max, start_angle),
            Parametrization::ArcLength => (total_length, arc_length_from_origin(start_angle, a)),
        };
        Ok(Self {
            a,
            alpha,
            parametrization,
            start: Genotype::new(vec![start]),
            bounds: Bounds::uniform(1, 0.0, hi),
            total_length,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn parametrization(&self) -> Parametrization {
        self.parametrization
    }

    pub fn max_angle(&self) -> f64 {
        self.alpha * PI
    }

    /// `S(0, alpha pi)`.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn start_genotype(&self) -> &Genotype {
        &self.start
    }

    /// Curve position `(t, s)` encoded by a genotype.
    pub fn curve_point(&self, g: &Genotype) -> Result<CurvePoint> {
        if g.dim() != 1 {
            return Err(QdError::usage(format!(
                "spiral genotypes are 1-D, got dimension {}",
                g.dim()
            )));
        }
        if !self.bounds.contains(g) {
            return Err(QdError::usage(format!(
                "spiral genotype {} outside {:?}",
                g.0[0], self.bounds
            )));
        }
        let v = g.0[0];
        Ok(match self.parametrization {
            Parametrization::Angle => CurvePoint {
                t: v,
                s: arc_length_from_origin(v, self.a),
            },
            Parametrization::ArcLength => CurvePoint {
                t: invert_arc_length(v, self.a)?,
                s: v,
            },
        })
    }
}

impl Environment for SpiralEnv {
    fn name(&self) -> &'static str {
        "spiral"
    }

    fn genotype_dim(&self) -> usize {
        1
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn behavior_dim(&self) -> usize {
        2
    }

    fn evaluate(&self, g: &Genotype) -> Result<Behavior> {
        let c = self.curve_point(g)?;
        let p = spiral_point(c.t, self.a)?;
        Ok(Behavior::on_curve(p.values, c))
    }

    fn coverage_value(&self, b: &Behavior) -> f64 {
        match b.curve {
            Some(c) => c.s,
            None => arc_length_from_origin(b.values[0].hypot(b.values[1]) / self.a, self.a),
        }
    }

    fn coverage_domain(&self) -> (f64, f64) {
        (0.0, self.total_length)
    }

    /// 50x50 cells over the bounding box of the curve.
    fn default_grid(&self) -> GridSpec {
        let samples = 100_000;
        let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
        for i in 0..=samples {
            let t = self.max_angle() * i as f64 / samples as f64;
            let (x, y) = (self.a * t * t.cos(), self.a * t * t.sin());
            lo = [lo[0].min(x), lo[1].min(y)];
            hi = [hi[0].max(x), hi[1].max(y)];
        }
        GridSpec::new(lo.to_vec(), hi.to_vec(), vec![50, 50]).expect("non-degenerate spiral box")
    }

    fn start(&self) -> StartDistribution {
        StartDistribution::Fixed(self.start.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature, used as an independent oracle.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * eps {
                left + right + delta / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, eps, 50)
    }

    fn quad_arc(t: f64, a: f64) -> f64 {
        simpson(&|u: f64| a * (u * u + 1.0).sqrt(), 0.0, t, 1e-13)
    }

    #[test]
    fn points_on_axes() {
        assert_eq!(spiral_point(0.0, 0.01).unwrap().values, vec![0.0, 0.0]);
        let p = spiral_point(2.0 * PI, 0.01).unwrap().values;
        assert!((p[0] - 0.02 * PI).abs() < 1e-15 && p[1].abs() < 1e-15);
        let q = spiral_point(PI / 2.0, 0.01).unwrap().values;
        assert!(q[0].abs() < 1e-15 && (q[1] - 0.005 * PI).abs() < 1e-15);
        assert!(spiral_point(-1.0, 0.01).is_err());
    }

    #[test]
    fn arc_length_examples() {
        assert_eq!(arc_length(3.0, 3.0, 0.01).unwrap(), 0.0);
        // oracle values computed by quadrature
        let unit = quad_arc(1.0, 1.0);
        assert!((unit - 1.147_793_574_696_319).abs() < 1e-12);
        assert!((arc_length(0.0, 1.0, 1.0).unwrap() - unit).abs() < 1e-12);
        let full = quad_arc(30.0 * PI, 0.01);
        assert!((full - 44.442).abs() < 1e-3, "{full}");
        assert!((arc_length(0.0, 30.0 * PI, 0.01).unwrap() - full).abs() < 1e-9 * (1.0 + full));
        assert!(arc_length(2.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let a = 0.01;
        for i in 0..1000 {
            let t = 30.0 * PI * i as f64 / 999.0;
            let closed = arc_length_from_origin(t, a);
            let quad = quad_arc(t, a);
            assert!((closed - quad).abs() <= 1e-9 * (1.0 + closed.abs()), "t={t}");
        }
    }

    #[test]
    fn inversion_round_trips() {
        let a = 0.01;
        assert_eq!(invert_arc_length(0.0, a).unwrap(), 0.0);
        let t = invert_arc_length(arc_length_from_origin(10.0, a), a).unwrap();
        assert!((t - 10.0).abs() < 1e-8);
        let t = invert_arc_length(arc_length_from_origin(30.0 * PI, a), a).unwrap();
        assert!((t - 30.0 * PI).abs() < 1e-7);
        assert!(invert_arc_length(-1.0, a).is_err());
        let total = arc_length_from_origin(30.0 * PI, a);
        let mut rng = crate::rng::RandomSource::new(77);
        for _ in 0..1000 {
            let s = rng.uniform() * total;
            let t = invert_arc_length(s, a).unwrap();
            assert!((arc_length_from_origin(t, a) - s).abs() <= 1e-8);
        }
    }

    #[test]
    fn inversion_for_other_scales() {
        for &a in &[1e-4, 0.5, 3.0] {
            for &s in &[1e-9, 1e-3, 0.7, 12.0, 900.0] {
                let t = invert_arc_length(s, a).unwrap();
                assert!((arc_length_from_origin(t, a) - s).abs() <= 1e-10 * s);
            }
        }
    }

    #[test]
    fn arc_length_is_strictly_increasing() {
        let mut prev = -1.0;
        for i in 0..10_000 {
            let s = arc_length_from_origin(30.0 * PI * i as f64 / 9_999.0, 0.01);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn geodesic_bounds_chord() {
        let a = 0.01;
        assert_eq!(spiral_geodesic_distance(4.0, 4.0, a).unwrap(), 0.0);
        let full = spiral_geodesic_distance(0.0, 30.0 * PI, a).unwrap();
        assert_eq!(full, arc_length(0.0, 30.0 * PI, a).unwrap());
        let mut rng = crate::rng::RandomSource::new(8);
        for _ in 0..10_000 {
            let t1 = rng.uniform() * 30.0 * PI;
            let t2 = rng.uniform() * 30.0 * PI;
            let chord = crate::metric::euclidean_distance(
                &spiral_point(t1, a).unwrap(),
                &spiral_point(t2, a).unwrap(),
            )
            .unwrap();
            let geo = spiral_geodesic_distance(t1, t2, a).unwrap();
            assert!(geo > chord || t1 == t2);
        }
    }

    #[test]
    fn evaluate_both_parametrizations() {
        let angle = SpiralEnv::new(0.01, 30.0, Parametrization::Angle, None).unwrap();
        let arc = SpiralEnv::new(0.01, 30.0, Parametrization::ArcLength, None).unwrap();
        assert_eq!(angle.evaluate(&Genotype::new(vec![0.0])).unwrap().values, vec![0.0, 0.0]);
        assert_eq!(arc.evaluate(&Genotype::new(vec![0.0])).unwrap().values, vec![0.0, 0.0]);
        let s = arc_length_from_origin(2.0 * PI, 0.01);
        let p = arc.evaluate(&Genotype::new(vec![s])).unwrap();
        assert!((p.values[0] - 0.02 * PI).abs() < 1e-9 && p.values[1].abs() < 1e-9);
        assert!(angle.evaluate(&Genotype::new(vec![-0.1])).is_err());
        assert!(angle.evaluate(&Genotype::new(vec![100.0])).is_err());
        assert!(angle.evaluate(&Genotype::new(vec![1.0, 2.0])).is_err());
        assert!((arc.total_length() - 44.442).abs() < 1e-3);
    }

    #[test]
    fn both_start_points_coincide() {
        let angle = SpiralEnv::new(0.01, 30.0, Parametrization::Angle, None).unwrap();
        let arc = SpiralEnv::new(0.01, 30.0, Parametrization::ArcLength, None).unwrap();
        let t = angle.start_genotype().0[0];
        assert!((t - 22.0 * PI).abs() < 1e-12);
        // outside the arc-length midpoint
        assert!(arc.start_genotype().0[0] > 0.5 * arc.total_length());
        let pa = angle.evaluate(angle.start_genotype()).unwrap();
        let pb = arc.evaluate(arc.start_genotype()).unwrap();
        assert!((pa.values[0] - pb.values[0]).abs() < 1e-9);
        assert!((pa.values[1] - pb.values[1]).abs() < 1e-9);
    }
}
