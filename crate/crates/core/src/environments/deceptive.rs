//! Two-component isotropic Gaussian mixture over a square genotype domain.
//!
//! The narrow component is steep and therefore highly evolvable; the wide,
//! heavier component holds the global maximum. Populations start at the
//! saddle between them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Environment, StartDistribution};
use crate::archives::GridSpec;
use crate::error::{QdError, Result};
use crate::types::{Behavior, Bounds, Genotype};

/// Mixture parameters. `var1`/`var2` are the component variances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeceptiveParams {
    pub side: f64,
    pub mu1: [f64; 2],
    pub mu2: [f64; 2],
    pub var1: f64,
    pub var2: f64,
    pub beta: f64,
}

impl Default for DeceptiveParams {
    fn default() -> Self {
        let (var1, var2) = (70.0, 1e4);
        Self {
            side: 600.0,
            mu1: [150.0, 300.0],
            mu2: [450.0, 300.0],
            var1,
            var2,
            beta: 1.5 * var2 / var1,
        }
    }
}

impl DeceptiveParams {
    /// The commonly quoted illustration values (beta = 20). They do not make `mu2` the
    /// global maximum under normalized densities.
    pub fn caption() -> Self {
        Self {
            beta: 20.0,
            ..Self::default()
        }
    }

    fn component(x: [f64; 2], mu: [f64; 2], var: f64) -> f64 {
        let d2 = (x[0] - mu[0]).powi(2) + (x[1] - mu[1]).powi(2);
        (-d2 / (2.0 * var)).exp() / (2.0 * PI * var)
    }

    pub fn density(&self, x: [f64; 2]) -> f64 {
        Self::component(x, self.mu1, self.var1) + self.beta * Self::component(x, self.mu2, self.var2)
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (mu, var, w) in [(self.mu1, self.var1, 1.0), (self.mu2, self.var2, self.beta)] {
            let c = w * Self::component(x, mu, var) / var;
            g[0] -= c * (x[0] - mu[0]);
            g[1] -= c * (x[1] - mu[1]);
        }
        g
    }

    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for (mu, var, w) in [(self.mu1, self.var1, 1.0), (self.mu2, self.var2, self.beta)] {
            let n = w * Self::component(x, mu, var);
            let d = [x[0] - mu[0], x[1] - mu[1]];
            for i in 0..2 {
                for j in 0..2 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    h[i][j] += n * (d[i] * d[j] / (var * var) - delta / var);
                }
            }
        }
        h
    }

    /// Saddle point on the open segment between the two means, where the
    /// derivative along the segment turns from negative to positive.
    pub fn saddle(&self) -> Result<[f64; 2]> {
        let dir = [self.mu2[0] - self.mu1[0], self.mu2[1] - self.mu1[1]];
        let at = |u: f64| [self.mu1[0] + u * dir[0], self.mu1[1] + u * dir[1]];
        let slope = |u: f64| {
            let g = self.gradient(at(u));
            g[0] * dir[0] + g[1] * dir[1]
        };
        let steps = 20_000;
        let mut bracket = None;
        let mut prev_u = 1.0 / steps as f64;
        let mut prev = slope(prev_u);
        for i in 2..steps {
            let u = i as f64 / steps as f64;
            let s = slope(u);
            if prev < 0.0 && s >= 0.0 {
                bracket = Some((prev_u, u));
                break;
            }
            prev_u = u;
            prev = s;
        }
        let (mut lo, mut hi) = bracket.ok_or_else(|| {
            QdError::config(
                "env",
                "mixture has no saddle between the means (degenerate configuration)",
            )
        })?;
        // Bisection to the last representable u.
        while hi - lo > f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = if slope(lo).abs() <= slope(hi).abs() { lo } else { hi };
        Ok(at(u))
    }
}

/// Mixture environment with validated parameters and derived constants.
#[derive(Clone, Debug)]
pub struct DeceptiveEnv {
    params: DeceptiveParams,
    m1: f64,
    m2_total: f64,
    saddle: [f64; 2],
    bounds: Bounds,
}

impl DeceptiveEnv {
    /// Validates the parameters. Unless `allow_invalid_argmax` is set, the
    /// density at `mu2` must exceed the density at `mu1`.
    pub fn new(params: DeceptiveParams, allow_invalid_argmax: bool) -> Result<Self> {
        let p = &params;
        if !(p.side > 0.0) || !p.side.is_finite() {
            return Err(QdError::config("env.side", "must be > 0"));
        }
        if !(p.var1 > 0.0) || !(p.var2 > 0.0) {
            return Err(QdError::config("env.var1", "variances must be > 0"));
        }
        if !(p.var1 < p.var2) {
            return Err(QdError::config(
                "env.var1",
                format!("var1 ({}) must be strictly smaller than var2 ({})", p.var1, p.var2),
            ));
        }
        if !(p.beta > 0.0) || !p.beta.is_finite() {
            return Err(QdError::config("env.beta", "must be > 0"));
        }
        let inside = |x: [f64; 2]| x.iter().all(|v| (0.0..=p.side).contains(v));
        if !inside(p.mu1) {
            return Err(QdError::config("env.mu1", "must lie inside [0, side]^2"));
        }
        if !inside(p.mu2) {
            return Err(QdError::config("env.mu2", "must lie inside [0, side]^2"));
        }
        if p.mu1 == p.mu2 {
            return Err(QdError::config("env.mu2", "means must differ"));
        }
        let m1 = p.density(p.mu1);
        let m2_total = p.density(p.mu2);
        if !(m2_total > m1) && !allow_invalid_argmax {
            return Err(QdError::config(
                "env.beta",
                format!(
                    "argmax constraint violated: density at mu2 ({m2_total:.6e}) must exceed \
                     density at mu1 ({m1:.6e}); raise beta or pass --allow-invalid-argmax"
                ),
            ));
        }
        let saddle = p.saddle()?;
        if !inside(saddle) {
            return Err(QdError::config("env", "saddle point lies outside the domain"));
        }
        Ok(Self {
            bounds: Bounds::uniform(2, 0.0, p.side),
            params,
            m1,
            m2_total,
            saddle,
        })
    }

    pub fn params(&self) -> &DeceptiveParams {
        &self.params
    }

    pub fn saddle(&self) -> [f64; 2] {
        self.saddle
    }

    /// Mixture values at the two means: `(M1, M2_total)`.
    pub fn reachable_interval(&self) -> (f64, f64) {
        (self.m1, self.m2_total)
    }

    /// Single-component peak densities `(1/(2 pi var1), 1/(2 pi var2))`.
    pub fn component_peaks(&self) -> (f64, f64) {
        (
            1.0 / (2.0 * PI * self.params.var1),
            1.0 / (2.0 * PI * self.params.var2),
        )
    }

    pub fn sigma2(&self) -> f64 {
        self.params.var2.sqrt()
    }

    pub fn argmax_holds(&self) -> bool {
        self.m2_total > self.m1
    }
}

impl Environment for DeceptiveEnv {
    fn name(&self) -> &'static str {
        "deceptive"
    }

    fn genotype_dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn behavior_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, g: &Genotype) -> Result<Behavior> {
        if g.dim() != 2 || !self.bounds.contains(g) {
            return Err(QdError::usage(format!(
                "deceptive genotype {:?} outside [0, {}]^2",
                g.0, self.params.side
            )));
        }
        Ok(Behavior::new(vec![self.params.density([g.0[0], g.0[1]])]))
    }

    fn coverage_value(&self, b: &Behavior) -> f64 {
        b.values[0]
    }

    fn coverage_domain(&self) -> (f64, f64) {
        (0.0, self.m2_total.max(self.m1))
    }

    /// 100 cells over `[0, M2_total]`.
    fn default_grid(&self) -> GridSpec {
        GridSpec::new(vec![0.0], vec![self.coverage_domain().1], vec![100]).expect("valid grid")
    }

    fn start(&self) -> StartDistribution {
        StartDistribution::Gaussian {
            center: Genotype::new(self.saddle.to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Density written out independently of the implementation.
    fn oracle_density(p: &DeceptiveParams, x: [f64; 2]) -> f64 {
        let n = |mu: [f64; 2], v: f64| {
            let dx = x[0] - mu[0];
            let dy = x[1] - mu[1];
            1.0 / (2.0 * PI * v) * (-(dx * dx + dy * dy) / (2.0 * v)).exp()
        };
        n(p.mu1, p.var1) + p.beta * n(p.mu2, p.var2)
    }

    fn fd_gradient(p: &DeceptiveParams, x: [f64; 2], h: f64) -> [f64; 2] {
        [
            (oracle_density(p, [x[0] + h, x[1]]) - oracle_density(p, [x[0] - h, x[1]])) / (2.0 * h),
            (oracle_density(p, [x[0], x[1] + h]) - oracle_density(p, [x[0], x[1] - h])) / (2.0 * h),
        ]
    }

    fn fd_hessian(p: &DeceptiveParams, x: [f64; 2], h: f64) -> [[f64; 2]; 2] {
        let f = |dx: f64, dy: f64| oracle_density(p, [x[0] + dx, x[1] + dy]);
        let fxx = (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h);
        let fyy = (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h);
        let fxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        [[fxx, fxy], [fxy, fyy]]
    }

    #[test]
    fn density_at_origin_matches_formula() {
        let p = DeceptiveParams {
            side: 600.0,
            mu1: [0.0, 0.0],
            mu2: [100.0, 0.0],
            var1: 70.0,
            var2: 1e4,
            beta: 20.0,
        };
        let v = p.density([0.0, 0.0]);
        assert!((v - 0.002_466_7).abs() < 5e-8, "{v}");
        assert!((v - oracle_density(&p, [0.0, 0.0])).abs() < 1e-18);
        assert!(p.density([1e4, 1e4]) >= 0.0);
        assert!(p.density([300.0, 0.0]) > 0.0);
    }

    #[test]
    fn default_parameters_satisfy_argmax() {
        let env = DeceptiveEnv::new(DeceptiveParams::default(), false).unwrap();
        let (m1, m2) = env.reachable_interval();
        assert!(m2 > m1);
        assert_eq!(m1, oracle_density(env.params(), env.params().mu1));
        assert_eq!(m2, oracle_density(env.params(), env.params().mu2));
        // about one third of [0, M2] lies above M1
        let frac = (m2 - m1) / m2;
        assert!((frac - 1.0 / 3.0).abs() < 0.02, "{frac}");
    }

    #[test]
    fn caption_parameters_violate_argmax() {
        let p = DeceptiveParams::caption();
        assert!(oracle_density(&p, p.mu1) > oracle_density(&p, p.mu2));
        let err = DeceptiveEnv::new(p.clone(), false).unwrap_err();
        assert!(matches!(err, QdError::Config { ref path, .. } if path == "env.beta"));
        let env = DeceptiveEnv::new(p, true).unwrap();
        assert!(!env.argmax_holds());
    }

    #[test]
    fn rejects_bad_geometry() {
        let swap = DeceptiveParams { var1: 1e4, var2: 70.0, ..Default::default() };
        assert!(DeceptiveEnv::new(swap, false).is_err());
        let outside = DeceptiveParams { mu2: [700.0, 300.0], ..Default::default() };
        assert!(DeceptiveEnv::new(outside, false).is_err());
    }

    #[test]
    fn ratio_grows_with_beta() {
        let mut last = 0.0;
        for beta in [300.0, 3e3, 3e4, 3e5] {
            let p = DeceptiveParams { beta, ..Default::default() };
            let ratio = p.density(p.mu2) / p.density(p.mu1);
            assert!(ratio > last);
            last = ratio;
        }
        assert!(last > 50.0);
        // so heavy that the narrow mode is swallowed: no saddle remains
        let p = DeceptiveParams { beta: 3e5, ..Default::default() };
        assert!(DeceptiveEnv::new(p, false).is_err());
    }

    #[test]
    fn symmetric_saddle_is_midpoint() {
        let p = DeceptiveParams {
            side: 100.0,
            mu1: [20.0, 50.0],
            mu2: [80.0, 50.0],
            var1: 200.0,
            var2: 200.0,
            beta: 1.0,
        };
        let s = p.saddle().unwrap();
        assert!((s[0] - 50.0).abs() < 1e-6 && (s[1] - 50.0).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn saddle_conditions_hold() {
        let env = DeceptiveEnv::new(DeceptiveParams::default(), false).unwrap();
        let x = env.saddle();
        let g = env.params().gradient(x);
        assert!(g[0].hypot(g[1]) <= 1e-10);
        let fd = fd_gradient(env.params(), x, 1e-5);
        assert!(fd[0].hypot(fd[1]) <= 1e-10, "{fd:?}");
        let h = fd_hessian(env.params(), x, 1e-2);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        assert!(det < 0.0, "{h:?}");
        let ha = env.params().hessian(x);
        assert!(ha[0][0] * ha[1][1] - ha[0][1] * ha[1][0] < 0.0);
        // strictly between the means
        assert!(x[0] > 150.0 && x[0] < 450.0);
    }
}
