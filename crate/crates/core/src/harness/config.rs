//! Experiment configuration documents: parsing, defaults and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algorithms::{AlgorithmConfig, ArchiveConfig, MapElitesConfig, NoveltyPool, NsConfig};
use crate::analysis::{CoverageSpec, DEFAULT_STALL_THRESHOLD};
use crate::archives::{GridPolicy, GridSpec};
use crate::environments::{
    DeceptiveEnv, DeceptiveParams, Env, Environment, Parametrization, SpiralEnv, SsfEnv, SsfOutput,
};
use crate::error::{QdError, Result};
use crate::metric::DistanceMetric;

/// Fully resolved environment parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum EnvSpec {
    Spiral {
        a: f64,
        alpha: f64,
        parametrization: Parametrization,
        start_angle: f64,
    },
    Ssf {
        order: usize,
        max_band_index: usize,
        output: SsfOutput,
    },
    Deceptive {
        #[serde(flatten)]
        params: DeceptiveParams,
        allow_invalid_argmax: bool,
    },
}

impl EnvSpec {
    pub fn build(&self) -> Result<Env> {
        Ok(match self {
            EnvSpec::Spiral {
                a,
                alpha,
                parametrization,
                start_angle,
            } => Env::Spiral(SpiralEnv::new(*a, *alpha, *parametrization, Some(*start_angle))?),
            EnvSpec::Ssf {
                order,
                max_band_index,
                output,
            } => Env::Ssf(SsfEnv::new(*order, *max_band_index, *output)?),
            EnvSpec::Deceptive {
                params,
                allow_invalid_argmax,
            } => Env::Deceptive(DeceptiveEnv::new(params.clone(), *allow_invalid_argmax)?),
        })
    }

    pub fn spiral(parametrization: Parametrization) -> Self {
        EnvSpec::Spiral {
            a: SpiralEnv::DEFAULT_A,
            alpha: SpiralEnv::DEFAULT_ALPHA,
            parametrization,
            start_angle: SpiralEnv::default_start_angle(SpiralEnv::DEFAULT_ALPHA),
        }
    }

    pub fn ssf(order: usize) -> Self {
        EnvSpec::Ssf {
            order,
            max_band_index: SsfEnv::DEFAULT_MAX_BAND_INDEX,
            output: SsfOutput::RadialScalar,
        }
    }

    pub fn deceptive() -> Self {
        EnvSpec::Deceptive {
            params: DeceptiveParams::default(),
            allow_invalid_argmax: false,
        }
    }

    /// Mutation sigma used when the algorithm section gives none.
    pub fn default_sigma(&self) -> f64 {
        match self {
            EnvSpec::Spiral { .. } => 0.3,
            EnvSpec::Ssf { .. } => 20.0,
            EnvSpec::Deceptive { params, .. } => 0.05 * params.var2.sqrt(),
        }
    }

    fn default_archive(&self) -> ArchiveConfig {
        match self {
            EnvSpec::Spiral { .. } => ArchiveConfig::None,
            _ => ArchiveConfig::Unstructured { max_size: Some(200) },
        }
    }

    fn default_metric(&self) -> DistanceMetric {
        DistanceMetric::Euclidean
    }
}

/// Analysis settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub bins: usize,
    pub archive_only: bool,
    pub stall_threshold: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            bins: CoverageSpec::DEFAULT_BINS,
            archive_only: false,
            stall_threshold: DEFAULT_STALL_THRESHOLD,
        }
    }
}

/// A validated experiment: one environment, one algorithm, many seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvSpec,
    pub algorithm: AlgorithmConfig,
    pub seeds: Vec<u64>,
    pub g_max: usize,
    pub analysis: AnalysisSpec,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Checks cross-field constraints and that the environment builds.
    pub fn validate(&self) -> Result<Env> {
        if self.seeds.is_empty() {
            return Err(QdError::config("seeds", "at least one seed is required"));
        }
        self.algorithm.validate()?;
        let env = self.env.build()?;
        if let AlgorithmConfig::Ns(ns) = &self.algorithm {
            if let DistanceMetric::GeodesicSpiral { a } = ns.metric {
                match &self.env {
                    EnvSpec::Spiral { a: env_a, .. } if *env_a == a => {}
                    _ => {
                        return Err(QdError::config(
                            "algorithm.metric",
                            "geodesic-spiral needs a spiral environment with the same scale",
                        ))
                    }
                }
            }
        }
        let grid = match &self.algorithm {
            AlgorithmConfig::Ns(ns) => match &ns.archive {
                ArchiveConfig::Grid { grid: Some(g), .. } => Some(("algorithm.archive.grid", g)),
                _ => None,
            },
            AlgorithmConfig::MapElites(me) => me.grid.as_ref().map(|g| ("algorithm.grid", g)),
        };
        if let Some((path, g)) = grid {
            if g.dim() != env.behavior_dim() {
                return Err(QdError::config(
                    path,
                    format!("grid has {} dimensions, behaviors have {}", g.dim(), env.behavior_dim()),
                ));
            }
        }
        self.coverage_spec(&env)?;
        Ok(env)
    }

    pub fn coverage_spec(&self, env: &Env) -> Result<CoverageSpec> {
        CoverageSpec::for_env(env, self.analysis.bins)
    }
}

// ---- raw document -------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    env: RawEnv,
    algorithm: Option<RawAlgorithm>,
    seeds: Option<RawSeeds>,
    g_max: Option<usize>,
    output_dir: Option<PathBuf>,
    workers: Option<usize>,
    analysis: Option<RawAnalysis>,
}

#[derive(Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
enum RawEnv {
    Spiral {
        a: Option<f64>,
        alpha: Option<f64>,
        parametrization: Option<Parametrization>,
        start_angle: Option<f64>,
    },
    Ssf {
        order: Option<usize>,
        max_band_index: Option<usize>,
        output: Option<SsfOutput>,
    },
    Deceptive {
        side: Option<f64>,
        mu1: Option<[f64; 2]>,
        mu2: Option<[f64; 2]>,
        var1: Option<f64>,
        var2: Option<f64>,
        beta: Option<f64>,
        allow_invalid_argmax: Option<bool>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMetric {
    Name(String),
    Full(DistanceMetric),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawAlgorithm {
    Ns {
        population_size: Option<usize>,
        offspring_size: Option<usize>,
        k: Option<usize>,
        metric: Option<RawMetric>,
        archive: Option<ArchiveConfig>,
        resample_from_archive: Option<bool>,
        sigma: Option<f64>,
        novelty_pool: Option<NoveltyPool>,
        archive_add_most_novel: Option<usize>,
        archive_add_random: Option<usize>,
    },
    MapElites {
        grid: Option<GridSpec>,
        policy: Option<GridPolicy>,
        batch_size: Option<usize>,
        initial_batch: Option<usize>,
        sigma: Option<f64>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSeeds {
    List(Vec<u64>),
    Range { base: u64, runs: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    bins: Option<usize>,
    archive_only: Option<bool>,
    stall_threshold: Option<usize>,
}

/// Command-line overrides applied on top of a document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub allow_invalid_argmax: bool,
}

/// Reads and validates a configuration document. Run manifests are accepted
/// too: their embedded `config` member is used.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| QdError::io(path, e))?;
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    parse_config(&text, &default_name, overrides)
}

/// Parses a configuration document from text.
pub fn parse_config(text: &str, default_name: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| QdError::Parse(e.to_string()))?;
    if doc.get("toolkit_version").is_some() {
        if let Some(cfg) = doc.get("config") {
            doc = cfg.clone();
        }
    }
    if let Some(env) = doc.get_mut("env") {
        if let Value::String(name) = env {
            *env = serde_json::json!({ "name": name.clone() });
        }
    }
    let raw: RawConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        QdError::Config {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    resolve(raw, default_name, overrides)
}

fn resolve(raw: RawConfig, default_name: &str, ov: &Overrides) -> Result<ExperimentConfig> {
    let env = match raw.env {
        RawEnv::Spiral {
            a,
            alpha,
            parametrization,
            start_angle,
        } => {
            let a = a.unwrap_or(SpiralEnv::DEFAULT_A);
            let alpha = alpha.unwrap_or(SpiralEnv::DEFAULT_ALPHA);
            EnvSpec::Spiral {
                a,
                alpha,
                parametrization: parametrization.unwrap_or(Parametrization::Angle),
                start_angle: start_angle.unwrap_or(SpiralEnv::default_start_angle(alpha)),
            }
        }
        RawEnv::Ssf {
            order,
            max_band_index,
            output,
        } => EnvSpec::Ssf {
            order: order.unwrap_or(1),
            max_band_index: max_band_index.unwrap_or(SsfEnv::DEFAULT_MAX_BAND_INDEX),
            output: output.unwrap_or(SsfOutput::RadialScalar),
        },
        RawEnv::Deceptive {
            side,
            mu1,
            mu2,
            var1,
            var2,
            beta,
            allow_invalid_argmax,
        } => {
            let d = DeceptiveParams::default();
            let var1 = var1.unwrap_or(d.var1);
            let var2 = var2.unwrap_or(d.var2);
            EnvSpec::Deceptive {
                params: DeceptiveParams {
                    side: side.unwrap_or(d.side),
                    mu1: mu1.unwrap_or(d.mu1),
                    mu2: mu2.unwrap_or(d.mu2),
                    var1,
                    var2,
                    beta: beta.unwrap_or(1.5 * var2 / var1),
                },
                allow_invalid_argmax: allow_invalid_argmax.unwrap_or(false) || ov.allow_invalid_argmax,
            }
        }
    };

    let algorithm = match raw.algorithm.unwrap_or(RawAlgorithm::Ns {
        population_size: None,
        offspring_size: None,
        k: None,
        metric: None,
        archive: None,
        resample_from_archive: None,
        sigma: None,
        novelty_pool: None,
        archive_add_most_novel: None,
        archive_add_random: None,
    }) {
        RawAlgorithm::Ns {
            population_size,
            offspring_size,
            k,
            metric,
            archive,
            resample_from_archive,
            sigma,
            novelty_pool,
            archive_add_most_novel,
            archive_add_random,
        } => {
            let mut c = NsConfig::new(sigma.unwrap_or_else(|| env.default_sigma()));
            c.population_size = population_size.unwrap_or(c.population_size);
            c.offspring_size = offspring_size.unwrap_or(c.offspring_size);
            c.k = k.unwrap_or(c.k);
            c.metric = match metric {
                None => env.default_metric(),
                Some(RawMetric::Full(m)) => m,
                Some(RawMetric::Name(n)) => match (n.as_str(), &env) {
                    ("euclidean", _) => DistanceMetric::Euclidean,
                    ("geodesic-spiral" | "geodesic", EnvSpec::Spiral { a, .. }) => {
                        DistanceMetric::GeodesicSpiral { a: *a }
                    }
                    _ => {
                        return Err(QdError::config(
                            "algorithm.metric",
                            format!("unknown or unsupported metric `{n}`"),
                        ))
                    }
                },
            };
            c.archive = archive.unwrap_or_else(|| env.default_archive());
            c.resample_from_archive = resample_from_archive.unwrap_or(false);
            c.novelty_pool = novelty_pool.unwrap_or_default();
            c.archive_add_most_novel = archive_add_most_novel.unwrap_or(c.archive_add_most_novel);
            c.archive_add_random = archive_add_random.unwrap_or(c.archive_add_random);
            AlgorithmConfig::Ns(c)
        }
        RawAlgorithm::MapElites {
            grid,
            policy,
            batch_size,
            initial_batch,
            sigma,
        } => {
            let mut c = MapElitesConfig::new(sigma.unwrap_or_else(|| env.default_sigma()));
            c.grid = grid;
            c.policy = policy.unwrap_or_default();
            c.batch_size = batch_size.unwrap_or(c.batch_size);
            c.initial_batch = initial_batch.unwrap_or(c.initial_batch);
            AlgorithmConfig::MapElites(c)
        }
    };

    let mut seeds = match raw.seeds {
        None => vec![0],
        Some(RawSeeds::List(v)) => v,
        Some(RawSeeds::Range { base, runs }) => (0..runs as u64).map(|i| base + i).collect(),
    };
    if ov.seed.is_some() || ov.runs.is_some() {
        let base = ov.seed.unwrap_or_else(|| seeds.first().copied().unwrap_or(0));
        let runs = ov.runs.unwrap_or(seeds.len());
        seeds = (0..runs as u64).map(|i| base + i).collect();
    }

    let analysis = match raw.analysis {
        None => AnalysisSpec::default(),
        Some(a) => {
            let d = AnalysisSpec::default();
            AnalysisSpec {
                bins: a.bins.unwrap_or(d.bins),
                archive_only: a.archive_only.unwrap_or(d.archive_only),
                stall_threshold: a.stall_threshold.unwrap_or(d.stall_threshold),
            }
        }
    };

    let cfg = ExperimentConfig {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        env,
        algorithm,
        seeds,
        g_max: raw.g_max.unwrap_or(1000),
        analysis,
        output_dir: ov
            .output_dir
            .clone()
            .or(raw.output_dir)
            .unwrap_or_else(|| PathBuf::from("results")),
        workers: ov.workers.or(raw.workers),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Environment-derived constants recorded in run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spiral_total_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spiral_start_genotype: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssf_radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2_total: Option<f64>,
    /// Single-component peak densities at the two means.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component_peaks: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_saddle: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_holds: Option<bool>,
    pub coverage: CoverageSpec,
}

impl DerivedConstants {
    pub fn of(env: &Env, coverage: CoverageSpec) -> Self {
        let mut d = DerivedConstants {
            spiral_total_length: None,
            spiral_start_genotype: None,
            ssf_radii: None,
            m1: None,
            m2_total: None,
            component_peaks: None,
            x_saddle: None,
            argmax_holds: None,
            coverage,
        };
        match env {
            Env::Spiral(s) => {
                d.spiral_total_length = Some(s.total_length());
                d.spiral_start_genotype = Some(s.start_genotype().0[0]);
            }
            Env::Ssf(s) => d.ssf_radii = Some((0..=16).map(|i| s.radius(i)).collect()),
            Env::Deceptive(e) => {
                let (m1, m2) = e.reachable_interval();
                let (p1, p2) = e.component_peaks();
                d.m1 = Some(m1);
                d.m2_total = Some(m2);
                d.component_peaks = Some([p1, p2]);
                d.x_saddle = Some(e.saddle());
                d.argmax_holds = Some(e.argmax_holds());
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config(text, "test", &Overrides::default())
    }

    #[test]
    fn minimal_config_materializes_defaults() {
        let c = parse(r#"{"env": "spiral"}"#).unwrap();
        assert_eq!(c.env, EnvSpec::spiral(Parametrization::Angle));
        assert_eq!(c.g_max, 1000);
        assert_eq!(c.seeds, vec![0]);
        let AlgorithmConfig::Ns(ns) = &c.algorithm else { panic!() };
        assert_eq!((ns.population_size, ns.offspring_size, ns.k), (30, 30, 10));
        assert_eq!(ns.sigma, 0.3);
        assert_eq!(ns.archive, ArchiveConfig::None);
    }

    #[test]
    fn negative_sigma_names_its_key() {
        let err = parse(r#"{"env": "spiral", "algorithm": {"kind": "ns", "sigma": -1}}"#).unwrap_err();
        match err {
            QdError::Config { path, .. } => assert_eq!(path, "algorithm.sigma"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = parse(r#"{"env": {"name": "spiral", "alhpa": 3}}"#).unwrap_err();
        assert!(matches!(err, QdError::Config { ref path, .. } if path.starts_with("env")), "{err}");
        let err = parse(r#"{"env": "ssf", "algorithm": {"kind": "ns", "sigmaa": 2}}"#).unwrap_err();
        assert!(matches!(err, QdError::Config { ref path, .. } if path.starts_with("algorithm")), "{err}");
        assert!(parse(r#"{"env": "ssf", "gmax": 3}"#).is_err());
        assert!(matches!(parse("{not json"), Err(QdError::Parse(_))));
    }

    #[test]
    fn caption_parameters_need_override() {
        let doc = r#"{"env": {"name": "deceptive", "var1": 70, "var2": 10000, "beta": 20}}"#;
        let err = parse(doc).unwrap_err();
        assert!(err.to_string().contains("argmax"), "{err}");
        let ok = parse_config(
            doc,
            "t",
            &Overrides {
                allow_invalid_argmax: true,
                ..Default::default()
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn seeds_and_overrides() {
        let c = parse(r#"{"env": "ssf", "seeds": {"base": 10, "runs": 3}}"#).unwrap();
        assert_eq!(c.seeds, vec![10, 11, 12]);
        let c = parse(r#"{"env": "ssf", "seeds": [4, 2]}"#).unwrap();
        assert_eq!(c.seeds, vec![4, 2]);
        let c = parse_config(
            r#"{"env": "ssf"}"#,
            "t",
            &Overrides {
                seed: Some(7),
                runs: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.seeds, vec![7, 8]);
        assert!(parse(r#"{"env": "ssf", "seeds": []}"#).is_err());
    }

    #[test]
    fn metric_names() {
        let c = parse(r#"{"env": {"name": "spiral", "a": 0.02}, "algorithm": {"kind": "ns", "metric": "geodesic-spiral"}}"#).unwrap();
        let AlgorithmConfig::Ns(ns) = c.algorithm else { panic!() };
        assert_eq!(ns.metric, DistanceMetric::GeodesicSpiral { a: 0.02 });
        assert!(parse(r#"{"env": "ssf", "algorithm": {"kind": "ns", "metric": "geodesic"}}"#).is_err());
    }

    #[test]
    fn map_elites_and_grids() {
        let c = parse(
            r#"{"env": "deceptive", "algorithm": {"kind": "map-elites", "sigma": 10,
                "grid": {"lows": [0], "highs": [0.004], "cells": [50]}}}"#,
        )
        .unwrap();
        assert!(matches!(c.algorithm, AlgorithmConfig::MapElites(_)));
        let bad = parse(
            r#"{"env": "deceptive", "algorithm": {"kind": "map-elites",
                "grid": {"lows": [0, 0], "highs": [1, 1], "cells": [5, 5]}}}"#,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn resolved_config_round_trips_through_the_parser() {
        let c = parse(r#"{"env": "deceptive", "algorithm": {"kind": "ns", "archive": {"kind": "grid"}}}"#).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let again = parse(&text).unwrap();
        assert_eq!(c, again);
    }
}
