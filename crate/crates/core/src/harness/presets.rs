//! Experiment grids behind the `--preset` names.

use std::path::PathBuf;

use super::config::{AnalysisSpec, EnvSpec, ExperimentConfig};
use crate::algorithms::{AlgorithmConfig, ArchiveConfig, MapElitesConfig, NsConfig};
use crate::environments::{Parametrization, SpiralEnv};
use crate::error::{QdError, Result};
use crate::metric::DistanceMetric;

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig5", "fig7", "fig8"];

fn experiment(name: &str, env: EnvSpec, algorithm: AlgorithmConfig, runs: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        env,
        algorithm,
        seeds: (0..runs as u64).collect(),
        g_max: 1000,
        analysis: AnalysisSpec::default(),
        output_dir: PathBuf::from("results"),
        workers: None,
    }
}

fn spiral_ns(metric: DistanceMetric, archive: ArchiveConfig, resample: bool) -> AlgorithmConfig {
    let mut c = NsConfig::new(0.3);
    c.metric = metric;
    c.archive = archive;
    c.resample_from_archive = resample;
    AlgorithmConfig::Ns(c)
}

/// Archive-less NS in the four metric x parametrization settings.
pub fn fig2() -> Vec<ExperimentConfig> {
    let geodesic = DistanceMetric::GeodesicSpiral { a: SpiralEnv::DEFAULT_A };
    let mut out = Vec::new();
    for (mname, metric) in [("euclidean", DistanceMetric::Euclidean), ("geodesic", geodesic)] {
        for (pname, p) in [("angle", Parametrization::Angle), ("arc-length", Parametrization::ArcLength)] {
            out.push(experiment(
                &format!("fig2-{mname}-{pname}"),
                EnvSpec::spiral(p),
                spiral_ns(metric, ArchiveConfig::None, false),
                20,
            ));
        }
    }
    out
}

/// Archive variants with the Euclidean metric and the angle genotype.
pub fn fig3() -> Vec<ExperimentConfig> {
    let env = EnvSpec::spiral(Parametrization::Angle);
    let unstructured = |n| ArchiveConfig::Unstructured { max_size: Some(n) };
    let grid = ArchiveConfig::Grid {
        grid: None,
        policy: Default::default(),
    };
    [
        ("fig3-unstructured-100", unstructured(100), false),
        ("fig3-unstructured-200", unstructured(200), false),
        ("fig3-unstructured-3000", unstructured(3000), false),
        ("fig3-structured", grid.clone(), false),
        ("fig3-unstructured-200-resample", unstructured(200), true),
        ("fig3-structured-resample", grid, true),
    ]
    .into_iter()
    .map(|(name, archive, resample)| {
        experiment(name, env.clone(), spiral_ns(DistanceMetric::Euclidean, archive, resample), 20)
    })
    .collect()
}

/// SSF of order 1 at sigma 20 and 50, NS and MAP-Elites.
pub fn fig5() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for sigma in [20.0, 50.0] {
        let mut ns = NsConfig::new(sigma);
        ns.archive = ArchiveConfig::Unstructured { max_size: Some(200) };
        out.push(experiment(&format!("fig5-ns-sigma{sigma}"), EnvSpec::ssf(1), AlgorithmConfig::Ns(ns), 20));
    }
    for sigma in [20.0, 50.0] {
        out.push(experiment(
            &format!("fig5-map-elites-sigma{sigma}"),
            EnvSpec::ssf(1),
            AlgorithmConfig::MapElites(MapElitesConfig::new(sigma)),
            20,
        ));
    }
    out
}

fn sigma2() -> f64 {
    match EnvSpec::deceptive() {
        EnvSpec::Deceptive { params, .. } => params.var2.sqrt(),
        _ => unreachable!(),
    }
}

/// NS on the deceptive mixture at 3%, 5% and 10% of sigma2.
pub fn fig7() -> Vec<ExperimentConfig> {
    [3, 5, 10]
        .into_iter()
        .map(|pct| {
            let mut ns = NsConfig::new(pct as f64 / 100.0 * sigma2());
            ns.archive = ArchiveConfig::Unstructured { max_size: Some(200) };
            experiment(&format!("fig7-ns-{pct}pct"), EnvSpec::deceptive(), AlgorithmConfig::Ns(ns), 40)
        })
        .collect()
}

/// MAP-Elites on the deceptive mixture at 5% and 10% of sigma2.
pub fn fig8() -> Vec<ExperimentConfig> {
    [5, 10]
        .into_iter()
        .map(|pct| {
            let me = MapElitesConfig::new(pct as f64 / 100.0 * sigma2());
            experiment(
                &format!("fig8-map-elites-{pct}pct"),
                EnvSpec::deceptive(),
                AlgorithmConfig::MapElites(me),
                40,
            )
        })
        .collect()
}

pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    Ok(match name {
        "fig2" => fig2(),
        "fig3" => fig3(),
        "fig5" => fig5(),
        "fig7" => fig7(),
        "fig8" => fig8(),
        other => {
            return Err(QdError::config(
                "preset",
                format!("unknown preset `{other}` (expected one of {PRESET_NAMES:?})"),
            ))
        }
    })
}
