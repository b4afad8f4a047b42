//! The experiment configuration schema and its resolution into model types.
//!
//! One JSON file describes one experiment. Everything is parsed and validated
//! before any computation runs: schema errors are `parse` failures, semantic
//! violations are `validation` failures.

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use succmeter::io::MatrixJson;
use succmeter::meter::GaussianMeter;
use succmeter::operator::{random_density, DensityMatrix, OrthonormalBasis, SpectralDecomposition};
use succmeter::presets;

use crate::error::{validation, CliError, CliResult};

/// A system state: named preset, explicit matrix, or seeded random state.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateSpec {
    Preset { preset: String },
    Matrix { matrix: MatrixJson },
    Random { random_seed: u64 },
}

/// An observable: named preset, explicit Hermitian matrix, or a basis name
/// plus optional eigenvalue list (descending integers by default).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ObservableSpec {
    Preset {
        preset: String,
    },
    Matrix {
        matrix: MatrixJson,
    },
    Basis {
        basis: String,
        #[serde(default)]
        eigenvalues: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeterSpec {
    pub epsilon: f64,
    pub sigma_q: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Top-level experiment configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub state: StateSpec,
    pub observable_a: ObservableSpec,
    #[serde(default)]
    pub observable_b: Option<ObservableSpec>,
    pub meter1: MeterSpec,
    #[serde(default)]
    pub meter2: Option<MeterSpec>,
    /// Workflow run by the `run` subcommand: `single`, `quasiprob`,
    /// `limits`, `reconstruct`, `oracle-check`, or `scan`.
    #[serde(default)]
    pub workflow: Option<String>,
    /// ε₁ values for the `scan` workflow (strictly increasing, positive).
    #[serde(default)]
    pub epsilon_scan: Option<Vec<f64>>,
    /// Oracle grid resolution override (power of two).
    #[serde(default)]
    pub grid_points: Option<usize>,
    /// Optional sampling window for the pointer density grid export.
    #[serde(default)]
    pub density_grid: Option<DensityGridSpec>,
}

/// A parsed config plus the hash of its raw bytes (for output provenance).
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub hash: String,
}

pub fn load_config(path: &Path) -> CliResult<LoadedConfig> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let config: ExperimentConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Parse(format!("config {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect::<String>()[..16].into();
    Ok(LoadedConfig { config, hash })
}

/// Fully validated model inputs.
pub struct Resolved {
    pub rho: DensityMatrix,
    pub observable_a: SpectralDecomposition,
    pub observable_b: Option<SpectralDecomposition>,
    pub meter1: GaussianMeter,
    pub meter2: GaussianMeter,
    pub epsilon_scan: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    pub density_grid: Option<DensityGridSpec>,
    pub workflow: Option<String>,
}

fn resolve_state(spec: &StateSpec, dim: usize) -> CliResult<DensityMatrix> {
    match spec {
        StateSpec::Preset { preset } => presets::state_by_name(preset, dim).map_err(validation),
        StateSpec::Matrix { matrix } => {
            let m = matrix.to_matrix().map_err(validation)?;
            if m.nrows() != dim {
                return Err(CliError::Validation(format!(
                    "state matrix has dimension {}, config says {dim}",
                    m.nrows()
                )));
            }
            DensityMatrix::new(m).map_err(validation)
        }
        StateSpec::Random { random_seed } => Ok(random_density(dim, *random_seed)),
    }
}

fn resolve_observable(spec: &ObservableSpec, dim: usize) -> CliResult<SpectralDecomposition> {
    match spec {
        ObservableSpec::Preset { preset } => {
            presets::observable_by_name(preset, dim).map_err(validation)
        }
        ObservableSpec::Matrix { matrix } => {
            let m = matrix.to_matrix().map_err(validation)?;
            if m.nrows() != dim {
                return Err(CliError::Validation(format!(
                    "observable matrix has dimension {}, config says {dim}",
                    m.nrows()
                )));
            }
            SpectralDecomposition::decompose_auto(&m).map_err(validation)
        }
        ObservableSpec::Basis { basis, eigenvalues } => {
            let basis = match basis.as_str() {
                "computational" => OrthonormalBasis::computational(dim),
                "fourier" => {
                    if dim < 2 {
                        return Err(CliError::Validation(
                            "fourier basis needs dimension >= 2".into(),
                        ));
                    }
                    OrthonormalBasis::fourier(dim)
                }
                other => {
                    return Err(CliError::Validation(format!("unknown basis '{other}'")));
                }
            };
            let eigs: Vec<f64> = match eigenvalues {
                Some(list) => list.clone(),
                None => (0..dim).map(|k| (dim - 1 - k) as f64).collect(),
            };
            basis.observable(&eigs).map_err(validation)
        }
    }
}

pub fn resolve(config: &ExperimentConfig) -> CliResult<Resolved> {
    if config.dimension < 2 {
        return Err(CliError::Validation(format!(
            "dimension must be >= 2, got {}",
            config.dimension
        )));
    }
    let dim = config.dimension;
    let rho = resolve_state(&config.state, dim)?;
    let observable_a = resolve_observable(&config.observable_a, dim)?;
    let observable_b = config
        .observable_b
        .as_ref()
        .map(|spec| resolve_observable(spec, dim))
        .transpose()?;
    let meter1 = GaussianMeter::new(config.meter1.epsilon, config.meter1.sigma_q)
        .map_err(validation)?;
    let meter2 = match &config.meter2 {
        Some(spec) => GaussianMeter::new(spec.epsilon, spec.sigma_q).map_err(validation)?,
        None => GaussianMeter::new(1.0, 1.0).expect("default meter"),
    };
    if let Some(scan) = &config.epsilon_scan {
        if scan.is_empty() || scan.iter().any(|e| !(*e > 0.0)) || scan.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Validation(
                "epsilon_scan must be a non-empty, strictly increasing list of positive values"
                    .into(),
            ));
        }
    }
    if let Some(grid) = &config.density_grid {
        if !(grid.min < grid.max) || grid.points < 2 {
            return Err(CliError::Validation(
                "density_grid needs min < max and at least 2 points".into(),
            ));
        }
    }
    if let Some(n) = config.grid_points {
        if !n.is_power_of_two() || n < 8 {
            return Err(CliError::Validation(format!(
                "grid_points must be a power of two >= 8, got {n}"
            )));
        }
    }
    Ok(Resolved {
        rho,
        observable_a,
        observable_b,
        meter1,
        meter2,
        epsilon_scan: config.epsilon_scan.clone(),
        grid_points: config.grid_points,
        density_grid: config.density_grid,
        workflow: config.workflow.clone(),
    })
}

impl Resolved {
    /// The second observable, required by the two-meter workflows.
    pub fn observable_b(&self) -> CliResult<&SpectralDecomposition> {
        self.observable_b.as_ref().ok_or_else(|| {
            CliError::Validation("this workflow needs observable_b in the config".into())
        })
    }
}
