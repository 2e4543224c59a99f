//! Named, seeded experiment presets and comparison procedures.
//!
//! Five presets ship: `standard` (the baseline 20×20 run), `offset-scaling`
//! (the baseline against offsets shrunk to 1/2 and 1/4, sharing every other
//! random draw), `o-type` / `x-type` (alternative high-weight layouts), and
//! `dim3` (the baseline lifted to a 3-dimensional state space).

use crate::analysis::{analyze, ClusterReport, DEFAULT_EPS, DEFAULT_MIN_PTS};
use crate::config::SimulationConfig;
use crate::dynamics::{run, Trajectory};
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PRESET_NAMES: &[&str] = &["standard", "offset-scaling", "o-type", "x-type", "dim3"];

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("unknown experiment `{name}`; valid presets: standard, offset-scaling, o-type, x-type, dim3")]
    UnknownName { name: String },
    #[error("offset scaling factor must be positive, got {k}")]
    NonPositiveFactor { k: f64 },
    #[error("offset-scaling experiment needs a nonempty factor list including 1")]
    MissingBaseFactor,
    #[error("simulation failed: {0}")]
    Dynamics(String),
    #[error("analysis failed: {0}")]
    Analysis(String),
}

impl From<crate::dynamics::DynamicsError> for ExperimentError {
    fn from(e: crate::dynamics::DynamicsError) -> Self {
        ExperimentError::Dynamics(e.to_string())
    }
}

impl From<crate::analysis::AnalysisError> for ExperimentError {
    fn from(e: crate::analysis::AnalysisError) -> Self {
        ExperimentError::Analysis(e.to_string())
    }
}

// ── Presets ─────────────────────────────────────────────────────────────────

/// The baseline configuration (see [`SimulationConfig::standard`]).
pub fn standard_config(seed: u64) -> SimulationConfig {
    SimulationConfig::standard(seed)
}

/// Same run with offsets shrunk to 1/k: identical seed and substreams, so
/// every non-offset draw is shared and the sampled offsets are scaled
/// entrywise after sampling.
pub fn offset_scaled_config(base: &SimulationConfig, k: f64) -> Result<SimulationConfig, ExperimentError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(ExperimentError::NonPositiveFactor { k });
    }
    let mut config = base.clone();
    config.offset_scale = base.offset_scale / k;
    Ok(config)
}

/// Eight high-weight nodes on a square ring (edge-surround layout).
pub fn otype_config(seed: u64) -> SimulationConfig {
    let mut config = SimulationConfig::standard(seed);
    config.high_positions = vec![
        (4, 4),
        (4, 10),
        (4, 16),
        (10, 4),
        (10, 16),
        (16, 4),
        (16, 10),
        (16, 16),
    ];
    config
}

/// Nine high-weight nodes on the two diagonals, radiating from the grid
/// center to the periphery.
pub fn xtype_config(seed: u64) -> SimulationConfig {
    let mut config = SimulationConfig::standard(seed);
    config.high_positions = vec![
        (4, 4),
        (4, 16),
        (8, 8),
        (8, 12),
        (10, 10),
        (12, 8),
        (12, 12),
        (16, 4),
        (16, 16),
    ];
    config
}

/// The baseline with a 3-dimensional state space; every range is unchanged,
/// states and offsets just gain an entry.
pub fn dim3_config(seed: u64) -> SimulationConfig {
    let mut config = SimulationConfig::standard(seed);
    config.state_dim = 3;
    config.coupling = Matrix::identity(3);
    config
}

// ── Reports ─────────────────────────────────────────────────────────────────

/// One member run of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub label: String,
    pub config_hash: String,
    pub cluster_report: ClusterReport,
}

/// Bounding-box ratios of one run relative to the experiment's base run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub label: String,
    /// Offset shrink factor for scaling experiments (1 for the base).
    pub k: f64,
    pub extent_ratio: Vec<f64>,
    pub center_ratio: Vec<f64>,
    /// Product of per-axis extents, relative to base.
    pub area_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub results: Vec<ConfigResult>,
    /// Present only for comparison experiments (offset scaling).
    pub ratios: Vec<RatioEntry>,
}

/// The member configs a preset name expands to, in run order.
pub fn named_configs(name: &str, seed: u64) -> Result<Vec<(String, SimulationConfig)>, ExperimentError> {
    match name {
        "standard" => Ok(vec![("standard".to_string(), standard_config(seed))]),
        "offset-scaling" => {
            let base = standard_config(seed);
            [1.0, 2.0, 4.0]
                .iter()
                .map(|&k| Ok((scaling_label(k), offset_scaled_config(&base, k)?)))
                .collect()
        }
        "o-type" => Ok(vec![("o-type".to_string(), otype_config(seed))]),
        "x-type" => Ok(vec![("x-type".to_string(), xtype_config(seed))]),
        "dim3" => Ok(vec![("dim3".to_string(), dim3_config(seed))]),
        other => Err(ExperimentError::UnknownName {
            name: other.to_string(),
        }),
    }
}

fn scaling_label(k: f64) -> String {
    if k == k.trunc() {
        format!("k{}", k as i64)
    } else {
        format!("k{k}")
    }
}

/// Analyzes already-run trajectories into an [`ExperimentReport`]. `ks`,
/// when present, pairs each trajectory with its offset shrink factor and
/// turns on bounding-box ratios relative to the first (base) run.
pub fn build_report(
    name: &str,
    seed: u64,
    labels: &[String],
    trajectories: &[Trajectory],
    ks: Option<&[f64]>,
) -> Result<ExperimentReport, ExperimentError> {
    assert_eq!(labels.len(), trajectories.len());
    let mut results = Vec::with_capacity(trajectories.len());
    for (label, trajectory) in labels.iter().zip(trajectories) {
        let report = analyze(trajectory, DEFAULT_EPS, DEFAULT_MIN_PTS)?;
        results.push(ConfigResult {
            label: label.clone(),
            config_hash: trajectory.provenance().config_hash.clone(),
            cluster_report: report,
        });
    }

    let ratios = match ks {
        Some(ks) if !results.is_empty() => {
            assert_eq!(ks.len(), results.len());
            let base = results[0].cluster_report.bounding_box.clone();
            results
                .iter()
                .zip(ks)
                .map(|(res, &k)| {
                    let bb = &res.cluster_report.bounding_box;
                    RatioEntry {
                        label: res.label.clone(),
                        k,
                        extent_ratio: bb
                            .extent
                            .iter()
                            .zip(&base.extent)
                            .map(|(e, b)| e / b)
                            .collect(),
                        center_ratio: bb
                            .center
                            .iter()
                            .zip(&base.center)
                            .map(|(c, b)| c / b)
                            .collect(),
                        area_ratio: bb.area() / base.area(),
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    };

    Ok(ExperimentReport {
        name: name.to_string(),
        seed,
        results,
        ratios,
    })
}

/// Runs and analyzes every member config, returning the report together with
/// the trajectories (callers that persist snapshots need them).
pub fn run_configs(
    name: &str,
    seed: u64,
    configs: &[(String, SimulationConfig)],
    ks: Option<&[f64]>,
) -> Result<(ExperimentReport, Vec<Trajectory>), ExperimentError> {
    let mut trajectories = Vec::with_capacity(configs.len());
    for (_, config) in configs {
        trajectories.push(run(config)?);
    }
    let labels: Vec<String> = configs.iter().map(|(label, _)| label.clone()).collect();
    let report = build_report(name, seed, &labels, &trajectories, ks)?;
    Ok((report, trajectories))
}

/// Runs the base config and each offset-shrunk variant, reporting per-axis
/// extent and center ratios relative to the base.
///
/// `ks` must be nonempty and include 1 (the base); entries are shrink
/// factors, so `k = 2` halves the offsets.
pub fn run_offset_scaling_experiment(
    seed: u64,
    ks: &[f64],
) -> Result<ExperimentReport, ExperimentError> {
    if ks.is_empty() || !ks.contains(&1.0) {
        return Err(ExperimentError::MissingBaseFactor);
    }
    let mut sorted: Vec<f64> = ks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let base = standard_config(seed);
    let configs: Vec<(String, SimulationConfig)> = sorted
        .iter()
        .map(|&k| Ok((scaling_label(k), offset_scaled_config(&base, k)?)))
        .collect::<Result<_, ExperimentError>>()?;
    let (report, _) = run_configs("offset-scaling", seed, &configs, Some(&sorted))?;
    Ok(report)
}

/// Dispatches a preset by name, runs it, and returns the aggregated report.
pub fn run_named(name: &str, seed: u64) -> Result<ExperimentReport, ExperimentError> {
    let configs = named_configs(name, seed)?;
    let ks = (name == "offset-scaling").then_some([1.0, 2.0, 4.0].as_slice());
    let (report, _) = run_configs(name, seed, &configs, ks)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sample_initial_state;
    use crate::grid::{build_topology, Lattice};
    use crate::stability::stability_report;

    #[test]
    fn standard_config_validates_and_is_stable() {
        let cfg = standard_config(9);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.seed, 9);
        let report = stability_report(&cfg).unwrap();
        assert!(report.all_pairwise_stable);
    }

    #[test]
    fn gate_is_inactive_on_the_initial_snapshot() {
        // psi = 4 exceeds the largest possible initial gap (states in (0, 2))
        let cfg = standard_config(11);
        assert!(cfg.psi > cfg.state_init_range.span());
        let topology = build_topology(cfg.rows, cfg.cols).unwrap();
        let initial = sample_initial_state(&cfg, &topology);
        assert!(initial.max_pairwise_gap() < cfg.psi);
    }

    #[test]
    fn offset_scaling_halves_and_quarters_exactly() {
        let base = standard_config(21);
        let base_lattice = Lattice::from_config(&base).unwrap();
        for (k, inv) in [(2.0, 0.5), (4.0, 0.25)] {
            let scaled = offset_scaled_config(&base, k).unwrap();
            let lattice = Lattice::from_config(&scaled).unwrap();
            // identical non-offset draws
            assert_eq!(lattice.weights, base_lattice.weights);
            for idx in 0..lattice.topology.n_nodes() {
                for (s, b) in lattice.attrs.offset(idx).iter().zip(base_lattice.attrs.offset(idx)) {
                    assert_eq!(*s, b * inv); // exact: inv is a power of two
                }
            }
        }
    }

    #[test]
    fn scaling_by_one_is_identity() {
        let base = standard_config(21);
        assert_eq!(offset_scaled_config(&base, 1.0).unwrap(), base);
        assert!(matches!(
            offset_scaled_config(&base, 0.0),
            Err(ExperimentError::NonPositiveFactor { .. })
        ));
    }

    #[test]
    fn scaled_runs_share_initial_states() {
        let base = standard_config(33);
        let scaled = offset_scaled_config(&base, 2.0).unwrap();
        let topology = build_topology(20, 20).unwrap();
        let a = sample_initial_state(&base, &topology);
        let b = sample_initial_state(&scaled, &topology);
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn otype_layout_is_eight_nonadjacent_high_nodes() {
        let cfg = otype_config(0);
        assert_eq!(cfg.high_positions.len(), 8);
        for &(ai, aj) in &cfg.high_positions {
            for &(bi, bj) in &cfg.high_positions {
                if (ai, aj) != (bi, bj) {
                    assert!(ai.abs_diff(bi) + aj.abs_diff(bj) > 1, "adjacent high nodes");
                }
            }
        }
        assert!(cfg.validate().is_ok());
        assert!(stability_report(&cfg).unwrap().all_pairwise_stable);
    }

    #[test]
    fn xtype_layout_is_nine_high_nodes_including_center() {
        let cfg = xtype_config(0);
        assert_eq!(cfg.high_positions.len(), 9);
        assert!(cfg.high_positions.contains(&(10, 10)));
        for &(ai, aj) in &cfg.high_positions {
            for &(bi, bj) in &cfg.high_positions {
                if (ai, aj) != (bi, bj) {
                    assert!(ai.abs_diff(bi) + aj.abs_diff(bj) > 1, "adjacent high nodes");
                }
            }
        }
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn dim3_config_raises_only_the_dimension() {
        let cfg = dim3_config(5);
        let std = standard_config(5);
        assert_eq!(cfg.state_dim, 3);
        assert_eq!(cfg.coupling, Matrix::identity(3));
        assert_eq!(cfg.state_init_range, std.state_init_range);
        assert_eq!(cfg.offset_range, std.offset_range);
        assert_eq!(cfg.high_positions, std.high_positions);

        let mut short = cfg.clone();
        short.steps = 3;
        let traj = run(&short).unwrap();
        assert_eq!(traj.last().p(), 3);
        assert_eq!(traj.last().n_nodes(), 400);
    }

    #[test]
    fn unknown_name_lists_presets() {
        let err = run_named("bogus", 0).unwrap_err();
        let msg = err.to_string();
        for name in PRESET_NAMES {
            assert!(msg.contains(name), "error should name `{name}`: {msg}");
        }
    }

    #[test]
    fn scaling_experiment_requires_base_factor() {
        assert_eq!(
            run_offset_scaling_experiment(0, &[2.0]).unwrap_err(),
            ExperimentError::MissingBaseFactor
        );
        assert_eq!(
            run_offset_scaling_experiment(0, &[]).unwrap_err(),
            ExperimentError::MissingBaseFactor
        );
    }

    #[test]
    fn trivial_scaling_report_has_unit_ratios() {
        // ks = [1]: the base compared against itself
        let report = run_offset_scaling_experiment(40, &[1.0]).unwrap();
        assert_eq!(report.results.len(), 1);
        assert_eq!(report.ratios.len(), 1);
        let entry = &report.ratios[0];
        assert!(entry.extent_ratio.iter().all(|&r| r == 1.0));
        assert!(entry.center_ratio.iter().all(|&r| r == 1.0));
        assert_eq!(entry.area_ratio, 1.0);
    }

    #[test]
    fn run_named_is_deterministic() {
        let a = run_named("standard", 7).unwrap();
        let b = run_named("standard", 7).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.results[0].label, "standard");
        assert!(a.ratios.is_empty());
    }
}
