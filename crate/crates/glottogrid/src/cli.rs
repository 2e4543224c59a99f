//! Command-line interface.
//!
//! Subcommands: `run`, `stability`, `analyze`, `experiment`, `render`.
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 divergence
//! abort. All diagnostics go to stderr; reports go to stdout or files.

use crate::analysis::{analyze, analyze_snapshot, DEFAULT_EPS, DEFAULT_MIN_PTS};
use crate::config::{parse_config, serialize_config, SimulationConfig};
use crate::dynamics::{run, DynamicsError, Trajectory};
use crate::experiments::{build_report, named_configs, ExperimentError};
use crate::grid::build_topology;
use crate::snapshot::{read_snapshot, write_snapshot};
use crate::stability::stability_report;
use crate::svg::write_svg_scatter;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "glottogrid",
    version,
    about = "Deterministic lattice simulator for threshold-gated language-state dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a config; write snapshots, stability report, cluster report
    Run {
        /// Config document path
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the stability report for a config as JSON
    Stability {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cluster a snapshot file and print the report as JSON
    Analyze {
        #[arg(long)]
        snapshot: PathBuf,
        /// DBSCAN neighborhood radius in state space
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// DBSCAN core-point threshold
        #[arg(long = "min-pts", default_value_t = DEFAULT_MIN_PTS)]
        min_pts: usize,
    },
    /// Run a named preset experiment
    Experiment {
        /// One of: standard, offset-scaling, o-type, x-type, dim3
        #[arg(long)]
        name: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Render a snapshot file as an SVG scatter
    Render {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Two state axes to project onto
        #[arg(long, num_args = 2, default_values_t = [0usize, 1usize])]
        axes: Vec<usize>,
    },
}

enum CliError {
    Usage(String),
    Validation(String),
    Divergence(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Divergence(_) => EXIT_DIVERGENCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Divergence(m) => m,
        }
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Diverged { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Entry point used by the binary: parses `std::env` args and returns the
/// process exit code.
pub fn main() -> i32 {
    dispatch(std::env::args_os())
}

/// Parses and executes one invocation, returning the exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, seed, out } => cmd_run(&config, seed, &out),
        Command::Stability { config } => cmd_stability(&config),
        Command::Analyze {
            snapshot,
            eps,
            min_pts,
        } => cmd_analyze(&snapshot, eps, min_pts),
        Command::Experiment { name, seed, out } => cmd_experiment(&name, seed, &out),
        Command::Render { snapshot, out, axes } => cmd_render(&snapshot, &out, (axes[0], axes[1])),
    }
}

fn load_config(path: &Path, seed_override: Option<u64>) -> Result<SimulationConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("{}: {e}", path.display())))?;
    let parsed = parse_config(&text).map_err(|e| validation(format!("{}: {e}", path.display())))?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    let mut config = parsed.config;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    Ok(config)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| validation(format!("{}: {e}", path.display())))
}

/// Writes everything one run produces into `dir`: the resolved config, the
/// stability report, every snapshot, and the final cluster report.
fn write_run_outputs(
    dir: &Path,
    config: &SimulationConfig,
    trajectory: &Trajectory,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| validation(format!("{}: {e}", dir.display())))?;
    write_text(dir.join("config.txt").as_path(), &serialize_config(config))?;

    let stability = stability_report(config).map_err(|e| validation(e.to_string()))?;
    write_text(
        dir.join("stability_report.json").as_path(),
        &to_json(&stability),
    )?;

    let topology = build_topology(config.rows, config.cols)
        .map_err(|e| validation(e.to_string()))?;
    let width = std::cmp::max(6, config.steps.to_string().len());
    for snap in trajectory.snapshots() {
        let name = format!("snapshot_{:0width$}.csv", snap.step_index(), width = width);
        write_snapshot(snap, &topology, dir.join(name).as_path())
            .map_err(|e| validation(e.to_string()))?;
    }

    let cluster = analyze(trajectory, DEFAULT_EPS, DEFAULT_MIN_PTS)
        .map_err(|e| validation(format!("final-snapshot analysis failed: {e}")))?;
    write_text(
        dir.join("cluster_report.json").as_path(),
        &to_json(&cluster),
    )?;
    Ok(())
}

fn warn_if_unstable(config: &SimulationConfig) -> Result<(), CliError> {
    if config.strict_stability {
        return Ok(()); // the run itself aborts with the offending edge
    }
    let report = stability_report(config).map_err(|e| validation(e.to_string()))?;
    if let Some(edge) = report.worst_unstable_edge() {
        eprintln!(
            "warning: stability pre-check failed: edge ({}, {})-({}, {}) has spectral radius {}",
            edge.a.0, edge.a.1, edge.b.0, edge.b.1, edge.rho
        );
    }
    Ok(())
}

fn cmd_run(config_path: &Path, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let config = load_config(config_path, seed)?;
    config.validate().map_err(|e| validation(e.to_string()))?;
    warn_if_unstable(&config)?;
    let trajectory = run(&config)?;
    write_run_outputs(out, &config, &trajectory)?;
    println!(
        "wrote {} snapshots and reports to {}",
        trajectory.snapshots().len(),
        out.display()
    );
    Ok(())
}

fn cmd_stability(config_path: &Path) -> Result<(), CliError> {
    let config = load_config(config_path, None)?;
    let report = stability_report(&config).map_err(|e| validation(e.to_string()))?;
    println!("{}", to_json(&report));
    Ok(())
}

fn cmd_analyze(snapshot_path: &Path, eps: f64, min_pts: usize) -> Result<(), CliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(validation(format!("--eps must be positive, got {eps}")));
    }
    if min_pts < 1 {
        return Err(validation("--min-pts must be at least 1"));
    }
    let (state, topology) =
        read_snapshot(snapshot_path).map_err(|e| validation(e.to_string()))?;
    let report = analyze_snapshot(&state, &topology, eps, min_pts, None)
        .map_err(|e| validation(e.to_string()))?;
    println!("{}", to_json(&report));
    Ok(())
}

fn cmd_experiment(name: &str, seed: u64, out: &Path) -> Result<(), CliError> {
    let configs = match named_configs(name, seed) {
        Ok(configs) => configs,
        Err(e @ ExperimentError::UnknownName { .. }) => {
            return Err(CliError::Usage(e.to_string()));
        }
        Err(e) => return Err(validation(e.to_string())),
    };
    for (_, config) in &configs {
        warn_if_unstable(config)?;
    }

    let mut trajectories = Vec::with_capacity(configs.len());
    for (_, config) in &configs {
        trajectories.push(run(config)?);
    }
    let labels: Vec<String> = configs.iter().map(|(label, _)| label.clone()).collect();
    let ks = (name == "offset-scaling").then_some([1.0, 2.0, 4.0].as_slice());
    let report = build_report(name, seed, &labels, &trajectories, ks)
        .map_err(|e| validation(e.to_string()))?;

    std::fs::create_dir_all(out).map_err(|e| validation(format!("{}: {e}", out.display())))?;
    for ((label, config), trajectory) in configs.iter().zip(&trajectories) {
        let dir = if configs.len() == 1 {
            out.to_path_buf()
        } else {
            out.join(label)
        };
        write_run_outputs(&dir, config, trajectory)?;
    }
    write_text(
        out.join("experiment_report.json").as_path(),
        &to_json(&report),
    )?;
    println!("wrote experiment `{name}` (seed {seed}) to {}", out.display());
    Ok(())
}

fn cmd_render(snapshot_path: &Path, out: &Path, axes: (usize, usize)) -> Result<(), CliError> {
    let (state, topology) =
        read_snapshot(snapshot_path).map_err(|e| validation(e.to_string()))?;
    write_svg_scatter(&state, &topology, out, axes).map_err(|e| validation(e.to_string()))?;
    println!("wrote {}", out.display());
    Ok(())
}
