//! Deterministic simulation and analysis of coupled language-state dynamics
//! on planar settlement lattices.
//!
//! A bounded rectangular grid of settlements each carries a p-dimensional
//! state vector. Every step, a node drifts by its own fixed self-evolution
//! offset and is pulled toward each neighbor whose state lies within a
//! confidence threshold ψ (infinity norm); the pull strength is the product
//! of the road's edge weight and the neighbor's influence weight, mixed
//! through a coupling matrix. Under contractive weights the population
//! self-organizes from a uniform cloud into a handful of geography-aligned
//! clusters.
//!
//! The crate covers the full loop:
//!
//! - [`grid`] — lattice topology and seeded node/edge attributes,
//! - [`dynamics`] — the synchronous gated update rule and trajectory runs,
//! - [`stability`] — per-edge spectral-radius verdicts, the simplified
//!   scalar test, difference fixed points, and a grid-wide row-sum check,
//! - [`analysis`] — color mapping, bounding boxes, DBSCAN clustering, and
//!   grid-coherence statistics,
//! - [`experiments`] — named seeded presets and the offset-scaling
//!   comparison,
//! - [`config`], [`snapshot`], [`svg`], [`cli`] — the text config format,
//!   CSV snapshots, SVG scatters, and the command-line front end.
//!
//! Everything is deterministic: a config plus its seed reproduces every
//! random draw (independent ChaCha substreams per sampled field), every
//! trajectory, and every output file byte for byte.
//!
//! ```
//! use glottogrid::analysis::{analyze, DEFAULT_EPS, DEFAULT_MIN_PTS};
//! use glottogrid::config::SimulationConfig;
//! use glottogrid::dynamics::run;
//!
//! let mut config = SimulationConfig::standard(7);
//! config.steps = 200; // the full preset uses 10000
//! let trajectory = run(&config).unwrap();
//! let report = analyze(&trajectory, DEFAULT_EPS, DEFAULT_MIN_PTS).unwrap();
//! assert_eq!(report.labels.len(), 400);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; start with `standard_run`.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod experiments;
pub mod grid;
pub mod matrix;
pub mod rng;
pub mod snapshot;
pub mod stability;
pub mod svg;

pub use analysis::{analyze, bounding_box, cluster, coherence, color_of, ClusterReport};
pub use config::{parse_config, serialize_config, SimulationConfig};
pub use dynamics::{run, LatticeState, Trajectory};
pub use experiments::{run_named, ExperimentReport};
pub use grid::{build_topology, GridTopology, Lattice};
pub use stability::{pairwise_stable, spectral_radius, stability_report, StabilityReport};
