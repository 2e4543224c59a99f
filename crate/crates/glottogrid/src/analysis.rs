//! Trajectory post-processing: the grid color map, bounding-box metrics,
//! density-based clustering, and grid-coherence statistics.

use crate::config::Provenance;
use crate::dynamics::{LatticeState, Trajectory};
use crate::grid::{build_topology, GridTopology};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Clustering defaults, calibrated on the standard run (the underlying
/// cluster structure is emergent; both knobs stay config-exposed).
pub const DEFAULT_EPS: f64 = 0.25;
pub const DEFAULT_MIN_PTS: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("grid index ({i}, {j}) out of range for a {rows}x{cols} grid")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },
    #[error("empty snapshot: bounding box undefined")]
    EmptySnapshot,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("degenerate labeling: no cluster with at least 2 members, coherence undefined")]
    DegenerateLabeling,
    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
}

/// Node color, fixed by grid position: `R = i/rows`, `G = j/cols`,
/// `B = (i+j)/(rows+cols)`. Adjacent nodes are close in color, so clusters
/// that form by color are clusters that form by geography.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorTriple {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

pub fn color_of(i: usize, j: usize, rows: usize, cols: usize) -> Result<ColorTriple, AnalysisError> {
    if i < 1 || i > rows || j < 1 || j > cols {
        return Err(AnalysisError::IndexOutOfRange { i, j, rows, cols });
    }
    Ok(ColorTriple {
        r: i as f64 / rows as f64,
        g: j as f64 / cols as f64,
        b: (i + j) as f64 / (rows + cols) as f64,
    })
}

/// Axis-aligned bounding box of all state points: per-axis extent
/// `max − min` and center `(max + min)/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub extent: Vec<f64>,
    pub center: Vec<f64>,
}

impl BoundingBox {
    /// Product of per-axis extents.
    pub fn area(&self) -> f64 {
        self.extent.iter().product()
    }
}

pub fn bounding_box(snapshot: &LatticeState) -> Result<BoundingBox, AnalysisError> {
    let n = snapshot.n_nodes();
    if n == 0 {
        return Err(AnalysisError::EmptySnapshot);
    }
    let p = snapshot.p();
    let mut extent = Vec::with_capacity(p);
    let mut center = Vec::with_capacity(p);
    for axis in 0..p {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for idx in 0..n {
            let v = snapshot.node(idx)[axis];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        extent.push(hi - lo);
        center.push((hi + lo) / 2.0);
    }
    Ok(BoundingBox { extent, center })
}

// ── Density-based clustering ────────────────────────────────────────────────

/// DBSCAN over the state points: a core point has at least `min_pts`
/// neighbors within Euclidean distance `eps` (the point itself counts);
/// clusters are maximal density-connected sets; everything else is noise
/// (`None`).
///
/// Labels are deterministic: nodes are scanned in row-major order and
/// cluster ids assigned in discovery order.
pub fn cluster(snapshot: &LatticeState, eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    assert!(eps > 0.0, "eps must be positive");
    assert!(min_pts >= 1, "min_pts must be at least 1");
    let n = snapshot.n_nodes();
    let eps_sq = eps * eps;

    let dist_sq = |a: usize, b: usize| -> f64 {
        snapshot
            .node(a)
            .iter()
            .zip(snapshot.node(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let region = |idx: usize| -> Vec<usize> {
        (0..n).filter(|&other| dist_sq(idx, other) <= eps_sq).collect()
    };

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut next_label = 0usize;

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let neighbors = region(seed);
        if neighbors.len() < min_pts {
            continue; // noise unless a later cluster claims it as border
        }
        let label = next_label;
        next_label += 1;
        labels[seed] = Some(label);

        let mut queue: Vec<usize> = neighbors;
        let mut enqueued = vec![false; n];
        enqueued[seed] = true;
        for &q in &queue {
            enqueued[q] = true;
        }
        let mut head = 0;
        while head < queue.len() {
            let point = queue[head];
            head += 1;
            if labels[point].is_none() {
                labels[point] = Some(label);
            }
            if !visited[point] {
                visited[point] = true;
                let further = region(point);
                if further.len() >= min_pts {
                    for other in further {
                        if !enqueued[other] {
                            enqueued[other] = true;
                            queue.push(other);
                        }
                    }
                }
            }
        }
    }
    labels
}

// ── Grid coherence ──────────────────────────────────────────────────────────

/// Mean within-cluster grid Manhattan distance divided by the mean over all
/// node pairs. Values below 1 mean clusters align with grid geography.
///
/// Errors when no cluster has two members (all-noise labelings included).
pub fn coherence(labels: &[Option<usize>], topology: &GridTopology) -> Result<f64, AnalysisError> {
    let n = topology.n_nodes();
    assert_eq!(labels.len(), n, "one label per node");
    let mut within_sum = 0u64;
    let mut within_count = 0u64;
    let mut all_sum = 0u64;
    let mut all_count = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            let d = topology.manhattan(a, b) as u64;
            all_sum += d;
            all_count += 1;
            if let (Some(la), Some(lb)) = (labels[a], labels[b]) {
                if la == lb {
                    within_sum += d;
                    within_count += 1;
                }
            }
        }
    }
    if within_count == 0 {
        return Err(AnalysisError::DegenerateLabeling);
    }
    let within_mean = within_sum as f64 / within_count as f64;
    let all_mean = all_sum as f64 / all_count as f64;
    Ok(within_mean / all_mean)
}

// ── Aggregate report ────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub label: usize,
    pub size: usize,
    /// Mean member state, state-space units.
    pub centroid: Vec<f64>,
}

/// Full analysis of one snapshot (the trajectory's final one).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    /// Present when the snapshot came from a tracked run; absent for bare
    /// snapshot files.
    pub provenance: Option<Provenance>,
    /// Step index of the analyzed snapshot.
    pub step: u64,
    pub eps: f64,
    pub min_pts: usize,
    pub cluster_count: usize,
    pub noise_count: usize,
    pub noise_fraction: f64,
    pub clusters: Vec<ClusterInfo>,
    /// Per-node label in row-major order; `null` marks noise.
    pub labels: Vec<Option<usize>>,
    pub coherence_ratio: f64,
    pub bounding_box: BoundingBox,
}

/// Builds a [`ClusterReport`] from explicit parts (used by both trajectory
/// analysis and snapshot files loaded from disk).
pub fn analyze_snapshot(
    snapshot: &LatticeState,
    topology: &GridTopology,
    eps: f64,
    min_pts: usize,
    provenance: Option<Provenance>,
) -> Result<ClusterReport, AnalysisError> {
    if snapshot.n_nodes() != topology.n_nodes() {
        return Err(AnalysisError::DimMismatch {
            expected: topology.n_nodes(),
            got: snapshot.n_nodes(),
        });
    }
    let bbox = bounding_box(snapshot)?;
    let labels = cluster(snapshot, eps, min_pts);
    let coherence_ratio = coherence(&labels, topology)?;

    let p = snapshot.p();
    let cluster_count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; cluster_count];
    let mut sums = vec![vec![0.0f64; p]; cluster_count];
    let mut noise_count = 0usize;
    for (idx, label) in labels.iter().enumerate() {
        match label {
            Some(l) => {
                sizes[*l] += 1;
                for (s, v) in sums[*l].iter_mut().zip(snapshot.node(idx)) {
                    *s += v;
                }
            }
            None => noise_count += 1,
        }
    }
    let clusters = (0..cluster_count)
        .map(|l| ClusterInfo {
            label: l,
            size: sizes[l],
            centroid: sums[l].iter().map(|s| s / sizes[l] as f64).collect(),
        })
        .collect();

    Ok(ClusterReport {
        provenance,
        step: snapshot.step_index(),
        eps,
        min_pts,
        cluster_count,
        noise_count,
        noise_fraction: noise_count as f64 / snapshot.n_nodes() as f64,
        clusters,
        labels,
        coherence_ratio,
        bounding_box: bbox,
    })
}

/// Analyzes the final snapshot of a trajectory.
pub fn analyze(
    trajectory: &Trajectory,
    eps: f64,
    min_pts: usize,
) -> Result<ClusterReport, AnalysisError> {
    if trajectory.snapshots().is_empty() {
        return Err(AnalysisError::EmptyTrajectory);
    }
    let topology =
        build_topology(trajectory.rows(), trajectory.cols()).expect("trajectory dims are valid");
    analyze_snapshot(
        trajectory.last(),
        &topology,
        eps,
        min_pts,
        Some(trajectory.provenance().clone()),
    )
}
