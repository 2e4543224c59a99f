//! Synchronous threshold-gated state dynamics.
//!
//! Every step, each node's p-dimensional state moves by its fixed
//! self-evolution offset plus a weighted pull toward each neighbor:
//!
//! ```text
//! x_ij(k+1) = x_ij(k) + d_ij + Σ_{(m,n) ∈ N_ij} w_{(i,j)(m,n)} · a_mn · A · Δ_{(i,j)(m,n)}(k)
//! ```
//!
//! where `Δ = x_mn(k) − x_ij(k)` and the interaction term is dropped for any
//! neighbor whose difference exceeds the threshold ψ in infinity norm
//! (strict). All differences are evaluated on the step-k state; the update
//! is committed jointly.

use crate::config::{Provenance, SimulationConfig};
use crate::grid::{EdgeWeights, GridTopology, Lattice, NodeAttributes};
use crate::matrix::Matrix;
use crate::rng::{open_uniform, substream, Stream};
use crate::stability;
use thiserror::Error;

/// Any state entry beyond this magnitude is treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("dimension mismatch: expected p = {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("state has {state_nodes} nodes but the lattice has {lattice_nodes}")]
    NodeCountMismatch {
        state_nodes: usize,
        lattice_nodes: usize,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(#[from] crate::config::ConfigError),
    #[error("lattice construction failed: {0}")]
    Grid(#[from] crate::grid::GridError),
    #[error(
        "state diverged at step {step}, node ({i}, {j}): entry {value} exceeds {limit} or is not finite"
    )]
    Diverged {
        step: u64,
        i: usize,
        j: usize,
        value: f64,
        limit: f64,
    },
    #[error(
        "stability pre-check failed in strict mode: edge ({ai}, {aj})-({bi}, {bj}) has spectral radius {rho} >= 1"
    )]
    UnstableConfig {
        ai: usize,
        aj: usize,
        bi: usize,
        bj: usize,
        rho: f64,
    },
}

/// The state of every node at one step: flat row-major storage, node `idx`
/// owns `data[idx*p .. (idx+1)*p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    step: u64,
    p: usize,
    data: Vec<f64>,
}

impl LatticeState {
    pub fn new(step: u64, p: usize, data: Vec<f64>) -> Self {
        assert!(p > 0 && data.len() % p == 0, "state data must be n*p values");
        LatticeState { step, p, data }
    }

    /// All nodes start at the same point.
    pub fn uniform(n_nodes: usize, point: &[f64]) -> Self {
        let mut data = Vec::with_capacity(n_nodes * point.len());
        for _ in 0..n_nodes {
            data.extend_from_slice(point);
        }
        LatticeState::new(0, point.len(), data)
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_nodes(&self) -> usize {
        self.data.len() / self.p
    }

    #[inline]
    pub fn node(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.p..(idx + 1) * self.p]
    }

    pub fn node_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[idx * self.p..(idx + 1) * self.p]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Largest pairwise infinity-norm gap between any two nodes.
    pub fn max_pairwise_gap(&self) -> f64 {
        let n = self.n_nodes();
        let mut max = 0.0f64;
        for e in 0..self.p {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for idx in 0..n {
                let v = self.data[idx * self.p + e];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            max = max.max(hi - lo);
        }
        max
    }
}

/// Componentwise difference `x_mn − x_ij`.
pub fn delta(x_mn: &[f64], x_ij: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    if x_mn.len() != x_ij.len() {
        return Err(DynamicsError::DimMismatch {
            expected: x_ij.len(),
            got: x_mn.len(),
        });
    }
    Ok(x_mn.iter().zip(x_ij).map(|(m, i)| m - i).collect())
}

pub fn infinity_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// The confidence gate: zero when `‖Δ‖∞ > ψ` (strict), `Δ` unchanged
/// otherwise. The boundary `‖Δ‖∞ = ψ` passes.
pub fn gate(delta: &[f64], psi: f64) -> Vec<f64> {
    if infinity_norm(delta) > psi {
        vec![0.0; delta.len()]
    } else {
        delta.to_vec()
    }
}

fn check_dims(
    state: &LatticeState,
    topology: &GridTopology,
    attrs: &NodeAttributes,
    coupling: &Matrix,
) -> Result<(), DynamicsError> {
    if state.n_nodes() != topology.n_nodes() {
        return Err(DynamicsError::NodeCountMismatch {
            state_nodes: state.n_nodes(),
            lattice_nodes: topology.n_nodes(),
        });
    }
    if attrs.p() != state.p() {
        return Err(DynamicsError::DimMismatch {
            expected: state.p(),
            got: attrs.p(),
        });
    }
    if coupling.dim() != state.p() {
        return Err(DynamicsError::DimMismatch {
            expected: state.p(),
            got: coupling.dim(),
        });
    }
    Ok(())
}

/// The inner stepper shared by `step` and `run_lattice`. Writes the step
/// k+1 state into `next`; `diff` and `mixed` are p-length scratch buffers.
fn step_into(
    cur: &[f64],
    p: usize,
    topology: &GridTopology,
    weights: &EdgeWeights,
    attrs: &NodeAttributes,
    coupling: &Matrix,
    psi: f64,
    next: &mut [f64],
    diff: &mut [f64],
    mixed: &mut [f64],
) {
    let identity = coupling.is_identity();
    for idx in 0..topology.n_nodes() {
        let base = idx * p;
        let offset = attrs.offset(idx);
        for e in 0..p {
            next[base + e] = cur[base + e] + offset[e];
        }
        for &(nbr, eid) in topology.adjacency(idx) {
            let nbase = nbr * p;
            let mut norm = 0.0f64;
            for e in 0..p {
                let d = cur[nbase + e] - cur[base + e];
                diff[e] = d;
                norm = norm.max(d.abs());
            }
            if norm > psi {
                continue;
            }
            let c = weights.by_index(eid) * attrs.weight(nbr);
            if identity {
                for e in 0..p {
                    next[base + e] += c * diff[e];
                }
            } else {
                coupling.matvec_into(diff, mixed);
                for e in 0..p {
                    next[base + e] += c * mixed[e];
                }
            }
        }
    }
}

/// One synchronous update of the whole lattice.
pub fn step(
    state: &LatticeState,
    topology: &GridTopology,
    weights: &EdgeWeights,
    attrs: &NodeAttributes,
    coupling: &Matrix,
    psi: f64,
) -> Result<LatticeState, DynamicsError> {
    check_dims(state, topology, attrs, coupling)?;
    let p = state.p();
    let mut next = vec![0.0; state.data.len()];
    let mut diff = vec![0.0; p];
    let mut mixed = vec![0.0; p];
    step_into(
        &state.data,
        p,
        topology,
        weights,
        attrs,
        coupling,
        psi,
        &mut next,
        &mut diff,
        &mut mixed,
    );
    Ok(LatticeState::new(state.step + 1, p, next))
}

/// Ordered snapshots of a run plus its provenance.
#[derive(Clone, Debug)]
pub struct Trajectory {
    rows: usize,
    cols: usize,
    snapshots: Vec<LatticeState>,
    provenance: Provenance,
}

impl Trajectory {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn snapshots(&self) -> &[LatticeState] {
        &self.snapshots
    }

    pub fn initial(&self) -> &LatticeState {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &LatticeState {
        self.snapshots.last().expect("trajectory has snapshots")
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Samples every initial state entry uniformly from the config's init range,
/// from the initial-states substream of the config seed.
pub fn sample_initial_state(config: &SimulationConfig, topology: &GridTopology) -> LatticeState {
    let mut rng = substream(config.seed, Stream::InitialStates);
    let n = topology.n_nodes();
    let p = config.state_dim;
    let data = (0..n * p)
        .map(|_| open_uniform(&mut rng, config.state_init_range.lo, config.state_init_range.hi))
        .collect();
    LatticeState::new(0, p, data)
}

fn divergence_check(
    state: &[f64],
    p: usize,
    step: u64,
    topology: &GridTopology,
) -> Result<(), DynamicsError> {
    for (pos, &v) in state.iter().enumerate() {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            let (i, j) = topology.coords(pos / p);
            return Err(DynamicsError::Diverged {
                step,
                i,
                j,
                value: v,
                limit: DIVERGENCE_LIMIT,
            });
        }
    }
    Ok(())
}

/// Runs `steps` synchronous updates over a prepared lattice.
///
/// Snapshots are kept at step 0, every `snapshot_every` steps, and the final
/// step. Aborts with [`DynamicsError::Diverged`] when any entry leaves the
/// representable band.
#[allow(clippy::too_many_arguments)]
pub fn run_lattice(
    lattice: &Lattice,
    initial: LatticeState,
    coupling: &Matrix,
    psi: f64,
    steps: u64,
    snapshot_every: u64,
    provenance: Provenance,
) -> Result<Trajectory, DynamicsError> {
    check_dims(&initial, &lattice.topology, &lattice.attrs, coupling)?;
    assert!(snapshot_every >= 1, "snapshot_every must be positive");
    let p = initial.p();
    let topology = &lattice.topology;

    let mut snapshots = Vec::with_capacity((steps / snapshot_every + 2) as usize);
    let mut cur = initial.data.clone();
    let mut next = vec![0.0; cur.len()];
    let mut diff = vec![0.0; p];
    let mut mixed = vec![0.0; p];

    divergence_check(&cur, p, 0, topology)?;
    snapshots.push(initial);

    for k in 0..steps {
        step_into(
            &cur,
            p,
            topology,
            &lattice.weights,
            &lattice.attrs,
            coupling,
            psi,
            &mut next,
            &mut diff,
            &mut mixed,
        );
        std::mem::swap(&mut cur, &mut next);
        let done = k + 1;
        divergence_check(&cur, p, done, topology)?;
        if done % snapshot_every == 0 || done == steps {
            snapshots.push(LatticeState::new(done, p, cur.clone()));
        }
    }

    Ok(Trajectory {
        rows: topology.rows(),
        cols: topology.cols(),
        snapshots,
        provenance,
    })
}

/// Runs a full simulation from a config: validates, samples the lattice and
/// initial state from the seed's substreams, applies the strict-mode
/// stability gate, and iterates.
pub fn run(config: &SimulationConfig) -> Result<Trajectory, DynamicsError> {
    config.validate()?;
    let lattice = Lattice::from_config(config)?;
    if config.strict_stability {
        let report = stability::stability_report_for(config, &lattice);
        if let Some(edge) = report.worst_unstable_edge() {
            return Err(DynamicsError::UnstableConfig {
                ai: edge.a.0,
                aj: edge.a.1,
                bi: edge.b.0,
                bj: edge.b.1,
                rho: edge.rho,
            });
        }
    }
    let initial = sample_initial_state(config, &lattice.topology);
    run_lattice(
        &lattice,
        initial,
        &config.coupling,
        config.psi,
        config.steps,
        config.snapshot_every,
        Provenance::of(config),
    )
}
