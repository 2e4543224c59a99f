//! Planar settlement lattice: grid topology, symmetric edge weights, and
//! per-node attributes (influence weight, self-evolution offset).
//!
//! Nodes are addressed by 1-based dyadic coordinates `(i, j)` with
//! `1 <= i <= rows`, `1 <= j <= cols`, or by the row-major linear index used
//! for storage. The grid is bounded (no wraparound): interior nodes have 4
//! neighbors, edge nodes 3, corners 2.

use crate::config::{Interval, SimulationConfig};
use crate::rng::{open_uniform, substream, Stream};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("malformed sampling range ({lo}, {hi}): lower bound must be < upper")]
    MalformedRange { lo: f64, hi: f64 },
    #[error("sampling range ({lo}, {hi}) has a negative lower bound")]
    NegativeRange { lo: f64, hi: f64 },
    #[error("position ({i}, {j}) is outside the {rows}x{cols} grid")]
    PositionOutsideGrid {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },
    #[error("attribute vectors have inconsistent lengths for {nodes} nodes (p = {p})")]
    InconsistentAttributes { nodes: usize, p: usize },
}

/// Bounded planar grid with row-major node numbering.
#[derive(Clone, Debug)]
pub struct GridTopology {
    rows: usize,
    cols: usize,
    /// Per node: `(neighbor_index, edge_index)`, sorted by neighbor index.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Canonical edge list, both endpoints as linear indices with `a < b`.
    edges: Vec<(usize, usize)>,
}

impl GridTopology {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_nodes(&self) -> usize {
        self.rows * self.cols
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Linear index of node `(i, j)` (1-based coordinates).
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        if i >= 1 && i <= self.rows && j >= 1 && j <= self.cols {
            Some((i - 1) * self.cols + (j - 1))
        } else {
            None
        }
    }

    /// 1-based coordinates of a linear index.
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols + 1, idx % self.cols + 1)
    }

    /// Neighbors of a node with the connecting edge index, ascending.
    pub fn adjacency(&self, idx: usize) -> &[(usize, usize)] {
        &self.adjacency[idx]
    }

    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[idx].iter().map(|&(n, _)| n)
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    /// Edge list in canonical order (row-major sweep, right edge then down).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edge index between two adjacent nodes, in either order.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, e)| e)
    }

    /// Manhattan distance between two nodes' grid coordinates.
    pub fn manhattan(&self, a: usize, b: usize) -> usize {
        let (ai, aj) = self.coords(a);
        let (bi, bj) = self.coords(b);
        ai.abs_diff(bi) + aj.abs_diff(bj)
    }
}

/// Builds the bounded planar grid. Rejects zero dimensions.
pub fn build_topology(rows: usize, cols: usize) -> Result<GridTopology, GridError> {
    if rows == 0 || cols == 0 {
        return Err(GridError::EmptyGrid { rows, cols });
    }
    let n = rows * cols;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(4); n];
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let idx = r * cols + c;
            if c + 1 < cols {
                let right = idx + 1;
                let eid = edges.len();
                edges.push((idx, right));
                adjacency[idx].push((right, eid));
                adjacency[right].push((idx, eid));
            }
            if r + 1 < rows {
                let down = idx + cols;
                let eid = edges.len();
                edges.push((idx, down));
                adjacency[idx].push((down, eid));
                adjacency[down].push((idx, eid));
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(GridTopology {
        rows,
        cols,
        adjacency,
        edges,
    })
}

/// Symmetric connectivity strengths, stored once per unordered edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights {
    weights: Vec<f64>,
}

impl EdgeWeights {
    /// Constant weight on every edge.
    pub fn constant(topology: &GridTopology, w: f64) -> Self {
        EdgeWeights {
            weights: vec![w; topology.n_edges()],
        }
    }

    /// Weights from an explicit per-edge vector in canonical edge order.
    pub fn from_vec(topology: &GridTopology, weights: Vec<f64>) -> Result<Self, GridError> {
        if weights.len() != topology.n_edges() {
            return Err(GridError::InconsistentAttributes {
                nodes: topology.n_edges(),
                p: 1,
            });
        }
        Ok(EdgeWeights { weights })
    }

    #[inline]
    pub fn by_index(&self, edge: usize) -> f64 {
        self.weights[edge]
    }

    /// Weight between two adjacent nodes, queried in either direction.
    pub fn between(&self, topology: &GridTopology, a: usize, b: usize) -> Option<f64> {
        topology.edge_between(a, b).map(|e| self.weights[e])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

/// One uniform draw per unordered edge, in canonical edge order.
/// Symmetry (`w_ab = w_ba`) holds by construction: the weight is stored once.
pub fn sample_edge_weights(
    topology: &GridTopology,
    range: Interval,
    rng: &mut impl Rng,
) -> Result<EdgeWeights, GridError> {
    if !(range.lo < range.hi) || !range.lo.is_finite() || !range.hi.is_finite() {
        return Err(GridError::MalformedRange {
            lo: range.lo,
            hi: range.hi,
        });
    }
    if range.lo < 0.0 {
        return Err(GridError::NegativeRange {
            lo: range.lo,
            hi: range.hi,
        });
    }
    let weights = (0..topology.n_edges())
        .map(|_| open_uniform(rng, range.lo, range.hi))
        .collect();
    Ok(EdgeWeights { weights })
}

/// Per-node influence weights and self-evolution offsets for the whole grid.
///
/// Offsets are sampled once at construction and never mutated during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeAttributes {
    p: usize,
    weights: Vec<f64>,
    /// Flat row-major storage: node `idx` owns `offsets[idx*p .. (idx+1)*p]`.
    offsets: Vec<f64>,
}

impl NodeAttributes {
    pub fn from_parts(weights: Vec<f64>, offsets: Vec<f64>, p: usize) -> Result<Self, GridError> {
        if p == 0 || offsets.len() != weights.len() * p {
            return Err(GridError::InconsistentAttributes {
                nodes: weights.len(),
                p,
            });
        }
        Ok(NodeAttributes {
            p,
            weights,
            offsets,
        })
    }

    /// Uniform influence weight and one shared offset vector for every node.
    pub fn uniform(topology: &GridTopology, weight: f64, offset: &[f64]) -> Self {
        let n = topology.n_nodes();
        let mut offsets = Vec::with_capacity(n * offset.len());
        for _ in 0..n {
            offsets.extend_from_slice(offset);
        }
        NodeAttributes {
            p: offset.len(),
            weights: vec![weight; n],
            offsets,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weight(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    #[inline]
    pub fn offset(&self, idx: usize) -> &[f64] {
        &self.offsets[idx * self.p..(idx + 1) * self.p]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Multiplies every offset entry by `s` (used by offset-scaling runs).
    pub fn scale_offsets(&mut self, s: f64) {
        for v in &mut self.offsets {
            *v *= s;
        }
    }

    pub fn set_offset(&mut self, idx: usize, offset: &[f64]) {
        assert_eq!(offset.len(), self.p);
        self.offsets[idx * self.p..(idx + 1) * self.p].copy_from_slice(offset);
    }
}

/// Assigns influence weights (`high_weight` on the listed positions,
/// `low_weight` elsewhere) and samples every offset entry uniformly from
/// `offset_range`.
pub fn assign_node_attributes(
    topology: &GridTopology,
    high_positions: &[(usize, usize)],
    high_weight: f64,
    low_weight: f64,
    offset_range: Interval,
    p: usize,
    rng: &mut impl Rng,
) -> Result<NodeAttributes, GridError> {
    if !(offset_range.lo < offset_range.hi) {
        return Err(GridError::MalformedRange {
            lo: offset_range.lo,
            hi: offset_range.hi,
        });
    }
    let n = topology.n_nodes();
    let mut weights = vec![low_weight; n];
    for &(i, j) in high_positions {
        let idx = topology
            .index_of(i, j)
            .ok_or(GridError::PositionOutsideGrid {
                i,
                j,
                rows: topology.rows(),
                cols: topology.cols(),
            })?;
        weights[idx] = high_weight;
    }
    let offsets = (0..n * p)
        .map(|_| open_uniform(rng, offset_range.lo, offset_range.hi))
        .collect();
    NodeAttributes::from_parts(weights, offsets, p)
}

/// A fully sampled lattice realization: topology plus randomized attributes.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub topology: GridTopology,
    pub weights: EdgeWeights,
    pub attrs: NodeAttributes,
}

impl Lattice {
    /// Builds the lattice a config describes, drawing edge weights and
    /// offsets from their named substreams of the config seed and applying
    /// `offset_scale` to the sampled offsets.
    pub fn from_config(config: &SimulationConfig) -> Result<Self, GridError> {
        let topology = build_topology(config.rows, config.cols)?;
        let mut edge_rng = substream(config.seed, Stream::EdgeWeights);
        let weights = sample_edge_weights(&topology, config.edge_weight_range, &mut edge_rng)?;
        let mut offset_rng = substream(config.seed, Stream::Offsets);
        let mut attrs = assign_node_attributes(
            &topology,
            &config.high_positions,
            config.high_weight,
            config.low_weight,
            config.offset_range,
            config.state_dim,
            &mut offset_rng,
        )?;
        if config.offset_scale != 1.0 {
            attrs.scale_offsets(config.offset_scale);
        }
        Ok(Lattice {
            topology,
            weights,
            attrs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn single_node_grid_has_empty_neighborhood() {
        let g = build_topology(1, 1).unwrap();
        assert_eq!(g.n_nodes(), 1);
        assert_eq!(g.n_edges(), 0);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn two_by_two_every_node_has_two_neighbors() {
        let g = build_topology(2, 2).unwrap();
        for idx in 0..4 {
            assert_eq!(g.degree(idx), 2, "node {idx}");
        }
        assert_eq!(g.n_edges(), 4);
    }

    #[test]
    fn standard_grid_node_and_edge_counts() {
        let g = build_topology(20, 20).unwrap();
        assert_eq!(g.n_nodes(), 400);
        assert_eq!(g.n_edges(), 760); // rows*(cols-1) + cols*(rows-1)
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(build_topology(0, 5), Err(GridError::EmptyGrid { .. })));
        assert!(matches!(build_topology(5, 0), Err(GridError::EmptyGrid { .. })));
    }

    #[test]
    fn neighbor_counts_match_census_formula() {
        for &(rows, cols) in &[(3usize, 3usize), (5, 7), (20, 20)] {
            let g = build_topology(rows, cols).unwrap();
            let mut by_degree = [0usize; 5];
            for idx in 0..g.n_nodes() {
                by_degree[g.degree(idx)] += 1;
            }
            assert_eq!(by_degree[2], 4, "{rows}x{cols} corners");
            assert_eq!(by_degree[3], 2 * (rows - 2) + 2 * (cols - 2), "{rows}x{cols} edges");
            assert_eq!(by_degree[4], (rows - 2) * (cols - 2), "{rows}x{cols} interior");
        }
    }

    #[test]
    fn neighborhood_relation_is_symmetric() {
        let g = build_topology(4, 6).unwrap();
        for a in 0..g.n_nodes() {
            for b in g.neighbors(a) {
                assert!(g.neighbors(b).any(|x| x == a), "asymmetric pair {a},{b}");
            }
        }
    }

    #[test]
    fn edge_weights_symmetric_in_both_directions() {
        let g = build_topology(5, 5).unwrap();
        let mut rng = substream(3, Stream::EdgeWeights);
        let w = sample_edge_weights(&g, Interval::new(0.0, 0.33), &mut rng).unwrap();
        for &(a, b) in g.edges() {
            assert_eq!(w.between(&g, a, b), w.between(&g, b, a));
        }
    }

    #[test]
    fn sampled_weights_stay_inside_open_range() {
        let g = build_topology(20, 20).unwrap();
        let mut rng = substream(11, Stream::EdgeWeights);
        let w = sample_edge_weights(&g, Interval::new(0.0, 0.33), &mut rng).unwrap();
        assert_eq!(w.as_slice().len(), 760);
        assert!(w.as_slice().iter().all(|&v| v > 0.0 && v < 0.33));

        let mut rng = substream(11, Stream::EdgeWeights);
        let tiny = sample_edge_weights(&g, Interval::new(0.0, 1e-9), &mut rng).unwrap();
        assert!(tiny.as_slice().iter().all(|&v| v > 0.0 && v < 1e-9));
    }

    #[test]
    fn degenerate_weight_range_is_rejected() {
        let g = build_topology(2, 2).unwrap();
        let mut rng = substream(0, Stream::EdgeWeights);
        assert!(matches!(
            sample_edge_weights(&g, Interval::new(0.2, 0.2), &mut rng),
            Err(GridError::MalformedRange { .. })
        ));
        assert!(matches!(
            sample_edge_weights(&g, Interval::new(-0.1, 0.2), &mut rng),
            Err(GridError::NegativeRange { .. })
        ));
    }

    #[test]
    fn same_seed_gives_bit_identical_weights() {
        let g = build_topology(20, 20).unwrap();
        let mut r1 = substream(99, Stream::EdgeWeights);
        let mut r2 = substream(99, Stream::EdgeWeights);
        let w1 = sample_edge_weights(&g, Interval::new(0.0, 0.33), &mut r1).unwrap();
        let w2 = sample_edge_weights(&g, Interval::new(0.0, 0.33), &mut r2).unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn high_positions_get_high_weight() {
        let g = build_topology(20, 20).unwrap();
        let mut rng = substream(5, Stream::Offsets);
        let attrs = assign_node_attributes(
            &g,
            &[(4, 4), (4, 16), (16, 4), (16, 16)],
            3.0,
            1.0,
            Interval::new(-0.02, 0.08),
            2,
            &mut rng,
        )
        .unwrap();
        let high = attrs.weights().iter().filter(|&&a| a == 3.0).count();
        let low = attrs.weights().iter().filter(|&&a| a == 1.0).count();
        assert_eq!((high, low), (4, 396));
        assert_eq!(attrs.weight(g.index_of(4, 4).unwrap()), 3.0);
    }

    #[test]
    fn empty_high_set_gives_uniform_weights() {
        let g = build_topology(3, 3).unwrap();
        let mut rng = substream(5, Stream::Offsets);
        let attrs =
            assign_node_attributes(&g, &[], 3.0, 1.0, Interval::new(-0.02, 0.08), 2, &mut rng)
                .unwrap();
        assert!(attrs.weights().iter().all(|&a| a == 1.0));
    }

    #[test]
    fn offset_sample_mean_matches_uniform_mean() {
        let g = build_topology(20, 20).unwrap();
        let mut rng = substream(17, Stream::Offsets);
        let attrs =
            assign_node_attributes(&g, &[], 3.0, 1.0, Interval::new(-0.02, 0.08), 2, &mut rng)
                .unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for idx in 0..g.n_nodes() {
            for &v in attrs.offset(idx) {
                assert!(v > -0.02 && v < 0.08);
                sum += v;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 0.03).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn position_outside_grid_is_rejected() {
        let g = build_topology(3, 3).unwrap();
        let mut rng = substream(5, Stream::Offsets);
        let err = assign_node_attributes(
            &g,
            &[(4, 1)],
            3.0,
            1.0,
            Interval::new(-0.02, 0.08),
            2,
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, GridError::PositionOutsideGrid { i: 4, j: 1, .. }));
    }

    #[test]
    fn lattice_from_config_is_deterministic() {
        let cfg = SimulationConfig::standard(123);
        let a = Lattice::from_config(&cfg).unwrap();
        let b = Lattice::from_config(&cfg).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.attrs, b.attrs);
    }

    #[test]
    fn state_dim_does_not_disturb_edge_weights() {
        // Separate substreams: drawing more offsets must not shift edge draws.
        let mut cfg2 = SimulationConfig::standard(7);
        cfg2.state_dim = 2;
        let mut cfg3 = SimulationConfig::standard(7);
        cfg3.state_dim = 3;
        cfg3.coupling = Matrix::identity(3);
        let a = Lattice::from_config(&cfg2).unwrap();
        let b = Lattice::from_config(&cfg3).unwrap();
        assert_eq!(a.weights, b.weights);
    }
}
