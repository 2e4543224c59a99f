//! Standalone SVG scatter renderings of state-space snapshots.
//!
//! One circle per node at its state coordinates along two chosen axes, fill
//! color fixed by grid position, auto-scaled viewport with a 5% margin.

use crate::analysis::color_of;
use crate::dynamics::LatticeState;
use crate::grid::GridTopology;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

const CANVAS: f64 = 800.0;
const RADIUS: f64 = 3.0;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("axis {axis} out of range for state dimension {p}")]
    AxisOutOfRange { axis: usize, p: usize },
    #[error("snapshot has {state_nodes} nodes but the topology has {topology_nodes}")]
    NodeCountMismatch {
        state_nodes: usize,
        topology_nodes: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn css_color(r: f64, g: f64, b: f64) -> String {
    let chan = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", chan(r), chan(g), chan(b))
}

/// Renders the scatter as an SVG document string.
pub fn render_svg_scatter(
    snapshot: &LatticeState,
    topology: &GridTopology,
    axes: (usize, usize),
) -> Result<String, SvgError> {
    let p = snapshot.p();
    for axis in [axes.0, axes.1] {
        if axis >= p {
            return Err(SvgError::AxisOutOfRange { axis, p });
        }
    }
    if snapshot.n_nodes() != topology.n_nodes() {
        return Err(SvgError::NodeCountMismatch {
            state_nodes: snapshot.n_nodes(),
            topology_nodes: topology.n_nodes(),
        });
    }

    // data bounds with a 5% margin per side; degenerate extents get unit padding
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for idx in 0..snapshot.n_nodes() {
        let node = snapshot.node(idx);
        for (d, &axis) in [axes.0, axes.1].iter().enumerate() {
            lo[d] = lo[d].min(node[axis]);
            hi[d] = hi[d].max(node[axis]);
        }
    }
    let mut min = [0.0; 2];
    let mut span = [0.0; 2];
    for d in 0..2 {
        let extent = hi[d] - lo[d];
        let pad = if extent > 0.0 { 0.05 * extent } else { 1.0 };
        min[d] = lo[d] - pad;
        span[d] = extent + 2.0 * pad;
    }
    let to_px = |v: f64, d: usize| (v - min[d]) / span[d] * CANVAS;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS
    ));
    out.push_str(&format!(
        "  <rect width=\"{c}\" height=\"{c}\" fill=\"white\"/>\n",
        c = CANVAS
    ));
    for idx in 0..snapshot.n_nodes() {
        let node = snapshot.node(idx);
        let (i, j) = topology.coords(idx);
        let color = color_of(i, j, topology.rows(), topology.cols()).expect("coords in range");
        let cx = to_px(node[axes.0], 0);
        // SVG y grows downward; state axes grow upward
        let cy = CANVAS - to_px(node[axes.1], 1);
        out.push_str(&format!(
            "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{RADIUS}\" fill=\"{}\"/>\n",
            css_color(color.r, color.g, color.b)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes the scatter to `path`.
pub fn write_svg_scatter(
    snapshot: &LatticeState,
    topology: &GridTopology,
    path: &Path,
    axes: (usize, usize),
) -> Result<(), SvgError> {
    let text = render_svg_scatter(snapshot, topology, axes)?;
    let mut file = std::fs::File::create(path).map_err(|e| SvgError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    file.write_all(text.as_bytes()).map_err(|e| SvgError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
