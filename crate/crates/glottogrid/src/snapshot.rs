//! Snapshot files: comma-separated text, one row per node.
//!
//! Layout: header `step,i,j,x1,…,xp,R,G,B`, then `rows×cols` data rows in
//! row-major order. Floats are rounded to 9 significant digits and rendered
//! with the shortest decimal that round-trips, so identical states always
//! produce byte-identical files.

use crate::analysis::color_of;
use crate::dynamics::LatticeState;
use crate::grid::{build_topology, GridTopology};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SnapshotError {
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
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> SnapshotError {
    SnapshotError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Rounds to 9 significant digits, then renders the shortest decimal that
/// round-trips to the rounded value.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("scientific form reparses");
    format!("{rounded}")
}

/// Renders one snapshot in the file format.
pub fn render_snapshot(
    snapshot: &LatticeState,
    topology: &GridTopology,
) -> Result<String, SnapshotError> {
    if snapshot.n_nodes() != topology.n_nodes() {
        return Err(SnapshotError::NodeCountMismatch {
            state_nodes: snapshot.n_nodes(),
            topology_nodes: topology.n_nodes(),
        });
    }
    let p = snapshot.p();
    let mut out = String::new();
    out.push_str("step,i,j");
    for e in 1..=p {
        out.push_str(&format!(",x{e}"));
    }
    out.push_str(",R,G,B\n");
    for idx in 0..topology.n_nodes() {
        let (i, j) = topology.coords(idx);
        let color = color_of(i, j, topology.rows(), topology.cols()).expect("coords in range");
        out.push_str(&format!("{},{i},{j}", snapshot.step_index()));
        for &v in snapshot.node(idx) {
            out.push(',');
            out.push_str(&format_sig9(v));
        }
        out.push_str(&format!(
            ",{},{},{}\n",
            format_sig9(color.r),
            format_sig9(color.g),
            format_sig9(color.b)
        ));
    }
    Ok(out)
}

/// Writes one snapshot to `path`, bit-identical for identical inputs.
pub fn write_snapshot(
    snapshot: &LatticeState,
    topology: &GridTopology,
    path: &Path,
) -> Result<(), SnapshotError> {
    let text = render_snapshot(snapshot, topology)?;
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

/// Reads a snapshot file back: the grid shape is recovered from the maximum
/// `i` and `j`, and every node must appear exactly once.
pub fn read_snapshot(path: &Path) -> Result<(LatticeState, GridTopology), SnapshotError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_snapshot(&text, &path.display().to_string())
}

pub fn parse_snapshot(text: &str, origin: &str) -> Result<(LatticeState, GridTopology), SnapshotError> {
    let parse_err = |line: usize, msg: String| SnapshotError::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".to_string()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 7 || columns[0] != "step" || columns[1] != "i" || columns[2] != "j" {
        return Err(parse_err(1, format!("unexpected header `{header}`")));
    }
    let p = columns.len() - 6;
    for (e, col) in columns[3..3 + p].iter().enumerate() {
        if *col != format!("x{}", e + 1) {
            return Err(parse_err(1, format!("expected column x{}, got `{col}`", e + 1)));
        }
    }
    if columns[3 + p..] != ["R", "G", "B"] {
        return Err(parse_err(1, "expected trailing R,G,B columns".to_string()));
    }

    struct Row {
        i: usize,
        j: usize,
        state: Vec<f64>,
    }
    let mut rows_data: Vec<Row> = Vec::new();
    let mut step: Option<u64> = None;
    let mut max_i = 0usize;
    let mut max_j = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(parse_err(
                line_no,
                format!("expected {} cells, got {}", columns.len(), cells.len()),
            ));
        }
        let row_step: u64 = cells[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad step `{}`", cells[0])))?;
        match step {
            None => step = Some(row_step),
            Some(s) if s != row_step => {
                return Err(parse_err(line_no, format!("mixed steps {s} and {row_step}")))
            }
            _ => {}
        }
        let i: usize = cells[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad i `{}`", cells[1])))?;
        let j: usize = cells[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad j `{}`", cells[2])))?;
        if i == 0 || j == 0 {
            return Err(parse_err(line_no, "grid indices are 1-based".to_string()));
        }
        let mut state = Vec::with_capacity(p);
        for cell in &cells[3..3 + p] {
            state.push(
                cell.parse()
                    .map_err(|_| parse_err(line_no, format!("bad state value `{cell}`")))?,
            );
        }
        max_i = max_i.max(i);
        max_j = max_j.max(j);
        rows_data.push(Row { i, j, state });
    }
    if rows_data.is_empty() {
        return Err(parse_err(2, "no data rows".to_string()));
    }
    if rows_data.len() != max_i * max_j {
        return Err(parse_err(
            2,
            format!(
                "expected {} rows for a {max_i}x{max_j} grid, got {}",
                max_i * max_j,
                rows_data.len()
            ),
        ));
    }
    let topology = build_topology(max_i, max_j).expect("positive dims");
    let mut data = vec![f64::NAN; rows_data.len() * p];
    let mut seen = vec![false; rows_data.len()];
    for row in &rows_data {
        let idx = topology.index_of(row.i, row.j).expect("bounded by max");
        if seen[idx] {
            return Err(parse_err(
                2,
                format!("duplicate node ({}, {})", row.i, row.j),
            ));
        }
        seen[idx] = true;
        data[idx * p..(idx + 1) * p].copy_from_slice(&row.state);
    }
    Ok((
        LatticeState::new(step.unwrap_or(0), p, data),
        topology,
    ))
}
