//! Simulation configuration: the typed struct, the text document format,
//! validation, and provenance hashing.
//!
//! The document format is one dotted key per line, `key = value`, with `#`
//! comments. Unknown keys are rejected; missing keys fall back to the
//! standard settings and each fallback is reported as a warning.

use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown key `{key}` at line {line}")]
    UnknownKey { line: usize, key: String },
    #[error("duplicate key `{key}` at line {line}")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
}

/// Open real interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Full experiment description. Field-for-field mirror of the config
/// document keys.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub rows: usize,
    pub cols: usize,
    /// State dimension p.
    pub state_dim: usize,
    pub state_init_range: Interval,
    pub offset_range: Interval,
    /// Multiplier applied to the sampled offsets (default 1). Scaling this
    /// instead of re-sampling keeps all random draws shared across runs.
    pub offset_scale: f64,
    pub edge_weight_range: Interval,
    /// 1-based grid coordinates of the high-influence nodes, sorted.
    pub high_positions: Vec<(usize, usize)>,
    pub high_weight: f64,
    pub low_weight: f64,
    pub coupling: Matrix,
    /// Interaction threshold ψ; neighbor differences beyond it (infinity
    /// norm, strict) exert no influence. `f64::INFINITY` disables gating.
    pub psi: f64,
    pub steps: u64,
    pub snapshot_every: u64,
    pub seed: u64,
    /// Abort a run (rather than warn) when the pairwise stability check fails.
    pub strict_stability: bool,
}

impl SimulationConfig {
    /// The standard settings: 20×20 grid, p = 2, states in (0, 2), offsets in
    /// (−0.02, 0.08), edge weights in (0, 0.33), four high-weight nodes at
    /// weight 3 (others 1), identity coupling, ψ = 4, 10000 steps sampled
    /// every 100.
    pub fn standard(seed: u64) -> Self {
        SimulationConfig {
            rows: 20,
            cols: 20,
            state_dim: 2,
            state_init_range: Interval::new(0.0, 2.0),
            offset_range: Interval::new(-0.02, 0.08),
            offset_scale: 1.0,
            edge_weight_range: Interval::new(0.0, 0.33),
            high_positions: vec![(4, 4), (4, 16), (16, 4), (16, 16)],
            high_weight: 3.0,
            low_weight: 1.0,
            coupling: Matrix::identity(2),
            psi: 4.0,
            steps: 10_000,
            snapshot_every: 100,
            seed,
            strict_stability: false,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, msg: String| ConfigError::Invalid {
            key: key.to_string(),
            msg,
        };
        if self.rows == 0 {
            return Err(invalid("grid.rows", "must be at least 1".into()));
        }
        if self.cols == 0 {
            return Err(invalid("grid.cols", "must be at least 1".into()));
        }
        if self.state_dim == 0 {
            return Err(invalid("state.dim", "must be at least 1".into()));
        }
        if !self.state_init_range.is_valid() {
            return Err(invalid(
                "state.init_range",
                format!(
                    "open interval requires lower < upper, got ({}, {})",
                    self.state_init_range.lo, self.state_init_range.hi
                ),
            ));
        }
        if !self.offset_range.is_valid() {
            return Err(invalid(
                "offset.range",
                format!(
                    "open interval requires lower < upper, got ({}, {})",
                    self.offset_range.lo, self.offset_range.hi
                ),
            ));
        }
        if !(self.offset_scale.is_finite() && self.offset_scale > 0.0) {
            return Err(invalid("offset.scale", "must be a positive real".into()));
        }
        if !self.edge_weight_range.is_valid() {
            return Err(invalid(
                "edges.weight_range",
                format!(
                    "open interval requires lower < upper, got ({}, {})",
                    self.edge_weight_range.lo, self.edge_weight_range.hi
                ),
            ));
        }
        if self.edge_weight_range.lo < 0.0 {
            return Err(invalid(
                "edges.weight_range",
                "lower bound must be >= 0 (edge weights are positive)".into(),
            ));
        }
        for &(i, j) in &self.high_positions {
            if i < 1 || i > self.rows || j < 1 || j > self.cols {
                return Err(invalid(
                    "nodes.high_positions",
                    format!("({i}, {j}) is outside the {}x{} grid", self.rows, self.cols),
                ));
            }
        }
        for w in self.high_positions.windows(2) {
            if w[0] == w[1] {
                return Err(invalid(
                    "nodes.high_positions",
                    format!("duplicate position ({}, {})", w[0].0, w[0].1),
                ));
            }
        }
        if !(self.high_weight.is_finite() && self.high_weight > 0.0) {
            return Err(invalid("nodes.high_weight", "must be a positive real".into()));
        }
        if !(self.low_weight.is_finite() && self.low_weight > 0.0) {
            return Err(invalid("nodes.low_weight", "must be a positive real".into()));
        }
        if self.coupling.dim() != self.state_dim {
            return Err(invalid(
                "coupling.matrix",
                format!(
                    "must be {p}x{p} to match state.dim, got {d}x{d}",
                    p = self.state_dim,
                    d = self.coupling.dim()
                ),
            ));
        }
        if self.psi.is_nan() || self.psi <= 0.0 {
            return Err(invalid("psi", "must be > 0".into()));
        }
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot_every", "must be at least 1".into()));
        }
        Ok(())
    }
}

/// Run provenance attached to trajectories and reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical config document.
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(config: &SimulationConfig) -> Self {
        Provenance {
            config_hash: config_hash(config),
            seed: config.seed,
        }
    }
}

/// SHA-256 hex digest of the canonical serialization.
pub fn config_hash(config: &SimulationConfig) -> String {
    let digest = Sha256::digest(serialize_config(config).as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

// ── Serialization ───────────────────────────────────────────────────────────

fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

fn fmt_interval(r: &Interval) -> String {
    format!("({}, {})", fmt_f64(r.lo), fmt_f64(r.hi))
}

fn fmt_positions(ps: &[(usize, usize)]) -> String {
    let inner: Vec<String> = ps.iter().map(|(i, j)| format!("({i}, {j})")).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_matrix(m: &Matrix) -> String {
    if m.is_identity() {
        return "identity".to_string();
    }
    let rows: Vec<String> = m
        .rows()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Canonical text form; `parse_config(serialize_config(c))` reproduces `c`.
pub fn serialize_config(config: &SimulationConfig) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    line("grid.rows", config.rows.to_string());
    line("grid.cols", config.cols.to_string());
    line("state.dim", config.state_dim.to_string());
    line("state.init_range", fmt_interval(&config.state_init_range));
    line("offset.range", fmt_interval(&config.offset_range));
    line("offset.scale", fmt_f64(config.offset_scale));
    line("edges.weight_range", fmt_interval(&config.edge_weight_range));
    line("nodes.high_positions", fmt_positions(&config.high_positions));
    line("nodes.high_weight", fmt_f64(config.high_weight));
    line("nodes.low_weight", fmt_f64(config.low_weight));
    line("coupling.matrix", fmt_matrix(&config.coupling));
    line("psi", fmt_f64(config.psi));
    line("steps", config.steps.to_string());
    line("snapshot_every", config.snapshot_every.to_string());
    line("seed", config.seed.to_string());
    line("strict_stability", config.strict_stability.to_string());
    s
}

// ── Parsing ─────────────────────────────────────────────────────────────────

/// Parse result: the validated config plus one warning per defaulted key.
#[derive(Clone, Debug)]
pub struct ParsedConfig {
    pub config: SimulationConfig,
    pub warnings: Vec<String>,
}

const KEYS: &[&str] = &[
    "grid.rows",
    "grid.cols",
    "state.dim",
    "state.init_range",
    "offset.range",
    "offset.scale",
    "edges.weight_range",
    "nodes.high_positions",
    "nodes.high_weight",
    "nodes.low_weight",
    "coupling.matrix",
    "psi",
    "steps",
    "snapshot_every",
    "seed",
    "strict_stability",
];

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let mut seen: Vec<(usize, String, String)> = Vec::new(); // (line_no, key, value)
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            col: line.len() + 1,
            msg: "expected `key = value`".to_string(),
        })?;
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                col: 1,
                msg: "missing key before `=`".to_string(),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                col: eq + 2,
                msg: format!("missing value for `{key}`"),
            });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        if seen.iter().any(|(_, k, _)| k == key) {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        seen.push((line_no, key.to_string(), value.to_string()));
    }

    let mut config = SimulationConfig::standard(0);
    let mut warnings = Vec::new();
    let mut explicit_coupling: Option<(usize, String)> = None;

    let lookup = |key: &str| -> Option<(usize, String)> {
        seen.iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.clone()))
    };

    for &key in KEYS {
        let Some((line_no, value)) = lookup(key) else {
            warnings.push(format!("key `{key}` missing, using standard default"));
            continue;
        };
        match key {
            "grid.rows" => config.rows = parse_usize(key, line_no, &value)?,
            "grid.cols" => config.cols = parse_usize(key, line_no, &value)?,
            "state.dim" => config.state_dim = parse_usize(key, line_no, &value)?,
            "state.init_range" => config.state_init_range = parse_interval(key, line_no, &value)?,
            "offset.range" => config.offset_range = parse_interval(key, line_no, &value)?,
            "offset.scale" => config.offset_scale = parse_f64(key, line_no, &value)?,
            "edges.weight_range" => {
                config.edge_weight_range = parse_interval(key, line_no, &value)?
            }
            "nodes.high_positions" => {
                config.high_positions = parse_positions(key, line_no, &value)?
            }
            "nodes.high_weight" => config.high_weight = parse_f64(key, line_no, &value)?,
            "nodes.low_weight" => config.low_weight = parse_f64(key, line_no, &value)?,
            "coupling.matrix" => explicit_coupling = Some((line_no, value)),
            "psi" => config.psi = parse_f64(key, line_no, &value)?,
            "steps" => config.steps = parse_u64(key, line_no, &value)?,
            "snapshot_every" => config.snapshot_every = parse_u64(key, line_no, &value)?,
            "seed" => config.seed = parse_u64(key, line_no, &value)?,
            "strict_stability" => config.strict_stability = parse_bool(key, line_no, &value)?,
            _ => unreachable!(),
        }
    }

    // Defaults that depend on other keys resolve last.
    config.coupling = match explicit_coupling {
        Some((line_no, value)) => parse_matrix("coupling.matrix", line_no, &value, config.state_dim)?,
        None => Matrix::identity(config.state_dim),
    };
    config.high_positions.sort_unstable();

    config.validate()?;
    Ok(ParsedConfig { config, warnings })
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn parse_usize(key: &str, line: usize, v: &str) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| syntax(line, 1, format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

fn parse_u64(key: &str, line: usize, v: &str) -> Result<u64, ConfigError> {
    v.parse()
        .map_err(|_| syntax(line, 1, format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

fn parse_f64(key: &str, line: usize, v: &str) -> Result<f64, ConfigError> {
    match v {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        _ => {}
    }
    v.parse()
        .map_err(|_| syntax(line, 1, format!("`{key}` expects a real number, got `{v}`")))
}

fn parse_bool(key: &str, line: usize, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(syntax(line, 1, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

fn parse_interval(key: &str, line: usize, v: &str) -> Result<Interval, ConfigError> {
    let inner = v
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(line, 1, format!("`{key}` expects `(lo, hi)`, got `{v}`")))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return Err(syntax(line, 1, format!("`{key}` expects exactly two bounds, got `{v}`")));
    }
    Ok(Interval::new(
        parse_f64(key, line, parts[0].trim())?,
        parse_f64(key, line, parts[1].trim())?,
    ))
}

fn parse_positions(key: &str, line: usize, v: &str) -> Result<Vec<(usize, usize)>, ConfigError> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, 1, format!("`{key}` expects `[(i, j), ...]`, got `{v}`")))?
        .trim();
    let mut out = Vec::new();
    if inner.is_empty() {
        return Ok(out);
    }
    // Split on the commas between `)` and `(` pairs.
    let mut rest = inner;
    loop {
        let close = rest
            .find(')')
            .ok_or_else(|| syntax(line, 1, format!("`{key}`: unterminated pair in `{v}`")))?;
        let pair = rest[..=close].trim();
        let body = pair
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| syntax(line, 1, format!("`{key}`: malformed pair `{pair}`")))?;
        let nums: Vec<&str> = body.split(',').collect();
        if nums.len() != 2 {
            return Err(syntax(line, 1, format!("`{key}`: pair `{pair}` needs two indices")));
        }
        out.push((
            parse_usize(key, line, nums[0].trim())?,
            parse_usize(key, line, nums[1].trim())?,
        ));
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| syntax(line, 1, format!("`{key}`: expected `,` between pairs in `{v}`")))?
            .trim_start();
        if rest.is_empty() {
            break;
        }
    }
    Ok(out)
}

fn parse_matrix(key: &str, line: usize, v: &str, dim: usize) -> Result<Matrix, ConfigError> {
    if v == "identity" {
        return Ok(Matrix::identity(dim));
    }
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, 1, format!("`{key}` expects `identity` or `[[...], ...]`, got `{v}`")))?
        .trim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .ok_or_else(|| syntax(line, 1, format!("`{key}`: unterminated row in `{v}`")))?;
        let row_text = rest[..=close].trim();
        let body = row_text
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| syntax(line, 1, format!("`{key}`: malformed row `{row_text}`")))?;
        let row: Result<Vec<f64>, ConfigError> = body
            .split(',')
            .map(|n| parse_f64(key, line, n.trim()))
            .collect();
        rows.push(row?);
        rest = rest[close + 1..].trim_start();
        if let Some(stripped) = rest.strip_prefix(',') {
            rest = stripped.trim_start();
        } else if !rest.is_empty() {
            return Err(syntax(line, 1, format!("`{key}`: expected `,` between rows in `{v}`")));
        }
    }
    Matrix::from_rows(&rows).map_err(|e| ConfigError::Invalid {
        key: key.to_string(),
        msg: e.to_string(),
    })
}
