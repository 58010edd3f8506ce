//! Line-oriented graph text format.
//!
//! ```text
//! K <num_states>
//! I <state> <log_weight>      # repeatable: initial states
//! F <state> <log_weight>      # repeatable: final states
//! A <src> <dst> <log_weight>  # repeatable: arcs
//! ```
//!
//! States are 0-based; fields are whitespace-separated; `#` starts a comment.
//! `<log_weight>` is a decimal float and the literal `-inf` encodes 0̄.
//! Duplicate `A` lines for the same (src, dst) combine with ⊕, and so do
//! duplicate `I`/`F` lines for the same state. The `K` line must come first.

use std::io::BufRead;

use super::{GraphError, WeightedGraph};
use crate::semiring::LogWeight;
use crate::sparse::{SparseMatrix, SparseVector};

fn parse_error(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_state(token: &str, num_states: usize, line: usize) -> Result<usize, GraphError> {
    let state: usize = token
        .parse()
        .map_err(|_| parse_error(line, format!("invalid state index `{token}`")))?;
    if state >= num_states {
        return Err(parse_error(
            line,
            format!("state {state} out of range for K = {num_states}"),
        ));
    }
    Ok(state)
}

fn parse_weight(token: &str, line: usize) -> Result<LogWeight, GraphError> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_error(line, format!("invalid weight `{token}`")))?;
    LogWeight::new(value).map_err(|e| parse_error(line, format!("invalid weight `{token}`: {e}")))
}

/// Parses a graph from the text format above.
pub fn load_graph<R: BufRead>(reader: R) -> Result<WeightedGraph<LogWeight>, GraphError> {
    let mut num_states: Option<usize> = None;
    let mut initials: Vec<(usize, LogWeight)> = Vec::new();
    let mut finals: Vec<(usize, LogWeight)> = Vec::new();
    let mut arcs: Vec<(usize, usize, LogWeight)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let expect_fields = |n: usize| {
            if fields.len() != n + 1 {
                Err(parse_error(
                    line_no,
                    format!(
                        "`{}` record takes {n} fields, got {}",
                        fields[0],
                        fields.len() - 1
                    ),
                ))
            } else {
                Ok(())
            }
        };
        match fields[0] {
            "K" => {
                expect_fields(1)?;
                if num_states.is_some() {
                    return Err(parse_error(line_no, "duplicate K record"));
                }
                let k: usize = fields[1].parse().map_err(|_| {
                    parse_error(line_no, format!("invalid state count `{}`", fields[1]))
                })?;
                if k == 0 {
                    return Err(GraphError::NoStates);
                }
                num_states = Some(k);
            }
            kind @ ("I" | "F") => {
                expect_fields(2)?;
                let k =
                    num_states.ok_or_else(|| parse_error(line_no, "K record must come first"))?;
                let state = parse_state(fields[1], k, line_no)?;
                let weight = parse_weight(fields[2], line_no)?;
                if kind == "I" {
                    initials.push((state, weight));
                } else {
                    finals.push((state, weight));
                }
            }
            "A" => {
                expect_fields(3)?;
                let k =
                    num_states.ok_or_else(|| parse_error(line_no, "K record must come first"))?;
                let src = parse_state(fields[1], k, line_no)?;
                let dst = parse_state(fields[2], k, line_no)?;
                let weight = parse_weight(fields[3], line_no)?;
                arcs.push((src, dst, weight));
            }
            other => {
                return Err(parse_error(line_no, format!("unknown record `{other}`")));
            }
        }
    }

    let k = num_states.ok_or_else(|| parse_error(0, "missing K record (empty input?)"))?;
    WeightedGraph::new(
        SparseMatrix::from_triplets(k, k, &arcs)?,
        SparseVector::from_pairs(k, initials)?,
        SparseVector::from_pairs(k, finals)?,
    )
}

/// Serializes a graph canonically: `K` first, then `I`, `F` and `A` records,
/// each sorted by state (arcs by source, then destination). Weights print in
/// shortest round-trip form, so `load_graph(save_graph(g))` recovers `g`
/// exactly.
pub fn save_graph(g: &WeightedGraph<LogWeight>) -> String {
    let mut out = String::new();
    out.push_str(&format!("K {}\n", g.num_states()));
    for &(state, w) in g.initial().entries() {
        out.push_str(&format!("I {state} {w}\n"));
    }
    for &(state, w) in g.finals().entries() {
        out.push_str(&format!("F {state} {w}\n"));
    }
    for (src, dst, w) in g.transitions().triplets() {
        out.push_str(&format!("A {src} {dst} {w}\n"));
    }
    out
}
