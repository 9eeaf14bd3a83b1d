//! Edge-list text format: one `u v` pair per line, arbitrary whitespace,
//! `#` comment lines ignored.
//!
//! Original ids are remapped to dense indices in ascending id order. A
//! SNAP-style `# Nodes: N` header whose range covers every id keeps the
//! identity map over `0..N`, so isolated nodes survive a write/read cycle.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{EdgeWeights, Graph};
use crate::error::{Error, Result};

struct RawEdges {
    edges: Vec<(i64, i64)>,
    weights: Vec<f64>,
    declared_nodes: Option<usize>,
}

fn declared_nodes(comment: &str) -> Option<usize> {
    let rest = &comment[comment.find("Nodes:")? + "Nodes:".len()..];
    rest.split_whitespace().next()?.parse().ok()
}

fn parse_id(token: &str, line: usize) -> Result<i64> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid node id {token:?}"),
    })
}

fn read_raw<R: BufRead>(reader: R, weighted: bool) -> Result<RawEdges> {
    let expected = if weighted { 3 } else { 2 };
    let mut raw = RawEdges {
        edges: Vec::new(),
        weights: Vec::new(),
        declared_nodes: None,
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if raw.declared_nodes.is_none() {
                raw.declared_nodes = declared_nodes(comment);
            }
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {expected} fields, found {}", tokens.len()),
            });
        }
        let u = parse_id(tokens[0], lineno)?;
        let v = parse_id(tokens[1], lineno)?;
        if u == v {
            return Err(Error::SelfLoop {
                line: lineno,
                node: u,
            });
        }
        if weighted {
            let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight {:?}", tokens[2]),
            })?;
            raw.weights.push(w);
        }
        raw.edges.push((u, v));
    }
    if raw.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(raw)
}

fn remap(raw: &RawEdges) -> Result<(Graph, Vec<usize>)> {
    let mut labels: Vec<i64> = raw.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    if let Some(n) = raw.declared_nodes {
        let (lo, hi) = (labels[0], *labels.last().unwrap());
        if lo >= 0 && (hi as u64) < n as u64 {
            labels = (0..n as i64).collect();
        }
    }
    let index = |id: i64| labels.binary_search(&id).expect("id collected above");
    let pairs: Vec<(usize, usize)> = raw
        .edges
        .iter()
        .map(|&(u, v)| (index(u), index(v)))
        .collect();
    let graph = Graph::with_labels(labels.clone(), pairs.iter().copied())?;
    let edge_of_line = pairs
        .iter()
        .map(|&(u, v)| graph.edge_index(u, v).expect("edge inserted"))
        .collect();
    Ok((graph, edge_of_line))
}

pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let raw = read_raw(reader, false)?;
    Ok(remap(&raw)?.0)
}

pub fn load_edge_list_str(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

pub fn read_edge_list_file<P: AsRef<Path>>(path: P) -> Result<Graph> {
    load_edge_list(BufReader::new(File::open(path)?))
}

/// Reads `u v w` lines. Repeated pairs must carry the same weight.
pub fn load_weighted_edge_list<R: BufRead>(reader: R) -> Result<(Graph, EdgeWeights)> {
    let raw = read_raw(reader, true)?;
    let (graph, edge_of_line) = remap(&raw)?;
    let mut values = vec![f64::NAN; graph.num_edges()];
    for (line_edge, (&e, &w)) in edge_of_line.iter().zip(&raw.weights).enumerate() {
        if !values[e].is_nan() && values[e] != w {
            return Err(Error::InvalidParameter(format!(
                "conflicting weights for edge entry {}",
                line_edge + 1
            )));
        }
        values[e] = w;
    }
    let weights = EdgeWeights::new(&graph, values)?;
    Ok((graph, weights))
}

/// Writes the graph with a `# Nodes: N Edges: M` header, one canonical edge
/// per line using original ids.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# Undirected graph")?;
    writeln!(
        out,
        "# Nodes: {} Edges: {}",
        graph.num_nodes(),
        graph.num_edges()
    )?;
    for &(u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}
