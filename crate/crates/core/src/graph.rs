//! Undirected weighted graphs and edge-list ingestion.

use std::collections::HashSet;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph on dense node ids `0..n`.
///
/// Each undirected edge is stored once with `u < v`; the adjacency matrix is
/// kept in compressed-row form with both orientations.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    degrees: Vec<f64>,
    adjacency: CsrMatrix,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInput("graph must have at least one node".into()));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (idx, (u, v, w)) in edges.into_iter().enumerate() {
            let line = idx + 1;
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) has an endpoint outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::SelfLoop { node: u, line });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) weight {w} must be finite and > 0"
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge { u, v, line });
            }
            stored.push(Edge { u: a, v: b, weight: w });
        }
        let triplets: Vec<(usize, usize, f64)> = stored
            .iter()
            .flat_map(|e| [(e.u, e.v, e.weight), (e.v, e.u, e.weight)])
            .collect();
        let adjacency = CsrMatrix::from_triplets(n, n, &triplets);
        let degrees = adjacency.row_sums();
        Ok(Self {
            n,
            edges: stored,
            degrees,
            adjacency,
        })
    }

    /// Unweighted convenience constructor.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    /// Neighbor ids (sorted) and edge weights of `i`.
    pub fn neighbors(&self, i: usize) -> (&[usize], &[f64]) {
        self.adjacency.row(i)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency.row(i).0.binary_search(&j).is_ok()
    }

    pub fn min_degree(&self) -> f64 {
        self.degrees.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in self.neighbors(i).0 {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.n
    }

    /// Two-colouring check over every component.
    pub fn is_bipartite(&self) -> bool {
        let mut colour = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if colour[start] != u8::MAX {
                continue;
            }
            colour[start] = 0;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for &j in self.neighbors(i).0 {
                    if colour[j] == u8::MAX {
                        colour[j] = 1 - colour[i];
                        stack.push(j);
                    } else if colour[j] == colour[i] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// SHA-256 over `n` and the canonical edge list, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| (e.u, e.v));
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        for e in &edges {
            h.update((e.u as u64).to_le_bytes());
            h.update((e.v as u64).to_le_bytes());
            h.update(e.weight.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Parses `u<TAB>v[<TAB>w]` lines; `#` starts a comment, blank lines are skipped.
/// The node count is inferred as the largest id plus one.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    let mut max_id = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let id = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad node id {s:?}: {e}"),
            })
        };
        let u = id(fields[0])?;
        let v = id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad weight {s:?}: {e}"),
            })?,
            None => 1.0,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("weight {w} must be finite and > 0"),
            });
        }
        if u == v {
            return Err(Error::SelfLoop { node: u, line: line_no });
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v, w));
        lines.push(line_no);
    }
    let Some(max_id) = max_id else {
        return Err(Error::Parse {
            line: 0,
            msg: "edge list is empty".into(),
        });
    };
    // Report duplicates with the file line, not the edge index.
    let mut seen = HashSet::new();
    for (&(u, v, _), &line) in edges.iter().zip(&lines) {
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge { u, v, line });
        }
    }
    Graph::new(max_id + 1, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}
