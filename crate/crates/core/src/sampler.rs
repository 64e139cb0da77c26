//! Seeded random-walk corpora and their empirical transition statistics.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    pub n: usize,
    pub walks: Vec<Vec<usize>>,
    pub length: usize,
    pub per_node: usize,
    pub seed: u64,
    /// Return and in-out parameters of a second-order corpus.
    pub pq: Option<(f64, f64)>,
}

impl WalkCorpus {
    pub fn steps(&self) -> usize {
        self.walks.iter().map(|w| w.len().saturating_sub(1)).sum()
    }

    /// Every consecutive pair is an edge of `g`.
    pub fn follows_edges(&self, g: &Graph) -> bool {
        self.walks.iter().all(|w| w.windows(2).all(|s| g.has_edge(s[0], s[1])))
    }

    /// Header comment with the sampling parameters, then one walk per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# seed={} length={} per_node={}",
            self.seed, self.length, self.per_node
        );
        if let Some((p, q)) = self.pq {
            out.push_str(&format!(" p={p} q={q}"));
        }
        out.push('\n');
        for w in &self.walks {
            let ids: Vec<String> = w.iter().map(|v| v.to_string()).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Parses a corpus file. Header parameters are restored when present; `n` is
/// the largest id plus one.
pub fn parse_corpus(text: &str) -> Result<WalkCorpus> {
    let mut corpus = WalkCorpus {
        n: 0,
        walks: Vec::new(),
        length: 0,
        per_node: 0,
        seed: 0,
        pq: None,
    };
    let (mut p, mut q) = (None, None);
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(header) = line.strip_prefix('#') {
            for kv in header.split_whitespace() {
                let Some((k, v)) = kv.split_once('=') else { continue };
                let bad = || Error::Parse { line: idx + 1, msg: format!("bad header value {kv:?}") };
                match k {
                    "seed" => corpus.seed = v.parse().map_err(|_| bad())?,
                    "length" => corpus.length = v.parse().map_err(|_| bad())?,
                    "per_node" => corpus.per_node = v.parse().map_err(|_| bad())?,
                    "p" => p = Some(v.parse().map_err(|_| bad())?),
                    "q" => q = Some(v.parse().map_err(|_| bad())?),
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let walk: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("node id {t:?} is not a non-negative integer"),
                })
            })
            .collect::<Result<_>>()?;
        corpus.n = corpus.n.max(walk.iter().max().map_or(0, |m| m + 1));
        corpus.walks.push(walk);
    }
    if let (Some(p), Some(q)) = (p, q) {
        corpus.pq = Some((p, q));
    }
    if corpus.length == 0 {
        corpus.length = corpus.walks.first().map_or(0, Vec::len);
    }
    Ok(corpus)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<WalkCorpus> {
    parse_corpus(&fs::read_to_string(path)?)
}

fn check(g: &Graph, length: usize, min_len: usize, per_node: usize) -> Result<()> {
    if length < min_len {
        return Err(Error::InvalidParameter(format!("walk length must be ≥ {min_len}, got {length}")));
    }
    if per_node == 0 {
        return Err(Error::InvalidParameter("walks per node must be ≥ 1".into()));
    }
    if let Some(i) = g.degrees().iter().position(|&d| d <= 0.0) {
        return Err(Error::DegenerateInput(format!("node {i} is isolated; walks cannot leave it")));
    }
    Ok(())
}

/// Index drawn with probability proportional to `weights`.
fn draw(rng: &mut ChaCha8Rng, weights: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = weights.clone().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

fn walk_rng(seed: u64, walk_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk_id as u64);
    rng
}

fn first_order_step(g: &Graph, rng: &mut ChaCha8Rng, cur: usize) -> usize {
    let (cols, vals) = g.neighbors(cur);
    cols[draw(rng, vals.iter().copied())]
}

/// `per_node` first-order walks of `length` nodes from every node, each step
/// drawn proportional to edge weight.
pub fn sample_walks(g: &Graph, length: usize, per_node: usize, seed: u64) -> Result<WalkCorpus> {
    check(g, length, 2, per_node)?;
    let walks = (0..g.n() * per_node)
        .into_par_iter()
        .map(|id| {
            let mut rng = walk_rng(seed, id);
            let mut walk = Vec::with_capacity(length);
            walk.push(id / per_node);
            while walk.len() < length {
                let next = first_order_step(g, &mut rng, *walk.last().unwrap());
                walk.push(next);
            }
            walk
        })
        .collect();
    Ok(WalkCorpus {
        n: g.n(),
        walks,
        length,
        per_node,
        seed,
        pq: None,
    })
}

/// Second-order walks: from `cur` (having come from `prev`), a neighbor `x`
/// gets weight `w(cur, x)` times `1/p` when `x = prev`, `1` when `x` is a
/// neighbor of `prev`, and `1/q` otherwise.
pub fn sample_walks_2nd(g: &Graph, p: f64, q: f64, length: usize, per_node: usize, seed: u64) -> Result<WalkCorpus> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("p and q must be finite and > 0, got p={p} q={q}")));
    }
    check(g, length, 3, per_node)?;
    let (inv_p, inv_q) = (1.0 / p, 1.0 / q);
    let walks = (0..g.n() * per_node)
        .into_par_iter()
        .map(|id| {
            let mut rng = walk_rng(seed, id);
            let mut walk = Vec::with_capacity(length);
            let start = id / per_node;
            walk.push(start);
            walk.push(first_order_step(g, &mut rng, start));
            while walk.len() < length {
                let prev = walk[walk.len() - 2];
                let cur = walk[walk.len() - 1];
                let (cols, vals) = g.neighbors(cur);
                let bias = cols.iter().zip(vals).map(|(&x, &w)| {
                    w * if x == prev {
                        inv_p
                    } else if g.has_edge(prev, x) {
                        1.0
                    } else {
                        inv_q
                    }
                });
                walk.push(cols[draw(&mut rng, bias)]);
            }
            walk
        })
        .collect();
    Ok(WalkCorpus {
        n: g.n(),
        walks,
        length,
        per_node,
        seed,
        pq: Some((p, q)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTransition {
    /// Row-normalized step counts.
    pub matrix: DMatrix<f64>,
    /// Nodes never left in the corpus; their rows are zero.
    pub unvisited: Vec<usize>,
}

fn row_normalize(counts: DMatrix<f64>) -> EmpiricalTransition {
    let mut matrix = counts;
    let mut unvisited = Vec::new();
    for (i, mut row) in matrix.row_iter_mut().enumerate() {
        let s = row.sum();
        if s > 0.0 {
            row /= s;
        } else {
            unvisited.push(i);
        }
    }
    EmpiricalTransition { matrix, unvisited }
}

pub fn empirical_transition(corpus: &WalkCorpus) -> EmpiricalTransition {
    let n = corpus.n;
    let mut counts = DMatrix::zeros(n, n);
    for w in &corpus.walks {
        for s in w.windows(2) {
            counts[(s[0], s[1])] += 1.0;
        }
    }
    row_normalize(counts)
}

/// Row-normalized co-occurrence counts of `(w_i, w_{i+r})` for `r = 1..=window`
/// over every position with a full window ahead of it.
pub fn window_cooccurrence(corpus: &WalkCorpus, window: usize) -> Result<EmpiricalTransition> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be ≥ 1".into()));
    }
    let n = corpus.n;
    let mut counts = DMatrix::zeros(n, n);
    for w in &corpus.walks {
        for i in 0..w.len().saturating_sub(window) {
            for r in 1..=window {
                counts[(w[i], w[i + r])] += 1.0;
            }
        }
    }
    Ok(row_normalize(counts))
}

/// Per-row total-variation distance `½ Σ_j |a_ij − b_ij|`.
pub fn row_tv(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    if a.shape() != b.shape() {
        return Err(crate::error::dim_err(format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    Ok((0..a.nrows()).map(|i| 0.5 * (a.row(i) - b.row(i)).abs().sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path, star};

    fn k2() -> Graph {
        Graph::from_pairs(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn k2_walks_alternate() {
        let c = sample_walks(&k2(), 7, 3, 1).unwrap();
        for w in &c.walks {
            for (i, v) in w.iter().enumerate() {
                assert_eq!(*v, (w[0] + i) % 2);
            }
        }
        let t = empirical_transition(&c);
        assert_eq!(t.matrix, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(t.unvisited.is_empty());
    }

    #[test]
    fn seeded_corpora_are_reproducible() {
        let g = cycle(6).unwrap();
        let a = sample_walks(&g, 10, 4, 42).unwrap();
        assert_eq!(a, sample_walks(&g, 10, 4, 42).unwrap());
        assert_ne!(a.walks, sample_walks(&g, 10, 4, 43).unwrap().walks);
        let b = sample_walks_2nd(&g, 0.5, 2.0, 10, 4, 42).unwrap();
        assert_eq!(b, sample_walks_2nd(&g, 0.5, 2.0, 10, 4, 42).unwrap());
        assert!(a.follows_edges(&g) && b.follows_edges(&g));
        assert!(a.walks.iter().all(|w| w.len() == 10));
    }

    #[test]
    fn isolated_node_is_rejected() {
        let g = Graph::from_pairs(3, &[(0, 1)]).unwrap();
        assert!(matches!(sample_walks(&g, 5, 1, 0), Err(Error::DegenerateInput(_))));
        assert!(sample_walks(&k2(), 1, 1, 0).is_err());
        assert!(sample_walks_2nd(&k2(), 1.0, 1.0, 2, 1, 0).is_err());
    }

    #[test]
    fn star_center_is_uniform() {
        let g = star(5).unwrap();
        let c = sample_walks(&g, 2, 100_000, 7).unwrap();
        let mut counts = [0.0; 5];
        for w in c.walks.iter().filter(|w| w[0] == 0) {
            counts[w[1]] += 1.0;
        }
        let total: f64 = counts.iter().sum();
        let tv: f64 = 0.5 * counts[1..].iter().map(|c| (c / total - 0.25).abs()).sum::<f64>();
        assert!(tv <= 0.02, "{tv}");
    }

    #[test]
    fn large_return_parameter_suppresses_backtracking() {
        let g = cycle(3).unwrap();
        let c = sample_walks_2nd(&g, 1e6, 1.0, 50, 100, 3).unwrap();
        let (mut back, mut total) = (0.0, 0.0);
        for w in &c.walks {
            for s in w.windows(3) {
                total += 1.0;
                if s[0] == s[2] {
                    back += 1.0;
                }
            }
        }
        assert!(back / total <= 0.01);
    }

    #[test]
    fn corpus_text_round_trip() {
        let c = sample_walks_2nd(&path(4).unwrap(), 2.0, 0.5, 5, 2, 9).unwrap();
        let back = parse_corpus(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }
}
