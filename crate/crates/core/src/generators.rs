//! Deterministic synthetic graphs and feature matrices.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn need(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("{what} needs n ≥ {min}, got {n}")));
    }
    Ok(())
}

pub fn path(n: usize) -> Result<Graph> {
    need(n, 2, "path")?;
    Graph::new(n, (1..n).map(|i| (i - 1, i, 1.0)))
}

pub fn cycle(n: usize) -> Result<Graph> {
    need(n, 3, "cycle")?;
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

pub fn complete(n: usize) -> Result<Graph> {
    need(n, 2, "complete graph")?;
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))))
}

/// Node 0 is the center.
pub fn star(n: usize) -> Result<Graph> {
    need(n, 2, "star")?;
    Graph::new(n, (1..n).map(|i| (0, i, 1.0)))
}

/// `G(n, p)`; may be disconnected.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    need(n, 1, "erdos-renyi")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::new(n, edges)
}

/// Connected random graph with the given expected average degree: a random
/// spanning tree plus independent extra edges.
pub fn connected_random(n: usize, expected_degree: f64, seed: u64) -> Result<Graph> {
    need(n, 2, "connected random graph")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adj = vec![false; n * n];
    let mut edges = Vec::new();
    let mut link = |a: usize, b: usize, adj: &mut Vec<bool>| {
        let (u, v) = (a.min(b), a.max(b));
        if !adj[u * n + v] {
            adj[u * n + v] = true;
            edges.push((u, v, 1.0));
        }
    };
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        link(order[k], parent, &mut adj);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let free = pairs - (n - 1) as f64;
    let wanted = expected_degree * n as f64 / 2.0 - (n - 1) as f64;
    let p = if free > 0.0 { (wanted / free).clamp(0.0, 1.0) } else { 0.0 };
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                link(i, j, &mut adj);
            }
        }
    }
    Graph::new(n, edges)
}

/// `n×f` standard-normal entries.
pub fn random_features(n: usize, f: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, f, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(path(4).unwrap().degrees(), &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(cycle(5).unwrap().edges().len(), 5);
        assert_eq!(complete(5).unwrap().edges().len(), 10);
        assert_eq!(star(5).unwrap().degrees()[0], 4.0);
        assert!(path(1).is_err());
    }

    #[test]
    fn connected_and_deterministic() {
        for seed in 0..20 {
            let g = connected_random(40, 4.0, seed).unwrap();
            assert!(g.is_connected());
            assert_eq!(g.edges(), connected_random(40, 4.0, seed).unwrap().edges());
        }
        let mean: f64 = (0..20)
            .map(|s| {
                let g = connected_random(200, 8.0, s).unwrap();
                g.degrees().iter().sum::<f64>() / 200.0
            })
            .sum::<f64>()
            / 20.0;
        assert!((mean - 8.0).abs() < 0.5, "{mean}");
    }

    #[test]
    fn features_are_seeded() {
        assert_eq!(random_features(5, 3, 7), random_features(5, 3, 7));
        assert_ne!(random_features(5, 3, 7), random_features(5, 3, 8));
    }
}
