//! Wall-clock timing of the three operator families on synthetic workloads.

use std::time::Instant;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generators::{erdos_renyi, random_features};
use crate::graph::Graph;
use crate::io::fmt_sig;
use crate::normalize::{normalize, NormKind};
use crate::zoo::{apply_spatial_normalized, Family, OperatorSpec, SpatialConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub families: Vec<Family>,
    pub sizes: Vec<usize>,
    /// Polynomial order; also the numerator order of the rational operator.
    pub k: usize,
    pub reps: usize,
    pub features: usize,
    pub expected_degree: f64,
    /// Fixed edge probability, overriding `expected_degree`.
    pub edge_probability: Option<f64>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Linear, Family::Polynomial, Family::Rational],
            sizes: vec![500, 1000, 2000],
            k: 4,
            reps: 3,
            features: 16,
            expected_degree: 8.0,
            edge_probability: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub family: Family,
    pub n: usize,
    pub f: usize,
    pub k: usize,
    pub median_seconds: f64,
    pub reps: usize,
    /// Operator applications per timed repetition.
    pub inner: usize,
    /// `2|E| / (n(n−1))`
    pub density: f64,
    /// SHA-256 over the graph and feature bits.
    pub workload: String,
}

/// The graph and features timed at size `n`; a pure function of its inputs.
pub fn workload(cfg: &BenchConfig, n: usize) -> Result<(Graph, DMatrix<f64>)> {
    let p = cfg
        .edge_probability
        .unwrap_or_else(|| (cfg.expected_degree / (n.max(2) - 1) as f64).min(1.0));
    let g = erdos_renyi(n, p, cfg.seed)?;
    let x = random_features(n, cfg.features, cfg.seed.wrapping_add(1));
    Ok((g, x))
}

pub fn workload_hash(g: &Graph, x: &DMatrix<f64>) -> String {
    let mut h = Sha256::new();
    h.update(g.content_hash().as_bytes());
    for v in x.iter() {
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Representative operator per family over the renormalized symmetric
/// adjacency (safe on isolated nodes).
pub fn representative(family: Family, k: usize) -> Result<OperatorSpec> {
    let k = k.max(1);
    let smooth = vec![1.0 / (k + 1) as f64; k + 1];
    match family {
        Family::Linear => OperatorSpec::new("linear", NormKind::RenormSym, vec![1.0, 1.0], vec![1.0], family),
        Family::Polynomial => OperatorSpec::new("polynomial", NormKind::RenormSym, smooth, vec![1.0], family),
        Family::Rational => OperatorSpec::new("rational", NormKind::RenormSym, smooth, vec![1.0, -0.5], family),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Times every `(family, n)` pair on a single worker thread. Each record is
/// the median over `reps` repetitions after one discarded warm-up; fast
/// operators are repeated inside each repetition until a repetition lasts
/// at least 100 µs.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.reps < 3 {
        return Err(Error::InvalidParameter(format!("reps must be ≥ 3, got {}", cfg.reps)));
    }
    if cfg.sizes.is_empty() || cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("sizes must be non-empty and ascending".into()));
    }
    if cfg.families.is_empty() {
        return Err(Error::InvalidParameter("no families to time".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut out = Vec::new();
        for &n in &cfg.sizes {
            let (g, x) = workload(cfg, n)?;
            let hash = workload_hash(&g, &x);
            let m = normalize(&g, NormKind::RenormSym)?;
            let density = if n > 1 {
                2.0 * g.edges().len() as f64 / (n * (n - 1)) as f64
            } else {
                0.0
            };
            for &family in &cfg.families {
                let spec = representative(family, cfg.k)?;
                let run = || apply_spatial_normalized(&spec, &m, &x, &SpatialConfig::default());
                let start = Instant::now();
                run()?;
                let mut inner = 1usize;
                let mut elapsed = start.elapsed().as_secs_f64();
                while elapsed < 1e-4 && inner < 1 << 24 {
                    inner *= 10;
                    let t = Instant::now();
                    for _ in 0..inner {
                        run()?;
                    }
                    elapsed = t.elapsed().as_secs_f64();
                }
                let mut times = Vec::with_capacity(cfg.reps);
                for _ in 0..cfg.reps {
                    let t = Instant::now();
                    for _ in 0..inner {
                        run()?;
                    }
                    times.push((t.elapsed().as_secs_f64() / inner as f64).max(f64::MIN_POSITIVE));
                }
                out.push(BenchRecord {
                    family,
                    n,
                    f: cfg.features,
                    k: cfg.k,
                    median_seconds: median(times),
                    reps: cfg.reps,
                    inner,
                    density,
                    workload: hash.clone(),
                });
            }
        }
        Ok(out)
    })
}

/// Inversions of `rational ≥ polynomial ≥ linear` at the largest size.
pub fn ordering_violations(records: &[BenchRecord]) -> Vec<String> {
    let Some(n) = records.iter().map(|r| r.n).max() else {
        return Vec::new();
    };
    let time = |f: Family| records.iter().find(|r| r.n == n && r.family == f).map(|r| r.median_seconds);
    let chain = [Family::Rational, Family::Polynomial, Family::Linear];
    let mut out = Vec::new();
    for pair in chain.windows(2) {
        if let (Some(hi), Some(lo)) = (time(pair[0]), time(pair[1])) {
            if hi < lo {
                out.push(format!(
                    "n={n}: {} median {hi:.3e}s below {} median {lo:.3e}s",
                    pair[0], pair[1]
                ));
            }
        }
    }
    out
}

/// `family,n,F,K,median_seconds,reps`
pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("family,n,F,K,median_seconds,reps\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.family,
            r.n,
            r.f,
            r.k,
            fmt_sig(r.median_seconds, 12),
            r.reps
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_record() {
        let cfg = BenchConfig {
            families: vec![Family::Linear],
            sizes: vec![100],
            ..Default::default()
        };
        let recs = run_bench(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].median_seconds > 0.0 && recs[0].reps == 3);
        assert_eq!(bench_csv(&recs).lines().count(), 2);
    }

    #[test]
    fn config_validation() {
        let base = BenchConfig { sizes: vec![50], ..Default::default() };
        assert!(run_bench(&BenchConfig { reps: 2, ..base.clone() }).is_err());
        assert!(run_bench(&BenchConfig { sizes: vec![200, 100], ..base.clone() }).is_err());
        assert!(run_bench(&BenchConfig { families: vec![], ..base }).is_err());
    }

    #[test]
    fn workloads_are_bit_identical() {
        let cfg = BenchConfig::default();
        let (g1, x1) = workload(&cfg, 300).unwrap();
        let (g2, x2) = workload(&cfg, 300).unwrap();
        assert_eq!(workload_hash(&g1, &x1), workload_hash(&g2, &x2));
        let mean_deg = g1.degrees().iter().sum::<f64>() / 300.0;
        assert!((mean_deg - 8.0).abs() < 1.0);
    }

    #[test]
    fn inversions_are_reported() {
        let rec = |family, t| BenchRecord {
            family,
            n: 10,
            f: 1,
            k: 1,
            median_seconds: t,
            reps: 3,
            inner: 1,
            density: 0.1,
            workload: String::new(),
        };
        assert!(ordering_violations(&[rec(Family::Linear, 1.0), rec(Family::Polynomial, 2.0), rec(Family::Rational, 3.0)]).is_empty());
        assert_eq!(ordering_violations(&[rec(Family::Linear, 5.0), rec(Family::Polynomial, 2.0)]).len(), 1);
    }
}
