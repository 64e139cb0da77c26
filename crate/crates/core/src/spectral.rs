//! Symmetric eigendecomposition, graph Fourier transform and spectral filtering.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{dim_err, Error, Result};
use crate::graph::Graph;
use crate::normalize::{normalize, NormKind, NormalizedMatrix};

pub const DEFAULT_SPECTRAL_CAP: usize = 5000;
pub const SPECTRAL_CAP_ENV: &str = "GFZ_SPECTRAL_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralConfig {
    /// Largest `n` that may be densified.
    pub cap: usize,
    /// Keep only the `l` lowest-frequency components.
    pub truncate: Option<usize>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SPECTRAL_CAP,
            truncate: None,
        }
    }
}

impl SpectralConfig {
    /// Default config with the cap overridden by `GFZ_SPECTRAL_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(raw) = std::env::var(SPECTRAL_CAP_ENV) {
            cfg.cap = raw.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{SPECTRAL_CAP_ENV}={raw:?} is not a node count"))
            })?;
        }
        Ok(cfg)
    }
}

/// Eigenpairs of a symmetric graph matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub lambdas: DVector<f64>,
    /// Orthonormal eigenvectors as columns.
    pub u: DMatrix<f64>,
    pub source_kind: NormKind,
    /// Degree vector of the decomposed normalization; used to map the basis
    /// onto the random-walk forms by diagonal similarity.
    pub degrees: Vec<f64>,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn components(&self) -> usize {
        self.u.ncols()
    }

    /// Eigenvalues expressed on the normalized-Laplacian axis: identical for
    /// Laplacian kinds, `1 − μ` for normalized adjacency kinds.
    pub fn laplacian_eigenvalues(&self) -> DVector<f64> {
        if self.source_kind.is_laplacian() {
            self.lambdas.clone()
        } else {
            self.lambdas.map(|mu| 1.0 - mu)
        }
    }

    /// Keeps the `l` lowest-frequency components (smallest Laplacian-axis values).
    pub fn truncate(&self, l: usize) -> SpectralBasis {
        let axis = self.laplacian_eigenvalues();
        let mut order: Vec<usize> = (0..self.components()).collect();
        order.sort_by(|&a, &b| axis[a].total_cmp(&axis[b]));
        order.truncate(l.min(order.len()));
        order.sort_unstable();
        SpectralBasis {
            lambdas: DVector::from_iterator(order.len(), order.iter().map(|&i| self.lambdas[i])),
            u: self.u.select_columns(&order),
            source_kind: self.source_kind,
            degrees: self.degrees.clone(),
        }
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.components();
        (self.u.transpose() * &self.u - DMatrix::identity(k, k)).abs().max()
    }

    pub fn reconstruction_residual(&self, m: &DMatrix<f64>) -> f64 {
        let rebuilt = &self.u * DMatrix::from_diagonal(&self.lambdas) * self.u.transpose();
        (m - rebuilt).abs().max()
    }
}

pub fn eigendecompose(m: &NormalizedMatrix) -> Result<SpectralBasis> {
    eigendecompose_with(m, &SpectralConfig::default())
}

pub fn eigendecompose_with(m: &NormalizedMatrix, cfg: &SpectralConfig) -> Result<SpectralBasis> {
    if !m.kind.is_symmetric() {
        return Err(Error::UnsupportedKind(format!(
            "{} is not symmetric; decompose its symmetric partner instead",
            m.kind
        )));
    }
    let n = m.n();
    if n > cfg.cap {
        return Err(Error::ResourceLimit { n, cap: cfg.cap });
    }
    let basis = decompose_dense(m.to_dense(), m.kind, m.degrees.clone())?;
    Ok(match cfg.truncate {
        Some(l) => basis.truncate(l),
        None => basis,
    })
}

/// Normalizes `g` with `kind` and decomposes the result.
pub fn decompose_graph(g: &Graph, kind: NormKind, cfg: &SpectralConfig) -> Result<SpectralBasis> {
    let m = normalize(g, kind)?;
    eigendecompose_with(&m, cfg)
}

pub(crate) fn decompose_dense(
    dense: DMatrix<f64>,
    kind: NormKind,
    degrees: Vec<f64>,
) -> Result<SpectralBasis> {
    let n = dense.nrows();
    if dense.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let eig = SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lambdas = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut u = eig.eigenvectors.select_columns(&order);
    for mut col in u.column_iter_mut() {
        let pivot = col.iter().copied().fold(0.0f64, |best, v| {
            if v.abs() > best.abs() + 1e-12 {
                v
            } else {
                best
            }
        });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    Ok(SpectralBasis {
        lambdas,
        u,
        source_kind: kind,
        degrees,
    })
}

fn check_rows(basis: &SpectralBasis, x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != basis.n() {
        return Err(dim_err(format!("{} rows", basis.n()), format!("{} rows", x.nrows())));
    }
    Ok(())
}

/// `X̂ = UᵀX`
pub fn gft(basis: &SpectralBasis, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_rows(basis, x)?;
    Ok(basis.u.transpose() * x)
}

/// `X = U X̂`
pub fn inverse_gft(basis: &SpectralBasis, xhat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if xhat.nrows() != basis.components() {
        return Err(dim_err(
            format!("{} rows", basis.components()),
            format!("{} rows", xhat.nrows()),
        ));
    }
    Ok(&basis.u * xhat)
}

/// `Z = U·diag(g(Λ))·UᵀX`, where `g` receives the basis's own eigenvalues.
pub fn apply_response(
    basis: &SpectralBasis,
    g: impl Fn(f64) -> f64,
    x: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let gains = response_gains(&basis.lambdas, g)?;
    filter_with_gains(basis, &gains, x)
}

pub(crate) fn response_gains(lambdas: &DVector<f64>, g: impl Fn(f64) -> f64) -> Result<DVector<f64>> {
    let mut gains = DVector::zeros(lambdas.len());
    for (i, &lam) in lambdas.iter().enumerate() {
        let v = g(lam);
        if !v.is_finite() {
            return Err(Error::Numeric(format!("response is {v} at lambda = {lam}")));
        }
        gains[i] = v;
    }
    Ok(gains)
}

pub(crate) fn filter_with_gains(
    basis: &SpectralBasis,
    gains: &DVector<f64>,
    x: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let mut xhat = gft(basis, x)?;
    for (mut row, &g) in xhat.row_iter_mut().zip(gains.iter()) {
        row *= g;
    }
    inverse_gft(basis, &xhat)
}

const CACHE_MAGIC: &[u8; 5] = b"GFZB1";

/// Writes `magic, n (u64 LE), Λ, U row-major` as little-endian f64.
pub fn write_basis(path: impl AsRef<Path>, basis: &SpectralBasis) -> Result<()> {
    let n = basis.n();
    if basis.components() != n {
        return Err(Error::InvalidParameter("only full (untruncated) bases are cached".into()));
    }
    let mut buf = Vec::with_capacity(5 + 8 + 8 * (n + n * n));
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for v in basis.lambdas.iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for i in 0..n {
        for j in 0..n {
            buf.extend_from_slice(&basis.u[(i, j)].to_le_bytes());
        }
    }
    fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

/// Reads a cache file; the caller supplies what the file key encodes.
pub fn read_basis(
    path: impl AsRef<Path>,
    source_kind: NormKind,
    degrees: Vec<f64>,
) -> Result<SpectralBasis> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |msg: &str| Error::Parse {
        line: 0,
        msg: format!("basis cache: {msg}"),
    };
    if bytes.len() < 13 || &bytes[..5] != CACHE_MAGIC {
        return Err(bad("missing GFZB1 header"));
    }
    let n = u64::from_le_bytes(bytes[5..13].try_into().unwrap()) as usize;
    let want = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_add(n))
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(13))
        .ok_or_else(|| bad("size overflow"))?;
    if bytes.len() != want {
        return Err(bad(&format!("expected {want} bytes, found {}", bytes.len())));
    }
    if degrees.len() != n {
        return Err(dim_err(format!("{n} degrees"), format!("{}", degrees.len())));
    }
    let mut vals = bytes[13..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let lambdas = DVector::from_iterator(n, vals.by_ref().take(n));
    let u = DMatrix::from_row_iterator(n, n, vals);
    Ok(SpectralBasis {
        lambdas,
        u,
        source_kind,
        degrees,
    })
}

/// Directory of cached bases keyed by (graph content hash, kind).
#[derive(Debug, Clone)]
pub struct BasisCache {
    dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, g: &Graph, kind: NormKind) -> PathBuf {
        self.dir.join(format!("{}-{}.gfzb", g.content_hash(), kind.name()))
    }

    /// Returns the cached basis, decomposing and storing it on a miss.
    pub fn get_or_compute(&self, g: &Graph, kind: NormKind, cfg: &SpectralConfig) -> Result<SpectralBasis> {
        let path = self.path_for(g, kind);
        let m = normalize(g, kind)?;
        let basis = if path.exists() {
            read_basis(&path, kind, m.degrees)?
        } else {
            let basis = eigendecompose_with(&m, &SpectralConfig { truncate: None, ..*cfg })?;
            fs::create_dir_all(&self.dir)?;
            write_basis(&path, &basis)?;
            basis
        };
        Ok(match cfg.truncate {
            Some(l) => basis.truncate(l),
            None => basis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn basis_of(pairs: &[(usize, usize)], n: usize, kind: NormKind) -> SpectralBasis {
        let g = Graph::from_pairs(n, pairs).unwrap();
        decompose_graph(&g, kind, &SpectralConfig::default()).unwrap()
    }

    #[test]
    fn k2_sym_laplacian() {
        let b = basis_of(&[(0, 1)], 2, NormKind::SymLaplacian);
        assert!((b.lambdas[0] - 0.0).abs() < 1e-12);
        assert!((b.lambdas[1] - 2.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.u[(0, 0)].abs() - s).abs() < 1e-12 && (b.u[(1, 0)].abs() - s).abs() < 1e-12);
        assert!((b.u[(0, 1)] + b.u[(1, 1)]).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_kind_is_unsupported() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let m = normalize(&g, NormKind::RwLeft).unwrap();
        assert!(matches!(eigendecompose(&m), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let m = normalize(&g, NormKind::SymLaplacian).unwrap();
        let cfg = SpectralConfig { cap: 2, truncate: None };
        assert!(matches!(
            eigendecompose_with(&m, &cfg),
            Err(Error::ResourceLimit { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn diagonal_input() {
        let c = [3.0, -1.0, 2.0, 0.5];
        let b = decompose_dense(
            DMatrix::from_diagonal(&DVector::from_row_slice(&c)),
            NormKind::Laplacian,
            vec![0.0; 4],
        )
        .unwrap();
        assert_eq!(b.lambdas.as_slice(), &[-1.0, 0.5, 2.0, 3.0]);
        for j in 0..4 {
            let col = b.u.column(j);
            assert_eq!(col.iter().filter(|v| **v == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|v| **v == 0.0).count(), 3);
        }
    }

    #[test]
    fn gft_of_first_eigenvector_is_unit_impulse() {
        let b = basis_of(&[(0, 1), (1, 2), (2, 3), (0, 2)], 4, NormKind::SymLaplacian);
        let x = b.u.columns(0, 1).into_owned();
        let xhat = gft(&b, &x).unwrap();
        assert!((xhat[0] - 1.0).abs() < 1e-8);
        assert!(xhat.rows(1, 3).abs().max() < 1e-8);
        assert_eq!(gft(&b, &DMatrix::zeros(4, 2)).unwrap(), DMatrix::zeros(4, 2));
    }

    #[test]
    fn two_minus_lambda_on_k2() {
        let b = basis_of(&[(0, 1)], 2, NormKind::SymLaplacian);
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let z = apply_response(&b, |l| 2.0 - l, &x).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_response_names_lambda() {
        let b = basis_of(&[(0, 1)], 2, NormKind::SymLaplacian);
        let x = DMatrix::from_element(2, 1, 1.0);
        match apply_response(&b, |l| 1.0 / l, &x) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("lambda")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_keeps_lowest_frequencies() {
        let b = basis_of(&[(0, 1), (1, 2), (2, 3)], 4, NormKind::Sym);
        let t = b.truncate(2);
        assert_eq!(t.components(), 2);
        let axis = t.laplacian_eigenvalues();
        let full = b.laplacian_eigenvalues();
        let mut sorted: Vec<f64> = full.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        let mut kept: Vec<f64> = axis.iter().copied().collect();
        kept.sort_by(f64::total_cmp);
        assert!((kept[0] - sorted[0]).abs() < 1e-12 && (kept[1] - sorted[1]).abs() < 1e-12);
        assert!(t.orthonormality_residual() < 1e-10);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let cache = BasisCache::new(dir.path());
        let cfg = SpectralConfig::default();
        let first = cache.get_or_compute(&g, NormKind::SymLaplacian, &cfg).unwrap();
        let path = cache.path_for(&g, NormKind::SymLaplacian);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..5], b"GFZB1");
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), 4);
        assert_eq!(bytes.len(), 13 + 8 * (4 + 16));
        let second = cache.get_or_compute(&g, NormKind::SymLaplacian, &cfg).unwrap();
        assert_eq!(first.lambdas, second.lambdas);
        assert_eq!(first.u, second.u);
        std::fs::write(&path, b"nope").unwrap();
        assert!(read_basis(&path, NormKind::SymLaplacian, vec![2.0; 4]).is_err());
    }
}
