//! Low-pass profiles, Dirichlet energy and over-smoothing trajectories.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{dim_err, Error, Result};
use crate::graph::Graph;
use crate::io::fmt_sig;
use crate::normalize::{normalize, NormKind, NormalizedMatrix};
use crate::solve::{dense_solve, iterative_solve, ITERATIVE_TOL};
use crate::spectral::{SpectralBasis, DEFAULT_SPECTRAL_CAP};
use crate::zoo::{apply_spatial_normalized, OperatorSpec, SpatialConfig};

/// `w_i = |bias − λ_i| / Σ_j |bias − λ_j|`.
pub fn lowpass_profile(lambdas: &[f64], bias: f64) -> Result<Vec<f64>> {
    let total: f64 = lambdas.iter().map(|l| (bias - l).abs()).sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "every eigenvalue equals the bias {bias}; the profile is undefined"
        )));
    }
    Ok(lambdas.iter().map(|l| (bias - l).abs() / total).collect())
}

/// Slope of `w(λ)` in `λ` when `bias ≥ max λ`: `−1/(N·bias − Σλ)`.
pub fn lowpass_slope(lambdas: &[f64], bias: f64) -> f64 {
    -1.0 / (lambdas.len() as f64 * bias - lambdas.iter().sum::<f64>())
}

/// `Tr(ZᵀLZ)` for a Laplacian kind `L`.
pub fn dirichlet_energy(l: &NormalizedMatrix, z: &DMatrix<f64>) -> Result<f64> {
    if !l.kind.is_laplacian() {
        return Err(Error::KindMismatch {
            spec: "a Laplacian kind".into(),
            basis: l.kind.name().into(),
        });
    }
    if z.nrows() != l.n() {
        return Err(dim_err(format!("{} rows", l.n()), format!("{} rows", z.nrows())));
    }
    let lz = l.matrix.mul_dense(z)?;
    Ok(z.component_mul(&lz).sum())
}

/// Exponent `s` with `D^s Z` in the symmetric coordinates of `kind`.
fn symmetric_exponent(kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::RwLeft | NormKind::RenormLeft => Ok(0.5),
        NormKind::RwRight | NormKind::RenormRight => Ok(-0.5),
        NormKind::Sym | NormKind::RenormSym => Ok(0.0),
        other => Err(Error::UnsupportedKind(format!(
            "{other} has no stationary direction; use a normalized adjacency"
        ))),
    }
}

/// The stationary direction `v ∝ D^{1/2}·1` of a normalized adjacency, plus
/// the coordinate exponent that makes the operator symmetric.
struct Stationary {
    v: DVector<f64>,
    scale: Vec<f64>,
}

impl Stationary {
    fn new(kind: NormKind, degrees: &[f64]) -> Result<Self> {
        let s = symmetric_exponent(kind)?;
        if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::DegenerateInput(format!("node {i} has zero degree")));
        }
        let v = DVector::from_iterator(degrees.len(), degrees.iter().map(|d| d.sqrt())).normalize();
        let scale = degrees.iter().map(|d| d.powf(s)).collect();
        Ok(Self { v, scale })
    }

    fn to_sym(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = z.clone();
        for (mut row, s) in y.row_iter_mut().zip(&self.scale) {
            row *= *s;
        }
        y
    }

    /// Component of `D^s Z` orthogonal to `v`.
    fn residual(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let y = self.to_sym(z);
        let coef = self.v.transpose() * &y;
        y - &self.v * coef
    }
}

/// `‖(I − vvᵀ) D^s Z‖²_F`: energy outside the stationary direction, in the
/// coordinates where `kind` is symmetric.
pub fn non_constant_energy(g: &Graph, kind: NormKind, z: &DMatrix<f64>) -> Result<f64> {
    if z.nrows() != g.n() {
        return Err(dim_err(format!("{} rows", g.n()), format!("{} rows", z.nrows())));
    }
    let degrees: Vec<f64> = if kind.is_renormalized() {
        g.degrees().iter().map(|d| d + 1.0).collect()
    } else {
        g.degrees().to_vec()
    };
    let st = Stationary::new(kind, &degrees)?;
    Ok(st.residual(z).norm_squared())
}

/// Max Euclidean distance between two rows of `z`.
pub fn max_row_distance(z: &DMatrix<f64>) -> f64 {
    let n = z.nrows();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max((z.row(i) - z.row(j)).norm());
        }
    }
    best
}

/// Combinatorial bipartiteness of a connected graph shows up as an
/// eigenvalue of `Ãₙ` at −1 (Laplacian eigenvalue at 2).
pub fn is_bipartite_spectrum(basis: &SpectralBasis) -> bool {
    basis.laplacian_eigenvalues().iter().any(|&l| l >= 2.0 - 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub k: usize,
    /// Max pairwise row distance over `‖X‖_max`.
    pub max_row_dist: f64,
    /// `Tr(Zᵀ L̃ Z)` with the operator's normalized Laplacian.
    pub dirichlet: f64,
    /// Max entry of `Z` minus its stationary projection, over `‖X‖_max`.
    pub stationary_dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingTrajectory {
    pub name: String,
    pub records: Vec<TrajectoryRecord>,
}

impl SmoothingTrajectory {
    /// `k,max_row_dist,dirichlet,stationary_dist`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,max_row_dist,dirichlet,stationary_dist\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.k,
                fmt_sig(r.max_row_dist, 12),
                fmt_sig(r.dirichlet, 12),
                fmt_sig(r.stationary_dist, 12)
            ));
        }
        out
    }
}

/// Applies `spec` `steps` times, recording metrics after each application.
pub fn smoothing_trajectory(spec: &OperatorSpec, g: &Graph, x: &DMatrix<f64>, steps: usize) -> Result<SmoothingTrajectory> {
    if steps == 0 {
        return Err(Error::InvalidParameter("trajectory needs at least one step".into()));
    }
    let lap_kind = spec.norm_kind.spectral_partner().ok_or_else(|| {
        Error::UnsupportedKind(format!("{} has no normalized Laplacian partner", spec.norm_kind))
    })?;
    let m = normalize(g, spec.norm_kind)?;
    let lap = normalize(g, lap_kind)?;
    let st = Stationary::new(spec.norm_kind, &m.degrees)?;
    let inv_scale: Vec<f64> = st.scale.iter().map(|s| 1.0 / s).collect();
    let norm = {
        let mx = x.abs().max();
        if mx > 0.0 {
            mx
        } else {
            1.0
        }
    };
    let cfg = SpatialConfig::default();
    let mut z = x.clone();
    let mut records = Vec::with_capacity(steps);
    for k in 1..=steps {
        z = apply_spatial_normalized(spec, &m, &z, &cfg)?;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("{}: non-finite features at step {k}", spec.name)));
        }
        let mut off = st.residual(&z);
        for (mut row, s) in off.row_iter_mut().zip(&inv_scale) {
            row *= *s;
        }
        records.push(TrajectoryRecord {
            k,
            max_row_dist: max_row_distance(&z) / norm,
            dirichlet: dirichlet_energy(&lap, &z)?.max(0.0),
            stationary_dist: off.abs().max() / norm,
        });
    }
    Ok(SmoothingTrajectory {
        name: spec.name.clone(),
        records,
    })
}

/// One trajectory per spec, computed in parallel.
pub fn smoothing_trajectories(
    specs: &[OperatorSpec],
    g: &Graph,
    x: &DMatrix<f64>,
    steps: usize,
) -> Vec<Result<SmoothingTrajectory>> {
    specs.par_iter().map(|s| smoothing_trajectory(s, g, x, steps)).collect()
}

/// Solves `(I + αL)Z = Y` for a Laplacian kind `L`.
pub fn analytic_label_prop(l: &NormalizedMatrix, y: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if !l.kind.is_laplacian() {
        return Err(Error::KindMismatch {
            spec: "a Laplacian kind".into(),
            basis: l.kind.name().into(),
        });
    }
    let n = l.n();
    if y.nrows() != n {
        return Err(dim_err(format!("{n} rows"), format!("{} rows", y.nrows())));
    }
    let shifted = l.matrix.scale(alpha).add_scaled_identity(1.0);
    if n <= DEFAULT_SPECTRAL_CAP {
        return dense_solve(shifted.to_dense(), y);
    }
    let apply = |v: &DVector<f64>| DVector::from_vec(shifted.mul_vec(v.as_slice()));
    iterative_solve(apply, y, l.kind.is_symmetric(), ITERATIVE_TOL, 10 * n)
}
