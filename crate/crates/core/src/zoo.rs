//! Named propagation operators carried as `P(Ãₙ)/Q(Ãₙ)` in a normalized
//! adjacency, each with a spatial route (sparse products and solves) and a
//! spectral route (eigenbasis filtering with `g(λ) = P(1−λ)/Q(1−λ)`).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Error, Result};
use crate::graph::Graph;
use crate::io::fmt_sig;
use crate::normalize::{normalize, NormKind, NormalizedMatrix};
use crate::poly;
use crate::solve::{dense_solve, iterative_solve, ITERATIVE_TOL};
use crate::spectral::{decompose_graph, filter_with_gains, SpectralBasis, SpectralConfig};

/// Largest expansion order a diffusion preset may need.
pub const MAX_GDC_ORDER: usize = 10_000;
/// Tail mass below which a diffusion preset is truncated.
pub const GDC_TAIL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Linear,
    Polynomial,
    Rational,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Polynomial => "polynomial",
            Family::Rational => "rational",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Family::Linear),
            "polynomial" => Ok(Family::Polynomial),
            "rational" => Ok(Family::Rational),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// A filter `P(Ãₙ)/Q(Ãₙ)` over the normalized adjacency `norm_kind`.
/// Coefficients are indexed by power.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub name: String,
    pub norm_kind: NormKind,
    pub p_coeffs: Vec<f64>,
    pub q_coeffs: Vec<f64>,
    pub family: Family,
}

impl OperatorSpec {
    /// Validates the family invariants; rational specs are rescaled so `q₀ = 1`.
    pub fn new(
        name: impl Into<String>,
        norm_kind: NormKind,
        p_coeffs: Vec<f64>,
        q_coeffs: Vec<f64>,
        family: Family,
    ) -> Result<Self> {
        let name = name.into();
        if p_coeffs.is_empty() || q_coeffs.is_empty() {
            return Err(Error::InvalidParameter(format!("{name}: empty coefficient list")));
        }
        if p_coeffs.iter().chain(&q_coeffs).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name}: non-finite coefficient")));
        }
        let q_is_one = q_coeffs[0] == 1.0 && q_coeffs[1..].iter().all(|&c| c == 0.0);
        let (p_coeffs, q_coeffs) = match family {
            Family::Linear | Family::Polynomial if !q_is_one => {
                return Err(Error::InvalidParameter(format!(
                    "{name}: {family} operators need Q ≡ 1"
                )))
            }
            Family::Linear if poly::degree(&p_coeffs) > 1 => {
                return Err(Error::InvalidParameter(format!(
                    "{name}: linear operators have degree(P) ≤ 1"
                )))
            }
            Family::Linear | Family::Polynomial => (p_coeffs, vec![1.0]),
            Family::Rational => {
                let q0 = q_coeffs[0];
                if q0 == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{name}: the constant term of Q must be nonzero"
                    )));
                }
                let p = poly::scale(&p_coeffs, 1.0 / q0);
                let q = poly::scale(&q_coeffs, 1.0 / q0);
                // Normalized adjacency spectra lie in [-1, 1].
                let roots = poly::real_roots_in(&q, -1.0, 1.0);
                if !roots.is_empty() {
                    return Err(Error::SingularOperator(format!(
                        "{name}: Q has a root at {:.6} inside [-1, 1]",
                        roots[0]
                    )));
                }
                (p, q)
            }
        };
        Ok(Self {
            name,
            norm_kind,
            p_coeffs,
            q_coeffs,
            family,
        })
    }

    /// `g(λ) = P(1−λ)/Q(1−λ)` on the normalized-Laplacian axis.
    pub fn response(&self, lambda: f64) -> f64 {
        let a = 1.0 - lambda;
        poly::eval(&self.p_coeffs, a) / poly::eval(&self.q_coeffs, a)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same filter over a different adjacency normalization.
    pub fn with_norm(mut self, kind: NormKind) -> Result<Self> {
        if !(kind.is_normalized_adjacency() || kind == NormKind::RawAdjacency) {
            return Err(Error::UnsupportedKind(format!(
                "{kind} is not an adjacency form; operators act on Ãₙ"
            )));
        }
        self.norm_kind = kind;
        Ok(self)
    }

    /// Linear specs padded into the polynomial family.
    pub fn to_polynomial(&self) -> Result<Self> {
        match self.family {
            Family::Linear | Family::Polynomial => Ok(Self {
                family: Family::Polynomial,
                ..self.clone()
            }),
            Family::Rational => Err(Error::InvalidParameter(format!(
                "{} is rational and has no polynomial form",
                self.name
            ))),
        }
    }

    /// Any operator viewed as a rational one (`Q = [1]` for the lower families).
    pub fn to_rational(&self) -> Self {
        Self {
            family: Family::Rational,
            ..self.clone()
        }
    }

    /// `k`-fold stacking: `P^k / Q^k`.
    pub fn power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("stacking depth must be ≥ 1".into()));
        }
        let p = poly::pow(&self.p_coeffs, k);
        let q = poly::pow(&self.q_coeffs, k);
        let family = match self.family {
            Family::Linear if k == 1 => Family::Linear,
            Family::Linear | Family::Polynomial => Family::Polynomial,
            Family::Rational => Family::Rational,
        };
        Self::new(format!("{}^{k}", self.name), self.norm_kind, p, q, family)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearKind {
    /// `I + Ãₙ` over the renormalized symmetric adjacency; response `2 − λ`.
    Gcn,
    /// `D̃^{-1/2} Ã D̃^{-1/2}` alone; response `1 − λ`.
    GcnRenorm,
    /// `I + Ãₙ` over the symmetric adjacency; response `2 − λ`.
    SageMean,
    /// `(1+ε)I + Ãₙ` with symmetric scaling; response `2 + ε − λ`.
    Gin { eps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GdcPreset {
    /// `θ_k = α(1−α)^k`
    Ppr { alpha: f64 },
    /// `θ_k = e^{−s} s^k / k!`
    Heat { s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolynomialKind {
    /// `Σ θ_k T_k(L̂)` with `L̂ = (2/λ_max) L̃ − I`, `L̃ = I − Ãₙ`.
    ChebNet { theta: Vec<f64>, lambda_max: f64 },
    DeepWalk { t: usize },
    /// Per-power weights `w_1..w_k` (no identity term).
    Dcnn { weights: Vec<f64> },
    Gdc(GdcPreset),
    Node2Vec { p: f64, q: f64 },
    LineSdne { alpha: f64 },
    Sgc { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RationalKind {
    AutoRegressive { alpha: f64 },
    Ppnp { alpha: f64 },
    Arma { a: f64, b: f64 },
    ParWalks { beta: f64 },
    RationalNet { p: Vec<f64>, q: Vec<f64> },
}

fn param_err(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub fn make_linear(kind: LinearKind) -> Result<OperatorSpec> {
    let (name, norm, p) = match kind {
        LinearKind::Gcn => ("gcn", NormKind::RenormSym, vec![1.0, 1.0]),
        LinearKind::GcnRenorm => ("gcn-renorm", NormKind::RenormSym, vec![0.0, 1.0]),
        LinearKind::SageMean => ("sage_mean", NormKind::Sym, vec![1.0, 1.0]),
        LinearKind::Gin { eps } => {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(param_err(format!("gin: eps must be ≥ 0, got {eps}")));
            }
            ("gin", NormKind::Sym, vec![1.0 + eps, 1.0])
        }
    };
    OperatorSpec::new(name, norm, p, vec![1.0], Family::Linear)
}

/// Diffusion weights truncated at the first order whose tail mass drops below
/// [`GDC_TAIL`].
pub fn gdc_weights(preset: &GdcPreset) -> Result<Vec<f64>> {
    let mut theta = Vec::new();
    match *preset {
        GdcPreset::Ppr { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(param_err(format!("gdc ppr: alpha must be in (0, 1], got {alpha}")));
            }
            let mut tail = 1.0;
            let mut term = alpha;
            while tail >= GDC_TAIL {
                if theta.len() > MAX_GDC_ORDER {
                    return Err(param_err(format!(
                        "gdc ppr(alpha={alpha}): tail not below {GDC_TAIL} within order {MAX_GDC_ORDER}"
                    )));
                }
                theta.push(term);
                tail -= term;
                tail = tail.max((1.0 - alpha).powi(theta.len() as i32));
                term *= 1.0 - alpha;
            }
        }
        GdcPreset::Heat { s } => {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(param_err(format!("gdc heat: s must be finite and ≥ 0, got {s}")));
            }
            let mut term = (-s).exp();
            if term == 0.0 {
                return Err(param_err(format!("gdc heat(s={s}): e^-s underflows")));
            }
            let mut mass = 0.0;
            let mut k = 0usize;
            loop {
                theta.push(term);
                mass += term;
                if 1.0 - mass < GDC_TAIL {
                    break;
                }
                k += 1;
                if k > MAX_GDC_ORDER {
                    return Err(param_err(format!(
                        "gdc heat(s={s}): tail not below {GDC_TAIL} within order {MAX_GDC_ORDER}"
                    )));
                }
                term *= s / k as f64;
            }
        }
    }
    Ok(theta)
}

pub fn make_polynomial(kind: PolynomialKind) -> Result<OperatorSpec> {
    let (name, norm, p) = match kind {
        PolynomialKind::ChebNet { theta, lambda_max } => {
            if theta.is_empty() {
                return Err(param_err("chebnet: empty coefficient list"));
            }
            if !(lambda_max > 0.0 && lambda_max.is_finite()) {
                return Err(param_err(format!("chebnet: lambda_max must be > 0, got {lambda_max}")));
            }
            // L̂ = (2/λmax)(1 − a) − 1 as an affine map of a = Ãₙ's eigenvalue.
            let scale = 2.0 / lambda_max;
            let monomial = poly::chebyshev_to_monomial(&theta);
            let p = poly::compose_affine(&monomial, scale - 1.0, -scale);
            ("chebnet", NormKind::Sym, p)
        }
        PolynomialKind::DeepWalk { t } => {
            if t == 0 {
                return Err(param_err("deepwalk: window t must be ≥ 1"));
            }
            ("deepwalk", NormKind::RwLeft, vec![1.0 / (t + 1) as f64; t + 1])
        }
        PolynomialKind::Dcnn { weights } => {
            if weights.is_empty() {
                return Err(param_err("dcnn: empty coefficient list"));
            }
            let mut p = vec![0.0];
            p.extend(weights);
            ("dcnn", NormKind::Sym, p)
        }
        PolynomialKind::Gdc(preset) => {
            let name = match preset {
                GdcPreset::Ppr { .. } => "gdc-ppr",
                GdcPreset::Heat { .. } => "gdc-heat",
            };
            (name, NormKind::Sym, gdc_weights(&preset)?)
        }
        PolynomialKind::Node2Vec { p, q } => {
            if !(p > 0.0 && q > 0.0) {
                return Err(param_err(format!("node2vec: p and q must be > 0, got p={p} q={q}")));
            }
            ("node2vec", NormKind::RwLeft, vec![1.0 / p, 1.0 - 1.0 / q, 1.0 / q])
        }
        PolynomialKind::LineSdne { alpha } => {
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(param_err(format!("line/sdne: alpha must be ≥ 0, got {alpha}")));
            }
            ("line_sdne", NormKind::Sym, vec![0.0, 1.0, alpha])
        }
        PolynomialKind::Sgc { k } => {
            if k == 0 {
                return Err(param_err("sgc: K must be ≥ 1"));
            }
            let mut p = vec![0.0; k + 1];
            p[k] = 1.0;
            ("sgc", NormKind::RenormSym, p)
        }
    };
    OperatorSpec::new(name, norm, p, vec![1.0], Family::Polynomial)
}

pub fn make_rational(kind: RationalKind) -> Result<OperatorSpec> {
    let (name, norm, p, q) = match kind {
        RationalKind::AutoRegressive { alpha } => {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(param_err(format!("auto_regressive: alpha must be > 0, got {alpha}")));
            }
            ("auto_regressive", NormKind::Sym, vec![1.0], vec![1.0 + alpha, -alpha])
        }
        RationalKind::Ppnp { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(param_err(format!("ppnp: alpha must be in (0, 1], got {alpha}")));
            }
            ("ppnp", NormKind::RenormLeft, vec![alpha], vec![1.0, alpha - 1.0])
        }
        RationalKind::Arma { a, b } => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(param_err("arma: a and b must be finite"));
            }
            ("arma", NormKind::Sym, vec![b], vec![1.0, -a])
        }
        RationalKind::ParWalks { beta } => {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(param_err(format!("parwalks: beta must be > 0, got {beta}")));
            }
            // β/(β + L̃ₙ) = β/((1+β)I − Ãₙ)
            ("parwalks", NormKind::Sym, vec![beta], vec![1.0 + beta, -1.0])
        }
        RationalKind::RationalNet { p, q } => ("rationalnet", NormKind::Sym, p, q),
    };
    OperatorSpec::new(name, norm, p, q, Family::Rational)
}

/// Limits for the spatial route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialConfig {
    /// Rational solves factor densely up to this `n`, iterate above it.
    pub dense_cap: usize,
    pub tol: f64,
}

impl Default for SpatialConfig {
    fn default() -> Self {
        Self {
            dense_cap: crate::spectral::DEFAULT_SPECTRAL_CAP,
            tol: ITERATIVE_TOL,
        }
    }
}

fn check_features(n: usize, x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != n {
        return Err(dim_err(format!("{n} rows"), format!("{} rows", x.nrows())));
    }
    Ok(())
}

/// `P(M)X` by Horner's rule with sparse products.
pub fn poly_apply(m: &NormalizedMatrix, p: &[f64], x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_features(m.n(), x)?;
    let mut coeffs = p.iter().rev();
    let Some(&lead) = coeffs.next() else {
        return Ok(DMatrix::zeros(x.nrows(), x.ncols()));
    };
    let mut z = x * lead;
    for &c in coeffs {
        z = m.matrix.mul_dense(&z)?;
        z += x * c;
    }
    Ok(z)
}

fn dense_poly(m: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
    let n = m.nrows();
    let mut coeffs = p.iter().rev();
    let lead = coeffs.next().copied().unwrap_or(0.0);
    let mut r = DMatrix::identity(n, n) * lead;
    for &c in coeffs {
        r = if r.is_identity(0.0) || lead == 0.0 && r.iter().all(|v| *v == 0.0) {
            m * r[(0, 0)]
        } else {
            &r * m
        };
        for i in 0..n {
            r[(i, i)] += c;
        }
    }
    r
}

pub fn apply_spatial(spec: &OperatorSpec, g: &Graph, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    apply_spatial_with(spec, g, x, &SpatialConfig::default())
}

pub fn apply_spatial_with(
    spec: &OperatorSpec,
    g: &Graph,
    x: &DMatrix<f64>,
    cfg: &SpatialConfig,
) -> Result<DMatrix<f64>> {
    let m = normalize(g, spec.norm_kind)?;
    apply_spatial_normalized(spec, &m, x, cfg)
}

/// Spatial route on an already normalized matrix (must match `spec.norm_kind`).
pub fn apply_spatial_normalized(
    spec: &OperatorSpec,
    m: &NormalizedMatrix,
    x: &DMatrix<f64>,
    cfg: &SpatialConfig,
) -> Result<DMatrix<f64>> {
    if m.kind != spec.norm_kind {
        return Err(Error::KindMismatch {
            spec: spec.norm_kind.name().into(),
            basis: m.kind.name().into(),
        });
    }
    let rhs = poly_apply(m, &spec.p_coeffs, x)?;
    if spec.q_coeffs.len() == 1 {
        return Ok(rhs / spec.q_coeffs[0]);
    }
    let n = m.n();
    if n <= cfg.dense_cap {
        let q = dense_poly(&m.to_dense(), &spec.q_coeffs);
        return dense_solve(q, &rhs);
    }
    let apply = |v: &DVector<f64>| -> DVector<f64> {
        let mut coeffs = spec.q_coeffs.iter().rev();
        let lead = *coeffs.next().unwrap();
        let mut acc: Vec<f64> = v.iter().map(|x| x * lead).collect();
        for &c in coeffs {
            acc = m.matrix.mul_vec(&acc);
            for (a, vi) in acc.iter_mut().zip(v.iter()) {
                *a += c * vi;
            }
        }
        DVector::from_vec(acc)
    };
    iterative_solve(apply, &rhs, m.kind.is_symmetric(), cfg.tol, 10 * n)
}

/// Spectral route `Z = U·diag(P(1−Λ)/Q(1−Λ))·UᵀX`, mapped through the diagonal
/// similarity when the operator uses a random-walk normalization.
pub fn apply_spectral(spec: &OperatorSpec, basis: &SpectralBasis, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mismatch = || Error::KindMismatch {
        spec: spec.norm_kind.name().into(),
        basis: basis.source_kind.name().into(),
    };
    let partner = spec.norm_kind.spectral_partner().ok_or_else(mismatch)?;
    if basis.source_kind.spectral_partner() != Some(partner) {
        return Err(mismatch());
    }
    check_features(basis.n(), x)?;
    let lambdas = basis.laplacian_eigenvalues();
    let mut gains = DVector::zeros(lambdas.len());
    for (i, &lam) in lambdas.iter().enumerate() {
        let a = 1.0 - lam;
        let den = poly::eval(&spec.q_coeffs, a);
        let v = poly::eval(&spec.p_coeffs, a) / den;
        if !v.is_finite() {
            return Err(Error::SingularOperator(format!(
                "{}: Q(1 − λ) = {den:.3e} at lambda = {lam}",
                spec.name
            )));
        }
        gains[i] = v;
    }

    // D⁻¹A = D^{-1/2} S D^{1/2} and AD⁻¹ = D^{1/2} S D^{-1/2}.
    let side = match spec.norm_kind {
        NormKind::RwLeft | NormKind::RenormLeft => Some(-1.0),
        NormKind::RwRight | NormKind::RenormRight => Some(1.0),
        _ => None,
    };
    let Some(sign) = side else {
        return filter_with_gains(basis, &gains, x);
    };
    if let Some(i) = basis.degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::DegenerateInput(format!(
            "node {i} has zero degree; the random-walk similarity is undefined"
        )));
    }
    let outer: Vec<f64> = basis.degrees.iter().map(|d| d.powf(0.5 * sign)).collect();
    let mut y = x.clone();
    for (mut row, s) in y.row_iter_mut().zip(&outer) {
        row /= *s;
    }
    let mut z = filter_with_gains(basis, &gains, &y)?;
    for (mut row, s) in z.row_iter_mut().zip(&outer) {
        row *= *s;
    }
    Ok(z)
}

/// `Z = (W ⊙ A)X`, reading `W` only on the graph's edges.
pub fn masked_aggregate(w: &DMatrix<f64>, g: &Graph, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.n();
    if w.nrows() != n || w.ncols() != n {
        return Err(dim_err(format!("{n}x{n} weights"), format!("{}x{}", w.nrows(), w.ncols())));
    }
    check_features(n, x)?;
    let masked = g.adjacency().map_entries(|i, j, a| a * w[(i, j)]);
    if let Some((i, j, v)) = masked.triplets().find(|(_, _, v)| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "attention weight at ({i}, {j}) gives {v}; weights must be finite and ≥ 0"
        )));
    }
    masked.mul_dense(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub name: String,
    pub max_err: f64,
    pub mean_err: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_equivalence(spec: &OperatorSpec, g: &Graph, x: &DMatrix<f64>, tol: f64) -> Result<EquivalenceReport> {
    let partner = spec.norm_kind.spectral_partner().ok_or_else(|| Error::KindMismatch {
        spec: spec.norm_kind.name().into(),
        basis: "none (no symmetric partner)".into(),
    })?;
    let basis = decompose_graph(g, partner, &SpectralConfig::from_env()?)?;
    verify_with_basis(spec, g, &basis, x, tol)
}

/// Same as [`verify_equivalence`] with a caller-supplied basis, so one
/// decomposition can serve many operators.
pub fn verify_with_basis(
    spec: &OperatorSpec,
    g: &Graph,
    basis: &SpectralBasis,
    x: &DMatrix<f64>,
    tol: f64,
) -> Result<EquivalenceReport> {
    let spectral = apply_spectral(spec, basis, x)?;
    let spatial = apply_spatial(spec, g, x)?;
    let diff = (spatial - spectral).abs();
    let max_err = diff.max();
    let mean_err = if diff.is_empty() { 0.0 } else { diff.mean() };
    let scale = 1.0 + x.abs().max();
    Ok(EquivalenceReport {
        name: spec.name.clone(),
        max_err,
        mean_err,
        tol,
        pass: max_err <= tol * scale,
    })
}

/// Largest eigenvalue of the symmetric normalized Laplacian, for Chebyshev
/// scaling on graphs where it is materially below 2.
pub fn true_lambda_max(g: &Graph) -> Result<f64> {
    let basis = decompose_graph(g, NormKind::SymLaplacian, &SpectralConfig::from_env()?)?;
    Ok(basis.lambdas[basis.lambdas.len() - 1])
}

/// Names accepted by [`lookup`], in catalog order.
pub const REGISTRY: [&str; 18] = [
    "gcn",
    "gcn-renorm",
    "sage_mean",
    "gin",
    "chebnet",
    "deepwalk",
    "dcnn",
    "gdc-ppr",
    "gdc-heat",
    "node2vec",
    "line",
    "sdne",
    "sgc",
    "auto_regressive",
    "ppnp",
    "arma",
    "parwalks",
    "rationalnet",
];

/// Every registry operator with its default parameters.
pub fn registry() -> Vec<OperatorSpec> {
    REGISTRY
        .iter()
        .map(|name| lookup(name).expect("registry defaults are valid"))
        .collect()
}

struct Params<'a> {
    op: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn parse(op: &'a str, raw: Option<&'a str>) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in raw.into_iter().flat_map(|r| r.split(',')).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| param_err(format!("{op}: parameter {item:?} is not key=value")))?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { op, pairs })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        let idx = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(idx).1)
    }

    fn num(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| param_err(format!("{}: {key}={v:?} is not a number", self.op))),
        }
    }

    fn int(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| param_err(format!("{}: {key}={v:?} is not an integer", self.op))),
        }
    }

    fn list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split('/')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| param_err(format!("{}: {key} entry {s:?} is not a number", self.op)))
                })
                .collect(),
        }
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(param_err(format!("{}: unknown parameter {k:?}", self.op))),
        }
    }
}

/// Builds a registry operator from `name[:key=value,...]`.
///
/// List parameters separate entries with `/` (`chebnet:theta=1/-0.5/0.25`);
/// every operator also accepts `norm=<kind>`.
pub fn lookup(text: &str) -> Result<OperatorSpec> {
    let (name, raw) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (text.trim(), None),
    };
    let mut ps = Params::parse(name, raw)?;
    let norm = ps.take("norm").map(str::parse::<NormKind>).transpose()?;
    let spec = match name {
        "gcn" => make_linear(LinearKind::Gcn)?,
        "gcn-renorm" => make_linear(LinearKind::GcnRenorm)?,
        "sage_mean" => make_linear(LinearKind::SageMean)?,
        "gin" => make_linear(LinearKind::Gin { eps: ps.num("eps", 0.1)? })?,
        "chebnet" => make_polynomial(PolynomialKind::ChebNet {
            theta: ps.list("theta", &[1.0, -0.5, 0.25])?,
            lambda_max: ps.num("lambda_max", 2.0)?,
        })?,
        "deepwalk" => make_polynomial(PolynomialKind::DeepWalk { t: ps.int("t", 3)? })?,
        "dcnn" => make_polynomial(PolynomialKind::Dcnn {
            weights: ps.list("w", &[0.5, 0.3, 0.2])?,
        })?,
        "gdc-ppr" => make_polynomial(PolynomialKind::Gdc(GdcPreset::Ppr {
            alpha: ps.num("alpha", 0.15)?,
        }))?,
        "gdc-heat" => make_polynomial(PolynomialKind::Gdc(GdcPreset::Heat { s: ps.num("s", 3.0)? }))?,
        "node2vec" => make_polynomial(PolynomialKind::Node2Vec {
            p: ps.num("p", 1.0)?,
            q: ps.num("q", 2.0)?,
        })?,
        "line" => make_polynomial(PolynomialKind::LineSdne { alpha: ps.num("alpha", 1.0)? })?.with_name("line"),
        "sdne" => make_polynomial(PolynomialKind::LineSdne { alpha: ps.num("alpha", 0.5)? })?.with_name("sdne"),
        "line_sdne" => make_polynomial(PolynomialKind::LineSdne { alpha: ps.num("alpha", 1.0)? })?,
        "sgc" => make_polynomial(PolynomialKind::Sgc { k: ps.int("k", 2)? })?,
        "auto_regressive" => make_rational(RationalKind::AutoRegressive { alpha: ps.num("alpha", 1.0)? })?,
        "ppnp" => make_rational(RationalKind::Ppnp { alpha: ps.num("alpha", 0.15)? })?,
        "arma" => make_rational(RationalKind::Arma {
            a: ps.num("a", 0.7)?,
            b: ps.num("b", 0.5)?,
        })?,
        "parwalks" => make_rational(RationalKind::ParWalks { beta: ps.num("beta", 1.0)? })?,
        "rationalnet" => make_rational(RationalKind::RationalNet {
            p: ps.list("p", &[0.5, 0.3])?,
            q: ps.list("q", &[1.0, -0.4, 0.1])?,
        })?,
        other => return Err(param_err(format!("unknown operator {other:?}"))),
    };
    ps.finish()?;
    match norm {
        Some(kind) => spec.with_norm(kind),
        None => Ok(spec),
    }
}

/// Tab-separated catalog: name, family, norm_kind, p_coeffs, q_coeffs.
pub fn catalog_table(specs: &[OperatorSpec]) -> String {
    let coeffs = |c: &[f64]| c.iter().map(|&v| fmt_sig(v, 12)).collect::<Vec<_>>().join(" ");
    let mut out = String::from("name\tfamily\tnorm_kind\tp_coeffs\tq_coeffs\n");
    for s in specs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            s.name,
            s.family,
            s.norm_kind,
            coeffs(&s.p_coeffs),
            coeffs(&s.q_coeffs)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    fn k2() -> Graph {
        Graph::from_pairs(2, &[(0, 1)]).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn gcn_response_at_zero() {
        let gcn = make_linear(LinearKind::Gcn).unwrap();
        assert_eq!(gcn.response(0.0), 2.0);
        assert_eq!(gcn.response(2.0), 0.0);
    }

    #[test]
    fn gin_zero_matches_sage() {
        let gin = make_linear(LinearKind::Gin { eps: 0.0 }).unwrap();
        let sage = make_linear(LinearKind::SageMean).unwrap();
        for i in 0..=20 {
            let l = 0.1 * i as f64;
            assert_eq!(gin.response(l), sage.response(l));
        }
        assert!((make_linear(LinearKind::Gin { eps: 0.3 }).unwrap().response(0.5) - 1.8).abs() < 1e-15);
        assert!(make_linear(LinearKind::Gin { eps: -0.1 }).is_err());
    }

    #[test]
    fn gcn_on_k2_both_routes() {
        // (I + D̃^{-1/2}ÃD̃^{-1/2}) e₀ on K2 with Ãₙ = ½·ones: [1.5, 0.5]
        let gcn = make_linear(LinearKind::Gcn).unwrap();
        let x = col(&[1.0, 0.0]);
        let spatial = apply_spatial(&gcn, &k2(), &x).unwrap();
        assert!((spatial[0] - 1.5).abs() < 1e-15 && (spatial[1] - 0.5).abs() < 1e-15);
        let basis = decompose_graph(&k2(), NormKind::RenormSymLaplacian, &SpectralConfig::default()).unwrap();
        let spectral = apply_spectral(&gcn, &basis, &x).unwrap();
        assert!((spatial - spectral).abs().max() < 1e-8);
    }

    #[test]
    fn polynomial_coefficients() {
        let sgc = make_polynomial(PolynomialKind::Sgc { k: 2 }).unwrap();
        assert_eq!(sgc.p_coeffs, vec![0.0, 0.0, 1.0]);
        let n2v = make_polynomial(PolynomialKind::Node2Vec { p: 1.0, q: 1.0 }).unwrap();
        assert_eq!(n2v.p_coeffs, vec![1.0, 0.0, 1.0]);
        let dw = make_polynomial(PolynomialKind::DeepWalk { t: 3 }).unwrap();
        assert_eq!(dw.p_coeffs, vec![0.25; 4]);
        let line = make_polynomial(PolynomialKind::LineSdne { alpha: 0.5 }).unwrap();
        assert_eq!(line.p_coeffs, vec![0.0, 1.0, 0.5]);
        let dcnn = make_polynomial(PolynomialKind::Dcnn { weights: vec![0.2, 0.3] }).unwrap();
        assert_eq!(dcnn.p_coeffs, vec![0.0, 0.2, 0.3]);
        assert!(make_polynomial(PolynomialKind::Dcnn { weights: vec![] }).is_err());
        assert!(make_polynomial(PolynomialKind::ChebNet { theta: vec![], lambda_max: 2.0 }).is_err());
        assert!(make_polynomial(PolynomialKind::DeepWalk { t: 0 }).is_err());
        assert!(make_polynomial(PolynomialKind::Node2Vec { p: 0.0, q: 1.0 }).is_err());
    }

    #[test]
    fn node2vec_response_matches_closed_form() {
        let (p, q) = (0.7, 2.5);
        let spec = make_polynomial(PolynomialKind::Node2Vec { p, q }).unwrap();
        for i in 0..=20 {
            let l = 0.1 * i as f64;
            let want = (1.0 + 1.0 / p) - (1.0 + 1.0 / q) * l + l * l / q;
            assert!((spec.response(l) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn deepwalk_k2_and_response() {
        let dw1 = make_polynomial(PolynomialKind::DeepWalk { t: 1 }).unwrap();
        let z = apply_spatial(&dw1, &k2(), &col(&[1.0, 0.0])).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-15 && (z[1] - 0.5).abs() < 1e-15);
        let dw2 = make_polynomial(PolynomialKind::DeepWalk { t: 2 }).unwrap();
        assert!((dw2.response(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gdc_presets_truncate_on_tail_mass() {
        let ppr = gdc_weights(&GdcPreset::Ppr { alpha: 0.5 }).unwrap();
        // (1/2)^{K+1} < 1e-9 first holds at K = 29
        assert_eq!(ppr.len(), 30);
        assert!((1.0 - ppr.iter().sum::<f64>()) < 1e-9);
        let heat = gdc_weights(&GdcPreset::Heat { s: 2.0 }).unwrap();
        assert!((1.0 - heat.iter().sum::<f64>()) < 1e-9);
        assert!((heat[1] - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(gdc_weights(&GdcPreset::Ppr { alpha: 0.0 }).is_err());
        assert!(gdc_weights(&GdcPreset::Ppr { alpha: 1e-6 }).is_err());
        assert!(gdc_weights(&GdcPreset::Heat { s: -1.0 }).is_err());
    }

    #[test]
    fn rational_parameter_checks() {
        assert!(make_rational(RationalKind::Ppnp { alpha: 0.0 }).is_err());
        assert!(make_rational(RationalKind::Ppnp { alpha: 1.5 }).is_err());
        assert!(matches!(
            make_rational(RationalKind::Arma { a: 1.5, b: 1.0 }),
            Err(Error::SingularOperator(_))
        ));
        assert!(matches!(
            make_rational(RationalKind::RationalNet { p: vec![1.0], q: vec![1.0, 0.0, -2.0] }),
            Err(Error::SingularOperator(_))
        ));
        let r = make_rational(RationalKind::RationalNet { p: vec![2.0], q: vec![2.0, 1.0] }).unwrap();
        assert_eq!(r.q_coeffs, vec![1.0, 0.5]);
        assert_eq!(r.p_coeffs, vec![1.0]);
    }

    #[test]
    fn ppnp_response_at_zero() {
        let ppnp = make_rational(RationalKind::Ppnp { alpha: 0.5 }).unwrap();
        assert!((ppnp.response(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_spec_returns_input() {
        let id = OperatorSpec::new("id", NormKind::Sym, vec![1.0], vec![1.0], Family::Polynomial).unwrap();
        let x = col(&[1.0, -2.0, 3.0]);
        assert_eq!(apply_spatial(&id, &p3(), &x).unwrap(), x);
        let rep = verify_equivalence(&id, &p3(), &x, 1e-8).unwrap();
        assert!(rep.pass && rep.max_err <= 1e-8);
    }

    #[test]
    fn ppnp_fixed_point_residual() {
        let alpha = 0.2;
        let g = p3();
        let ppnp = make_rational(RationalKind::Ppnp { alpha }).unwrap();
        let x = col(&[1.0, 0.0, 0.0]);
        let z = apply_spatial(&ppnp, &g, &x).unwrap();
        let a = normalize(&g, ppnp.norm_kind).unwrap();
        let az = a.matrix.mul_dense(&z).unwrap();
        let resid = (&z - (&x * alpha + az * (1.0 - alpha))).abs().max();
        assert!(resid <= 1e-10, "{resid}");
    }

    #[test]
    fn iterative_route_matches_dense_route() {
        let g = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let x = DMatrix::from_fn(6, 2, |i, j| (i as f64 + 1.0) * if j == 0 { 1.0 } else { -0.5 });
        let iterative = SpatialConfig { dense_cap: 0, ..Default::default() };
        for spec in [
            make_rational(RationalKind::Ppnp { alpha: 0.1 }).unwrap(),
            make_rational(RationalKind::RationalNet { p: vec![0.5, 0.3], q: vec![1.0, -0.4, 0.1] }).unwrap(),
        ] {
            let dense = apply_spatial(&spec, &g, &x).unwrap();
            let iter = apply_spatial_with(&spec, &g, &x, &iterative).unwrap();
            assert!((dense - iter).abs().max() < 1e-9, "{}", spec.name);
        }
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let gcn = make_linear(LinearKind::Gcn).unwrap();
        let basis = decompose_graph(&p3(), NormKind::SymLaplacian, &SpectralConfig::default()).unwrap();
        assert!(matches!(
            apply_spectral(&gcn, &basis, &col(&[1.0, 0.0, 0.0])),
            Err(Error::KindMismatch { .. })
        ));
        let raw = gcn.with_norm(NormKind::RawAdjacency).unwrap();
        assert!(matches!(
            verify_equivalence(&raw, &p3(), &col(&[1.0, 0.0, 0.0]), 1e-8),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn masked_aggregation() {
        let g = k2();
        let x = col(&[1.0, 1.0]);
        let w = DMatrix::from_row_slice(2, 2, &[9.0, 2.0, 3.0, 9.0]);
        let z = masked_aggregate(&w, &g, &x).unwrap();
        assert_eq!(z.as_slice(), &[2.0, 3.0]);
        let ones = DMatrix::from_element(2, 2, 1.0);
        assert_eq!(masked_aggregate(&ones, &g, &x).unwrap(), g.adjacency().mul_dense(&x).unwrap());
        assert_eq!(masked_aggregate(&DMatrix::zeros(2, 2), &g, &x).unwrap(), DMatrix::zeros(2, 1));
        assert!(masked_aggregate(&DMatrix::zeros(3, 3), &g, &x).is_err());
    }

    #[test]
    fn registry_and_lookup() {
        let all = registry();
        assert!(all.len() >= 14);
        let table = catalog_table(&all);
        assert_eq!(table.lines().count(), all.len() + 1);
        let p = lookup("ppnp:alpha=0.3,norm=sym").unwrap();
        assert_eq!(p.norm_kind, NormKind::Sym);
        assert!((p.p_coeffs[0] - 0.3).abs() < 1e-15);
        let c = lookup("chebnet:theta=1/-1").unwrap();
        assert!((c.response(0.4) - 1.6).abs() < 1e-14);
        assert!(lookup("ppnp:beta=1").is_err());
        assert!(lookup("nope").is_err());
        assert!(lookup("sgc:k=x").is_err());
        assert!(lookup("gcn:norm=laplacian").is_err());
    }

    #[test]
    fn power_expands_binomially() {
        let sage = make_linear(LinearKind::SageMean).unwrap();
        let cube = sage.power(3).unwrap();
        assert_eq!(cube.family, Family::Polynomial);
        assert_eq!(cube.p_coeffs, vec![1.0, 3.0, 3.0, 1.0]);
    }
}
