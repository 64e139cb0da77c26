//! Adjacency normalizations and Laplacian variants.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{dim_err, Error, Result};
use crate::graph::Graph;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `A`
    RawAdjacency,
    /// `D − A`
    Laplacian,
    /// `D⁻¹A`
    RwLeft,
    /// `AD⁻¹`
    RwRight,
    /// `D^{-1/2} A D^{-1/2}`
    Sym,
    /// `D̃⁻¹Ã` with `Ã = A + I`
    RenormLeft,
    /// `ÃD̃⁻¹`
    RenormRight,
    /// `D̃^{-1/2} Ã D̃^{-1/2}`
    RenormSym,
    /// `I − D^{-1/2} A D^{-1/2}`
    SymLaplacian,
    /// `I − D̃^{-1/2} Ã D̃^{-1/2}`
    RenormSymLaplacian,
    /// `I − D⁻¹A`
    RwLaplacian,
}

impl NormKind {
    pub const ALL: [NormKind; 11] = [
        NormKind::RawAdjacency,
        NormKind::Laplacian,
        NormKind::RwLeft,
        NormKind::RwRight,
        NormKind::Sym,
        NormKind::RenormLeft,
        NormKind::RenormRight,
        NormKind::RenormSym,
        NormKind::SymLaplacian,
        NormKind::RenormSymLaplacian,
        NormKind::RwLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::RawAdjacency => "raw-adjacency",
            NormKind::Laplacian => "laplacian",
            NormKind::RwLeft => "rw-left",
            NormKind::RwRight => "rw-right",
            NormKind::Sym => "sym",
            NormKind::RenormLeft => "renorm-left",
            NormKind::RenormRight => "renorm-right",
            NormKind::RenormSym => "renorm-sym",
            NormKind::SymLaplacian => "sym-laplacian",
            NormKind::RenormSymLaplacian => "renorm-sym-laplacian",
            NormKind::RwLaplacian => "rw-laplacian",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            NormKind::RawAdjacency
                | NormKind::Laplacian
                | NormKind::Sym
                | NormKind::RenormSym
                | NormKind::SymLaplacian
                | NormKind::RenormSymLaplacian
        )
    }

    pub fn is_laplacian(self) -> bool {
        matches!(
            self,
            NormKind::Laplacian
                | NormKind::SymLaplacian
                | NormKind::RenormSymLaplacian
                | NormKind::RwLaplacian
        )
    }

    /// Kinds built from `Ã = A + I`.
    pub fn is_renormalized(self) -> bool {
        matches!(
            self,
            NormKind::RenormLeft
                | NormKind::RenormRight
                | NormKind::RenormSym
                | NormKind::RenormSymLaplacian
        )
    }

    /// Normalized adjacency forms whose spectrum is tied to a normalized
    /// Laplacian through `Ãₙ = I − L̃ₙ` (possibly up to a diagonal similarity).
    pub fn is_normalized_adjacency(self) -> bool {
        matches!(
            self,
            NormKind::RwLeft
                | NormKind::RwRight
                | NormKind::Sym
                | NormKind::RenormLeft
                | NormKind::RenormRight
                | NormKind::RenormSym
        )
    }

    /// The symmetric normalized Laplacian sharing this kind's spectrum.
    pub fn spectral_partner(self) -> Option<NormKind> {
        match self {
            NormKind::RwLeft | NormKind::RwRight | NormKind::Sym | NormKind::SymLaplacian => {
                Some(NormKind::SymLaplacian)
            }
            NormKind::RenormLeft
            | NormKind::RenormRight
            | NormKind::RenormSym
            | NormKind::RenormSymLaplacian => Some(NormKind::RenormSymLaplacian),
            _ => None,
        }
    }

    fn divides_by_degree(self) -> bool {
        matches!(
            self,
            NormKind::RwLeft
                | NormKind::RwRight
                | NormKind::Sym
                | NormKind::SymLaplacian
                | NormKind::RwLaplacian
        )
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NormKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

/// What to do with zero-degree nodes under kinds that divide by the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroDegreePolicy {
    #[default]
    Strict,
    /// `1/0` is read as `0`, which zeroes the node's row and column.
    ZeroRow,
}

#[derive(Debug, Clone)]
pub struct NormalizedMatrix {
    pub kind: NormKind,
    pub matrix: CsrMatrix,
    /// Degree vector the normalization divided by (`d` or `d̃ = d + 1`).
    pub degrees: Vec<f64>,
}

impl NormalizedMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }
}

pub fn normalize(g: &Graph, kind: NormKind) -> Result<NormalizedMatrix> {
    normalize_with(g, kind, ZeroDegreePolicy::Strict)
}

pub fn normalize_with(
    g: &Graph,
    kind: NormKind,
    policy: ZeroDegreePolicy,
) -> Result<NormalizedMatrix> {
    let a = g.adjacency();
    let degrees: Vec<f64> = if kind.is_renormalized() {
        g.degrees().iter().map(|d| d + 1.0).collect()
    } else {
        g.degrees().to_vec()
    };
    if kind.divides_by_degree() && policy == ZeroDegreePolicy::Strict {
        if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::DegenerateInput(format!(
                "node {i} has zero degree under {kind} (strict policy)"
            )));
        }
    }
    let inv = |d: f64| if d > 0.0 { 1.0 / d } else { 0.0 };
    let inv_sqrt = |d: f64| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 };
    let base = if kind.is_renormalized() {
        a.add_scaled_identity(1.0)
    } else {
        a.clone()
    };
    let d = &degrees;
    let matrix = match kind {
        NormKind::RawAdjacency => base,
        NormKind::Laplacian => {
            let mut t: Vec<_> = base.triplets().map(|(i, j, v)| (i, j, -v)).collect();
            t.extend(d.iter().enumerate().map(|(i, &di)| (i, i, di)));
            CsrMatrix::from_triplets(g.n(), g.n(), &t)
        }
        NormKind::RwLeft | NormKind::RenormLeft => base.map_entries(|i, _, v| v * inv(d[i])),
        NormKind::RwRight | NormKind::RenormRight => base.map_entries(|_, j, v| v * inv(d[j])),
        NormKind::Sym | NormKind::RenormSym => {
            base.map_entries(|i, j, v| v * inv_sqrt(d[i]) * inv_sqrt(d[j]))
        }
        NormKind::SymLaplacian | NormKind::RenormSymLaplacian => base
            .map_entries(|i, j, v| -v * inv_sqrt(d[i]) * inv_sqrt(d[j]))
            .add_scaled_identity(1.0),
        NormKind::RwLaplacian => base
            .map_entries(|i, _, v| -v * inv(d[i]))
            .add_scaled_identity(1.0),
    };
    Ok(NormalizedMatrix {
        kind,
        matrix,
        degrees,
    })
}

/// `MᵏX` by `k` successive sparse products.
pub fn matrix_power_apply(m: &NormalizedMatrix, k: usize, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != m.n() {
        return Err(dim_err(format!("{} rows", m.n()), format!("{} rows", x.nrows())));
    }
    let mut z = x.clone();
    for _ in 0..k {
        z = m.matrix.mul_dense(&z)?;
    }
    Ok(z)
}
