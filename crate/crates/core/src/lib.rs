//! Graph filters realized both spatially (`f(Ãₙ)X`) and spectrally
//! (`U g(Λ) UᵀX`), with response fitting, over-smoothing diagnostics,
//! random-walk sampling and a timing harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod normalize;
pub mod poly;
pub mod sampler;
pub mod solve;
pub mod sparse;
pub mod spectral;
pub mod zoo;

pub use error::{Error, Result};
pub use graph::{load_edge_list, parse_edge_list, Graph};
pub use normalize::{normalize, NormKind, NormalizedMatrix};
pub use spectral::{SpectralBasis, SpectralConfig};
pub use zoo::{EquivalenceReport, Family, OperatorSpec};
