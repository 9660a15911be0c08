//! Generalized sparse-grid interpolation and quadrature on `[-1, 1]^N`.
//!
//! A sparse-grid operator is the sum of tensor products of 1D difference
//! operators over an admissible (downward-closed) index set. It is realized
//! here through the combination technique: integer coefficients `c_l` turn
//! that sum into a weighted sum of ordinary tensor Lagrange interpolants,
//! whose points are merged into one deduplicated design.

mod design;
mod index_set;
mod interpolant;
mod rates;
mod rule;

use serde::{Deserialize, Serialize};

pub use design::{build_design, enumerate_points, ComboEntry, DesignDocument, SparseGridDesign, TensorTerm};
pub use index_set::{build_index_set, combination_coefficients, MultiIndex, MultiIndexSet};
pub use interpolant::{Interpolant, LinearValue};
pub use rates::{predicted_mu, weight_from_tau, RateGrid};
pub use rule::{cc_abscissas, growth, Growth, OneDimRule};

/// Index-set family; selects both the level function `g` and the growth `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    TensorProduct,
    TotalDegree,
    HyperbolicCross,
    Smolyak,
    AnisotropicSmolyak,
    /// A user-supplied downward-closed set (Smolyak growth by default).
    Custom,
}

impl GridKind {
    pub fn growth(self) -> Growth {
        match self {
            GridKind::TensorProduct | GridKind::TotalDegree | GridKind::HyperbolicCross => Growth::Linear,
            GridKind::Smolyak | GridKind::AnisotropicSmolyak | GridKind::Custom => Growth::Doubling,
        }
    }
}
