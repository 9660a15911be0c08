//! Karhunen-Loève eigenstructure of the exponential covariance and the
//! shifted exponential coefficient built on it.

mod coefficient;
mod kl;

pub use coefficient::{Coefficient, CoefficientField, CoefficientTable, ConstantCoefficient, Expansion};
pub use kl::{
    default_pool_size, eigen_2d, eigenvalue, normalization_constant, solve_transcendental,
    KLExpansion1D, KLExpansion2D,
};
