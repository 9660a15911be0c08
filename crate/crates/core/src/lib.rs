//! Multilevel stochastic collocation (MLSC) for elliptic PDEs with
//! finite-dimensional random coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`sparse_grid`]: nested Clenshaw-Curtis rules, admissible index sets,
//!   combination coefficients, sparse-grid designs, interpolation and quadrature.
//! - [`random_field`]: Karhunen-Loève eigenpairs of the exponential covariance on
//!   `(0,1)` and `(0,1)^2` and the shifted log-type coefficient built from them.
//! - [`fem`]: hierarchical P1 finite elements for `-div(a grad u) = f` with
//!   homogeneous Dirichlet data, plus the scalar quantities of interest.
//! - [`estimators`]: single-level and multilevel collocation, Monte Carlo and
//!   multilevel Monte Carlo estimators with cost bookkeeping.
//! - [`allocation`]: level/sample selection, rounding to realizable grids,
//!   pilot-based constant estimation, and the reference-free adaptive driver.
//! - [`experiment`]: configuration, presets and the runner behind the `mlsc` binary.
//!
//! Runnable walkthroughs for each layer live under `examples/`.

pub mod allocation;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod fem;
pub mod random_field;
pub mod sparse_grid;
pub mod summation;

pub use error::{Error, Result};
