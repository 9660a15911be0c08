use std::sync::Arc;

use crate::fem::{EllipticProblem, Functional};
use crate::{Error, Result};

/// A hierarchy of parametric quantities of interest `psi(u_{h_k}(y))`.
pub trait Model: Send + Sync {
    fn param_dim(&self) -> usize;
    fn spatial_dim(&self) -> usize;
    /// Coarsest mesh width `h_0`.
    fn h0(&self) -> f64;
    /// Integer refinement ratio between consecutive levels.
    fn eta(&self) -> usize;
    fn qoi(&self, y: &[f64], level: usize) -> Result<f64>;
    fn fingerprint(&self) -> String;

    fn mesh_width(&self, level: usize) -> f64 {
        self.h0() / (self.eta() as f64).powi(level as i32)
    }
}

/// A finite-element problem paired with a functional.
#[derive(Clone, Debug)]
pub struct PdeModel {
    pub problem: Arc<EllipticProblem>,
    pub functional: Functional,
}

impl PdeModel {
    pub fn new(problem: Arc<EllipticProblem>, functional: Functional) -> Result<Self> {
        functional.validate(problem.hierarchy().spatial_dim)?;
        Ok(PdeModel {
            problem,
            functional,
        })
    }

    pub fn with_functional(&self, functional: Functional) -> Result<Self> {
        Self::new(self.problem.clone(), functional)
    }
}

impl Model for PdeModel {
    fn param_dim(&self) -> usize {
        self.problem.param_dim()
    }
    fn spatial_dim(&self) -> usize {
        self.problem.hierarchy().spatial_dim
    }
    fn h0(&self) -> f64 {
        self.problem.hierarchy().h0
    }
    fn eta(&self) -> usize {
        self.problem.hierarchy().eta
    }
    fn qoi(&self, y: &[f64], level: usize) -> Result<f64> {
        self.functional.eval(&self.problem.solve(y, level)?.field)
    }
    fn fingerprint(&self) -> String {
        format!(
            "{}|psi={}",
            self.problem.fingerprint(),
            serde_json::to_string(&self.functional).unwrap_or_default()
        )
    }
}

type QoiFn = dyn Fn(&[f64], usize) -> f64 + Send + Sync;

/// A model given by a closure; used for manufactured problems with known
/// spatial and stochastic rates.
#[derive(Clone)]
pub struct FnModel {
    name: String,
    param_dim: usize,
    spatial_dim: usize,
    h0: f64,
    eta: usize,
    f: Arc<QoiFn>,
}

impl std::fmt::Debug for FnModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnModel").field("name", &self.name).finish()
    }
}

impl FnModel {
    pub fn new(
        name: impl Into<String>,
        param_dim: usize,
        h0: f64,
        eta: usize,
        f: impl Fn(&[f64], usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnModel {
            name: name.into(),
            param_dim,
            spatial_dim: 1,
            h0,
            eta,
            f: Arc::new(f),
        }
    }

    pub fn with_spatial_dim(mut self, d: usize) -> Self {
        self.spatial_dim = d;
        self
    }
}

impl Model for FnModel {
    fn param_dim(&self) -> usize {
        self.param_dim
    }
    fn spatial_dim(&self) -> usize {
        self.spatial_dim
    }
    fn h0(&self) -> f64 {
        self.h0
    }
    fn eta(&self) -> usize {
        self.eta
    }
    fn qoi(&self, y: &[f64], level: usize) -> Result<f64> {
        if y.len() != self.param_dim {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim,
                got: y.len(),
            });
        }
        Ok((self.f)(y, level))
    }
    fn fingerprint(&self) -> String {
        format!("fn:{}:N={}:h0={:e}:eta={}", self.name, self.param_dim, self.h0, self.eta)
    }
}

/// `psi(u_k) - psi(u_{k-1})` with `u_{-1} = 0`.
pub fn level_difference(model: &dyn Model, y: &[f64], level: usize) -> Result<f64> {
    let fine = model.qoi(y, level)?;
    if level == 0 {
        Ok(fine)
    } else {
        Ok(fine - model.qoi(y, level - 1)?)
    }
}
