use serde::{Deserialize, Serialize};

use super::kl::{KLExpansion1D, KLExpansion2D};
use crate::{Error, Result};

/// A diffusion coefficient `a(y, x)` parameterised by `y` in `[-1, 1]^N`.
///
/// The finite-element layer samples coefficients once per element through
/// [`Coefficient::tabulate`], which lets the spatial part be evaluated once
/// per mesh and reused across every parameter sample.
pub trait Coefficient: Send + Sync {
    fn param_dim(&self) -> usize;
    fn spatial_dim(&self) -> usize;
    fn eval(&self, y: &[f64], x: &[f64]) -> Result<f64>;
    /// Spatial tables at the given points (`spatial_dim` coordinates each,
    /// flattened).
    fn tabulate(&self, points: &[f64]) -> CoefficientTable;
    /// Stable textual identity used to key cached results.
    fn fingerprint(&self) -> String;
}

/// Coefficient of the form `shift + scale * exp(sum_n y_n phi_n(x))` at a
/// fixed set of spatial points.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    shift: f64,
    scale: f64,
    modes: usize,
    /// `phi_n(x_e)` stored point-major.
    phi: Vec<f64>,
    len: usize,
}

impl CoefficientTable {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn eval_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        if y.len() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::OutsideDomain { point: y.to_vec() });
        }
        if self.modes == 0 {
            out.iter_mut().for_each(|o| *o = self.shift + self.scale);
            return Ok(());
        }
        for (o, row) in out.iter_mut().zip(self.phi.chunks_exact(self.modes)) {
            let s: f64 = row.iter().zip(y).map(|(p, y)| p * y).sum();
            *o = self.shift + self.scale * s.exp();
        }
        Ok(())
    }

    pub fn eval(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len];
        self.eval_into(y, &mut out)?;
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dim")]
pub enum Expansion {
    #[serde(rename = "1")]
    OneD(KLExpansion1D),
    #[serde(rename = "2")]
    TwoD(KLExpansion2D),
}

impl Expansion {
    pub fn terms(&self) -> usize {
        match self {
            Expansion::OneD(e) => e.n,
            Expansion::TwoD(e) => e.n,
        }
    }

    pub fn spatial_dim(&self) -> usize {
        match self {
            Expansion::OneD(_) => 1,
            Expansion::TwoD(_) => 2,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        match self {
            Expansion::OneD(e) => &e.eigenvalues,
            Expansion::TwoD(e) => &e.eigenvalues,
        }
    }

    pub fn eigenfunction(&self, n: usize, x: &[f64]) -> f64 {
        match self {
            Expansion::OneD(e) => e.eigenfunction(n, x[0]),
            Expansion::TwoD(e) => e.eigenfunction(n, x),
        }
    }

    pub fn eigenfunction_sup(&self, n: usize) -> f64 {
        match self {
            Expansion::OneD(e) => e.eigenfunction_sup(n),
            Expansion::TwoD(e) => e.eigenfunction_sup(n),
        }
    }
}

/// `a(y, x) = base_shift + exp(sum_n sqrt(lambda_n) b_n(x) y_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub base_shift: f64,
    pub expansion: Expansion,
}

impl CoefficientField {
    pub fn new(expansion: Expansion) -> Self {
        CoefficientField {
            base_shift: 0.5,
            expansion,
        }
    }

    pub fn one_d(n: usize) -> Result<Self> {
        Ok(Self::new(Expansion::OneD(KLExpansion1D::new(n)?)))
    }

    pub fn two_d(n: usize) -> Result<Self> {
        let pool = super::kl::default_pool_size(n);
        Ok(Self::new(Expansion::TwoD(super::kl::eigen_2d(n, pool)?)))
    }

    /// Upper bound `base_shift + exp(sum_n sqrt(lambda_n) sup|b_n|)` over the
    /// whole parameter box and domain.
    pub fn upper_bound(&self) -> f64 {
        let e = &self.expansion;
        let s: f64 = (0..e.terms())
            .map(|n| e.eigenvalues()[n].sqrt() * e.eigenfunction_sup(n))
            .sum();
        self.base_shift + s.exp()
    }

    fn exponent(&self, y: &[f64], x: &[f64]) -> f64 {
        let e = &self.expansion;
        e.eigenvalues()
            .iter()
            .zip(y)
            .enumerate()
            .map(|(n, (l, y))| l.sqrt() * e.eigenfunction(n, x) * y)
            .sum()
    }
}

impl Coefficient for CoefficientField {
    fn param_dim(&self) -> usize {
        self.expansion.terms()
    }

    fn spatial_dim(&self) -> usize {
        self.expansion.spatial_dim()
    }

    fn eval(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        if y.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                got: y.len(),
            });
        }
        if x.len() != self.spatial_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.spatial_dim(),
                got: x.len(),
            });
        }
        Ok(self.base_shift + self.exponent(y, x).exp())
    }

    fn tabulate(&self, points: &[f64]) -> CoefficientTable {
        let d = self.spatial_dim();
        let modes = self.param_dim();
        let e = &self.expansion;
        let roots: Vec<f64> = e.eigenvalues().iter().map(|l| l.sqrt()).collect();
        let phi = points
            .chunks_exact(d)
            .flat_map(|x| (0..modes).map(move |n| (n, x)))
            .map(|(n, x)| roots[n] * e.eigenfunction(n, x))
            .collect();
        CoefficientTable {
            shift: self.base_shift,
            scale: 1.0,
            modes,
            phi,
            len: points.len() / d,
        }
    }

    fn fingerprint(&self) -> String {
        let e = &self.expansion;
        format!(
            "kl-exp:d={}:N={}:shift={:e}:lambda0={:e}",
            e.spatial_dim(),
            e.terms(),
            self.base_shift,
            e.eigenvalues()[0]
        )
    }
}

/// Deterministic coefficient `a(x) = value` with no random parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantCoefficient {
    pub value: f64,
    pub dim: usize,
}

impl Coefficient for ConstantCoefficient {
    fn param_dim(&self) -> usize {
        0
    }

    fn spatial_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, y: &[f64], _x: &[f64]) -> Result<f64> {
        if !y.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 0,
                got: y.len(),
            });
        }
        Ok(self.value)
    }

    fn tabulate(&self, points: &[f64]) -> CoefficientTable {
        CoefficientTable {
            shift: self.value,
            scale: 0.0,
            modes: 0,
            phi: Vec::new(),
            len: points.len() / self.dim,
        }
    }

    fn fingerprint(&self) -> String {
        format!("const:d={}:a={:e}", self.dim, self.value)
    }
}
