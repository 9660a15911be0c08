//! Sparse-grid interpolants over scalar or field-valued samples.

use std::sync::Arc;

use super::design::SparseGridDesign;
use crate::summation::pairwise_dot;
use crate::{Error, Result};

/// Sample values the interpolant can combine linearly: scalars (functionals of
/// the solution) or nodal-coefficient vectors of one fixed spatial mesh.
pub trait LinearValue: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, a: f64, other: &Self);
    /// `sum_m weights[m] * values[m]`.
    fn weighted_sum(weights: &[f64], values: &[Self]) -> Self;
}

impl LinearValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, a: f64, other: &Self) {
        *self += a * other;
    }
    fn weighted_sum(weights: &[f64], values: &[Self]) -> Self {
        pairwise_dot(weights, values)
    }
}

impl LinearValue for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (s, o) in self.iter_mut().zip(other) {
            *s += a * o;
        }
    }
    fn weighted_sum(weights: &[f64], values: &[Self]) -> Self {
        let len = values.first().map_or(0, Vec::len);
        let mut column = vec![0.0; values.len()];
        (0..len)
            .map(|i| {
                for (c, v) in column.iter_mut().zip(values) {
                    *c = v[i];
                }
                pairwise_dot(weights, &column)
            })
            .collect()
    }
}

/// A design together with one sample value per collocation point.
#[derive(Clone, Debug)]
pub struct Interpolant<V = f64> {
    design: Arc<SparseGridDesign>,
    values: Vec<V>,
}

impl<V: LinearValue> Interpolant<V> {
    pub fn new(design: Arc<SparseGridDesign>, values: Vec<V>) -> Result<Self> {
        if values.len() != design.point_count() {
            return Err(Error::DimensionMismatch {
                expected: design.point_count(),
                got: values.len(),
            });
        }
        Ok(Interpolant { design, values })
    }

    /// Sample `f` at every design point.
    pub fn from_fn(design: Arc<SparseGridDesign>, mut f: impl FnMut(&[f64]) -> V) -> Self {
        let mut y = vec![0.0; design.dim()];
        let values = (0..design.point_count())
            .map(|m| {
                design.point_into(m, &mut y);
                f(&y)
            })
            .collect();
        Interpolant { design, values }
    }

    pub fn design(&self) -> &SparseGridDesign {
        &self.design
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    /// Evaluate the sparse-grid interpolant at `y` in [-1, 1]^N.
    pub fn interpolate(&self, y: &[f64]) -> Result<V> {
        let dim = self.design.dim();
        if y.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::OutsideDomain { point: y.to_vec() });
        }
        let mut out = self.values[0].zero_like();

        // basis[n][l-1] = Lagrange values of the level-l rule at y_n, built lazily
        let max_level = self.design.index_set().members().iter()
            .flat_map(|m| m.entries().iter().copied())
            .max()
            .unwrap_or(1);
        let bary: Vec<Vec<f64>> = (1..=max_level)
            .map(|l| self.design.rule(l).barycentric_weights())
            .collect();
        let mut basis: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; max_level]; dim];

        let mut active: Vec<usize> = Vec::with_capacity(dim);
        let mut pos: Vec<usize> = Vec::with_capacity(dim);
        for term in self.design.terms() {
            let levels = term.index.entries();
            active.clear();
            for (n, &l) in levels.iter().enumerate() {
                if self.design.rule(l).point_count > 1 {
                    active.push(n);
                    if basis[n][l - 1].is_none() {
                        let rule = self.design.rule(l);
                        let mut b = vec![0.0; rule.point_count];
                        rule.lagrange_basis_into(y[n], &bary[l - 1], &mut b);
                        basis[n][l - 1] = Some(b);
                    }
                }
            }
            pos.clear();
            pos.resize(active.len(), 0);
            for &id in &term.point_ids {
                let mut w = term.coeff as f64;
                for (k, &n) in active.iter().enumerate() {
                    w *= basis[n][levels[n] - 1].as_ref().unwrap()[pos[k]];
                }
                if w != 0.0 {
                    out.add_scaled(w, &self.values[id as usize]);
                }
                for k in (0..active.len()).rev() {
                    pos[k] += 1;
                    if pos[k] < self.design.rule(levels[active[k]]).point_count {
                        break;
                    }
                    pos[k] = 0;
                }
            }
        }
        Ok(out)
    }

    /// Expectation of the interpolant under the uniform density on [-1, 1]^N.
    pub fn expectation(&self) -> V {
        V::weighted_sum(self.design.quad_weights(), &self.values)
    }
}
