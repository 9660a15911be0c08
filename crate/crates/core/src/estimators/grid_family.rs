use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::sparse_grid::{build_design, GridKind, SparseGridDesign};
use crate::{Error, Result};

/// A family of sparse-grid designs indexed by level; designs are built once
/// and shared.
pub struct GridFamily {
    kind: GridKind,
    dim: usize,
    weights: Option<Vec<f64>>,
    cache: Mutex<HashMap<usize, Arc<SparseGridDesign>>>,
}

impl std::fmt::Debug for GridFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFamily")
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .field("weights", &self.weights)
            .finish()
    }
}

impl GridFamily {
    pub fn new(kind: GridKind, dim: usize, weights: Option<Vec<f64>>) -> Result<Self> {
        if kind == GridKind::Custom {
            return Err(Error::invalid("a grid family needs a level-indexed kind"));
        }
        // validate once at level 0
        build_design(kind, dim, 0, weights.as_deref())?;
        Ok(GridFamily {
            kind,
            dim,
            weights,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn smolyak(dim: usize) -> Self {
        Self::new(GridKind::Smolyak, dim, None).expect("isotropic Smolyak is always valid")
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fingerprint(&self) -> String {
        format!("{:?}:N={}:w={:?}", self.kind, self.dim, self.weights)
    }

    pub fn design(&self, level: usize) -> Result<Arc<SparseGridDesign>> {
        if let Some(d) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&level) {
            return Ok(d.clone());
        }
        let d = Arc::new(build_design(self.kind, self.dim, level, self.weights.as_deref())?);
        self.cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(level, d.clone());
        Ok(d)
    }

    /// Number of points at `level`; closed form for isotropic Smolyak grids,
    /// otherwise read from the built design.
    pub fn cardinality(&self, level: usize) -> Result<u64> {
        if self.kind == GridKind::Smolyak {
            return Ok(smolyak_cardinality(self.dim, level));
        }
        Ok(self.design(level)?.point_count() as u64)
    }

    /// Cardinalities of levels `0..=max_level`.
    pub fn sizes(&self, max_level: usize) -> Result<Vec<u64>> {
        (0..=max_level).map(|l| self.cardinality(l)).collect()
    }
}

/// Points of the isotropic Smolyak Clenshaw-Curtis grid: with nested rules
/// every point is new in exactly one hierarchical surplus `prod_n (p(l_n) -
/// p(l_n - 1))`, so the count is a convolution over dimensions in the excess
/// `sum_n (l_n - 1) <= level`.
pub fn smolyak_cardinality(dim: usize, level: usize) -> u64 {
    let new_points = |t: usize| -> u64 {
        match t {
            0 => 1,
            1 => 2,
            _ => 1u64 << (t - 1),
        }
    };
    let mut counts = vec![0u64; level + 1];
    counts[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u64; level + 1];
        for (t, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for s in 0..=level - t {
                next[t + s] += c * new_points(s);
            }
        }
        counts = next;
    }
    counts.iter().sum()
}

/// Cost model `C_k = C_c h_k^{-gamma}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub c_c: f64,
    pub gamma: f64,
}

impl CostModel {
    pub fn for_dim(d: usize) -> Self {
        CostModel {
            c_c: 1.0,
            gamma: d as f64,
        }
    }

    pub fn cost(&self, h: f64) -> f64 {
        self.c_c * h.powf(-self.gamma)
    }
}
