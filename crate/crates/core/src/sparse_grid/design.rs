//! Sparse-grid designs: deduplicated collocation points and quadrature weights.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::index_set::{build_index_set, MultiIndex, MultiIndexSet};
use super::rule::{cc_abscissas, NodeLabel, OneDimRule};
use super::GridKind;
use crate::{Error, Result};

/// One tensor-product interpolation operator in the combination formula.
#[derive(Clone, Debug)]
pub struct TensorTerm {
    pub index: MultiIndex,
    pub coeff: i64,
    /// Design point id of every tensor point; the last dimension varies fastest.
    pub point_ids: Vec<u32>,
}

/// Collocation points, combination coefficients and quadrature weights of one
/// sparse-grid operator.
#[derive(Clone, Debug)]
pub struct SparseGridDesign {
    index_set: MultiIndexSet,
    terms: Vec<TensorTerm>,
    rules: Vec<OneDimRule>,
    node_coords: Vec<f64>,
    point_nodes: Vec<u16>,
    quad_weights: Vec<f64>,
}

impl SparseGridDesign {
    pub fn dim(&self) -> usize {
        self.index_set.dim()
    }
    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }
    pub fn terms(&self) -> &[TensorTerm] {
        &self.terms
    }
    /// Number of distinct collocation points `M`.
    pub fn point_count(&self) -> usize {
        self.quad_weights.len()
    }
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// 1D rule for level `l` (levels start at 1).
    pub fn rule(&self, level: usize) -> &OneDimRule {
        &self.rules[level - 1]
    }

    pub fn point_into(&self, m: usize, out: &mut [f64]) {
        let n = self.dim();
        for (o, &node) in out.iter_mut().zip(&self.point_nodes[m * n..(m + 1) * n]) {
            *o = self.node_coords[node as usize];
        }
    }

    pub fn point(&self, m: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(m, &mut p);
        p
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.point_count()).map(|m| self.point(m)).collect()
    }

    pub fn combination_coefficients(&self) -> impl Iterator<Item = (&MultiIndex, i64)> {
        self.terms.iter().map(|t| (&t.index, t.coeff))
    }

    pub fn to_document(&self) -> DesignDocument {
        DesignDocument {
            version: DesignDocument::VERSION,
            kind: self.index_set.kind(),
            n: self.dim(),
            l: self.index_set.level(),
            weights: self.index_set.weights().map(|w| w.to_vec()),
            points: self.points(),
            quad_weights: self.quad_weights.clone(),
            combo: self
                .terms
                .iter()
                .map(|t| ComboEntry {
                    index: t.index.clone(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }
}

/// Build the design of the set's sparse-grid operator.
///
/// Every tensor grid with a nonzero combination coefficient contributes its
/// points; duplicates are merged by exact comparison of their canonical
/// Clenshaw-Curtis labels, so nested points coincide bit for bit. The
/// quadrature weight of a point is the coefficient-weighted sum of the tensor
/// rule weights that touch it.
pub fn enumerate_points(set: &MultiIndexSet) -> Result<SparseGridDesign> {
    let dim = set.dim();
    let coeffs = set.combination_coefficients();
    let max_level = set
        .members()
        .iter()
        .flat_map(|m| m.entries().iter().copied())
        .max()
        .unwrap_or(1);
    let rules: Vec<OneDimRule> = (1..=max_level)
        .map(|l| cc_abscissas(l, set.growth()))
        .collect();

    let mut node_ids: HashMap<NodeLabel, u16> = HashMap::new();
    let mut node_coords = Vec::new();
    let rule_nodes: Vec<Vec<u16>> = rules
        .iter()
        .map(|r| {
            r.labels
                .iter()
                .map(|&label| {
                    *node_ids.entry(label).or_insert_with(|| {
                        node_coords.push(label.coordinate());
                        (node_coords.len() - 1) as u16
                    })
                })
                .collect()
        })
        .collect();
    if node_coords.len() > u16::MAX as usize {
        return Err(Error::invalid("too many distinct 1D nodes for a design"));
    }

    let mut lookup: HashMap<Box<[u16]>, u32> = HashMap::new();
    let mut point_nodes: Vec<u16> = Vec::new();
    let mut quad_acc: Vec<f64> = Vec::new();
    let mut terms = Vec::with_capacity(coeffs.len());
    let mut key = vec![0u16; dim];
    let mut pos = vec![0usize; dim];

    for (index, &coeff) in &coeffs {
        let levels = index.entries();
        let sizes: Vec<usize> = levels.iter().map(|&l| rules[l - 1].point_count).collect();
        let total: usize = sizes.iter().product();
        let mut point_ids = Vec::with_capacity(total);
        pos.iter_mut().for_each(|p| *p = 0);
        for _ in 0..total {
            let mut w = coeff as f64;
            for n in 0..dim {
                let rule = &rules[levels[n] - 1];
                key[n] = rule_nodes[levels[n] - 1][pos[n]];
                w *= rule.quad_weights[pos[n]];
            }
            let id = match lookup.get(key.as_slice()) {
                Some(&id) => id,
                None => {
                    let id = quad_acc.len() as u32;
                    lookup.insert(key.clone().into_boxed_slice(), id);
                    point_nodes.extend_from_slice(&key);
                    quad_acc.push(0.0);
                    id
                }
            };
            quad_acc[id as usize] += w;
            point_ids.push(id);
            // odometer, last dimension fastest
            for n in (0..dim).rev() {
                pos[n] += 1;
                if pos[n] < sizes[n] {
                    break;
                }
                pos[n] = 0;
            }
        }
        terms.push(TensorTerm {
            index: index.clone(),
            coeff,
            point_ids,
        });
    }

    Ok(SparseGridDesign {
        index_set: set.clone(),
        terms,
        rules,
        node_coords,
        point_nodes,
        quad_weights: quad_acc,
    })
}

/// Convenience: build the index set and its design in one call.
pub fn build_design(
    kind: GridKind,
    dim: usize,
    level: usize,
    weights: Option<&[f64]>,
) -> Result<SparseGridDesign> {
    enumerate_points(&build_index_set(kind, dim, level, weights)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboEntry {
    pub index: MultiIndex,
    pub coeff: i64,
}

/// Versioned JSON form of a design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDocument {
    pub version: u32,
    pub kind: GridKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub quad_weights: Vec<f64>,
    pub combo: Vec<ComboEntry>,
}

impl DesignDocument {
    pub const VERSION: u32 = 1;

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DesignDocument = serde_json::from_str(text)?;
        if doc.version != Self::VERSION {
            return Err(Error::invalid(format!(
                "unsupported design document version {}",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Rebuild the design described by the document and check that the stored
    /// points and weights agree with it.
    pub fn rebuild(&self) -> Result<SparseGridDesign> {
        if self.kind == GridKind::Custom {
            return Err(Error::invalid("custom index sets cannot be rebuilt from a document"));
        }
        let design = build_design(self.kind, self.n, self.l, self.weights.as_deref())?;
        if design.point_count() != self.points.len() {
            return Err(Error::invalid("document point count does not match its parameters"));
        }
        for m in 0..design.point_count() {
            let p = design.point(m);
            let close = p
                .iter()
                .zip(&self.points[m])
                .all(|(a, b)| (a - b).abs() <= 1e-15);
            if !close || (design.quad_weights()[m] - self.quad_weights[m]).abs() > 1e-14 {
                return Err(Error::invalid(format!("document point {m} does not match")));
            }
        }
        Ok(design)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn smolyak(dim: usize, level: usize) -> SparseGridDesign {
        build_design(GridKind::Smolyak, dim, level, None).unwrap()
    }

    #[test]
    fn smolyak_counts_in_twenty_dimensions() {
        for (level, m) in [(0, 1), (1, 41), (2, 841), (3, 11561)] {
            assert_eq!(smolyak(20, level).point_count(), m);
        }
    }

    #[test]
    fn one_dimensional_level_two_is_the_five_point_rule() {
        let d = smolyak(1, 2);
        let mut xs: Vec<f64> = d.points().into_iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in xs.iter().zip([-1.0, -h, 0.0, h, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_dimensional_level_one_has_five_points() {
        let d = smolyak(2, 1);
        assert_eq!(d.point_count(), 5);
        let s: f64 = d.quad_weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_one() {
        for (dim, level) in [(3, 3), (5, 2), (10, 2)] {
            let s: f64 = smolyak(dim, level).quad_weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "N={dim} L={level}: {s}");
        }
        let td = build_design(GridKind::TotalDegree, 3, 3, None).unwrap();
        assert!((td.quad_weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_tensor_point_appears_exactly_once() {
        let d = smolyak(3, 3);
        let mut seen = HashSet::new();
        for m in 0..d.point_count() {
            let key: Vec<u64> = d.point(m).iter().map(|x| x.to_bits()).collect();
            assert!(seen.insert(key), "duplicate point {m}");
        }
        for t in d.terms() {
            for &id in &t.point_ids {
                assert!((id as usize) < d.point_count());
            }
        }
    }

    #[test]
    fn nested_levels_share_bit_identical_points() {
        for dim in 1..=5 {
            for level in 0..4 {
                let coarse = smolyak(dim, level);
                let fine = smolyak(dim, level + 1);
                let fine_set: HashSet<Vec<u64>> = fine
                    .points()
                    .iter()
                    .map(|p| p.iter().map(|x| x.to_bits()).collect())
                    .collect();
                for p in coarse.points() {
                    let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
                    assert!(fine_set.contains(&key), "N={dim} L={level}");
                }
            }
        }
    }

    #[test]
    fn document_round_trip() {
        let d = build_design(GridKind::AnisotropicSmolyak, 3, 2, Some(&[1.0, 1.5, 3.0])).unwrap();
        let doc = d.to_document();
        let text = doc.to_json().unwrap();
        assert!(text.contains("\"N\":3") && text.contains("\"combo\""));
        let back = DesignDocument::from_json(&text).unwrap();
        let rebuilt = back.rebuild().unwrap();
        assert_eq!(rebuilt.point_count(), d.point_count());
    }
}
