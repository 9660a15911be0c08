//! Admissible multi-index sets and combination coefficients.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GridKind, Growth};
use crate::{Error, Result};

/// Multi-index `(l_1, ..., l_N)` of 1D levels, every entry `>= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.iter().any(|&l| l == 0) {
            return Err(Error::invalid(format!("multi-index entries must be >= 1: {entries:?}")));
        }
        Ok(MultiIndex(entries))
    }

    pub fn ones(dim: usize) -> Self {
        MultiIndex(vec![1; dim])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl Borrow<[usize]> for MultiIndex {
    fn borrow(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A finite downward-closed set of multi-indices.
#[derive(Clone, Debug)]
pub struct MultiIndexSet {
    dim: usize,
    kind: GridKind,
    level: usize,
    weights: Option<Vec<f64>>,
    growth: Growth,
    members: Vec<MultiIndex>,
    lookup: HashSet<MultiIndex>,
}

impl MultiIndexSet {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn kind(&self) -> GridKind {
        self.kind
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }
    pub fn growth(&self) -> Growth {
        self.growth
    }
    /// Members in lexicographic order.
    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn contains(&self, l: &[usize]) -> bool {
        self.lookup.contains(l)
    }

    /// An arbitrary set, checked for downward closure. Used for index sets
    /// that are not one of the tabulated families.
    pub fn custom(dim: usize, growth: Growth, members: Vec<MultiIndex>) -> Result<Self> {
        if members.iter().any(|m| m.dim() != dim) {
            return Err(Error::invalid("all multi-indices must share the set dimension"));
        }
        let mut members = members;
        members.sort();
        members.dedup();
        let lookup: HashSet<MultiIndex> = members.iter().cloned().collect();
        check_downward_closed(&members, &lookup)?;
        let level = members
            .iter()
            .map(|m| m.entries().iter().map(|l| l - 1).sum::<usize>())
            .max()
            .unwrap_or(0);
        Ok(MultiIndexSet {
            dim,
            kind: GridKind::Custom,
            level,
            weights: None,
            growth,
            members,
            lookup,
        })
    }

    /// Combination coefficients of the set; see [`combination_coefficients`].
    pub fn combination_coefficients(&self) -> BTreeMap<MultiIndex, i64> {
        coefficients_unchecked(&self.members, &self.lookup)
    }
}

/// Level function `g(l)` of the index-set family, evaluated in floating point
/// for the anisotropic variant.
fn level_function(kind: GridKind, l: &[usize], ratios: Option<&[f64]>) -> f64 {
    match kind {
        GridKind::TensorProduct => l.iter().map(|&x| x - 1).max().unwrap_or(0) as f64,
        GridKind::TotalDegree | GridKind::Smolyak | GridKind::Custom => {
            l.iter().map(|&x| x - 1).sum::<usize>() as f64
        }
        // prod(l_n) - 1; the tabulated prod(l_n - 1) vanishes whenever any l_n = 1.
        GridKind::HyperbolicCross => l.iter().product::<usize>() as f64 - 1.0,
        GridKind::AnisotropicSmolyak => {
            let r = ratios.expect("anisotropic sets carry weights");
            l.iter().zip(r).map(|(&x, w)| w * (x - 1) as f64).sum()
        }
    }
}

/// Build `{ l : g(l) <= L }` for the requested family.
///
/// `weights` (the anisotropy vector) is required for, and only accepted by,
/// [`GridKind::AnisotropicSmolyak`].
pub fn build_index_set(
    kind: GridKind,
    dim: usize,
    level: usize,
    weights: Option<&[f64]>,
) -> Result<MultiIndexSet> {
    if dim == 0 {
        return Err(Error::invalid("index sets need dimension >= 1"));
    }
    if kind == GridKind::Custom {
        return Err(Error::invalid("custom sets are built with MultiIndexSet::custom"));
    }
    let ratios = match (kind, weights) {
        (GridKind::AnisotropicSmolyak, Some(w)) => {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w.len(),
                });
            }
            if w.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
                return Err(Error::invalid(format!("anisotropy weights must be positive: {w:?}")));
            }
            let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
            Some(w.iter().map(|a| a / min).collect::<Vec<_>>())
        }
        (GridKind::AnisotropicSmolyak, None) => {
            return Err(Error::invalid("anisotropic Smolyak sets need a weight vector"));
        }
        (_, Some(_)) => {
            return Err(Error::invalid(format!("{kind:?} sets do not take weights")));
        }
        (_, None) => None,
    };

    // g is non-decreasing in every coordinate and unaffected by entries equal
    // to one, so a depth-first walk that pads with ones can prune early.
    let bound = level as f64 + 1e-12;
    let mut members = Vec::new();
    let mut current = vec![1usize; dim];
    fn walk(
        pos: usize,
        current: &mut Vec<usize>,
        kind: GridKind,
        ratios: Option<&[f64]>,
        bound: f64,
        out: &mut Vec<MultiIndex>,
    ) {
        if pos == current.len() {
            out.push(MultiIndex(current.clone()));
            return;
        }
        let mut l = 1;
        loop {
            current[pos] = l;
            if level_function(kind, current, ratios) > bound {
                break;
            }
            walk(pos + 1, current, kind, ratios, bound, out);
            l += 1;
        }
        current[pos] = 1;
    }
    walk(0, &mut current, kind, ratios.as_deref(), bound, &mut members);
    members.sort();
    let lookup = members.iter().cloned().collect();
    Ok(MultiIndexSet {
        dim,
        kind,
        level,
        weights: weights.map(|w| w.to_vec()),
        growth: kind.growth(),
        members,
        lookup,
    })
}

fn check_downward_closed(members: &[MultiIndex], lookup: &HashSet<MultiIndex>) -> Result<()> {
    let mut probe = Vec::new();
    for m in members {
        probe.clear();
        probe.extend_from_slice(m.entries());
        for n in 0..probe.len() {
            if probe[n] > 1 {
                probe[n] -= 1;
                if !lookup.contains(probe.as_slice()) {
                    return Err(Error::NotDownwardClosed(format!(
                        "{m} is present but {} is not",
                        MultiIndex(probe.clone())
                    )));
                }
                probe[n] += 1;
            }
        }
    }
    Ok(())
}

/// Combination coefficients `c_l = sum_{z in {0,1}^N, l+z in set} (-1)^|z|`.
///
/// With these, `sum_l c_l (U^{p(l_1)} x ... x U^{p(l_N)})` equals the sum of
/// tensor difference operators over the set. Zero coefficients are omitted.
pub fn combination_coefficients(members: &[MultiIndex]) -> Result<BTreeMap<MultiIndex, i64>> {
    let lookup: HashSet<MultiIndex> = members.iter().cloned().collect();
    check_downward_closed(members, &lookup)?;
    Ok(coefficients_unchecked(members, &lookup))
}

fn coefficients_unchecked(
    members: &[MultiIndex],
    lookup: &HashSet<MultiIndex>,
) -> BTreeMap<MultiIndex, i64> {
    // Downward closure means {z : l+z in set} is itself downward closed in
    // {0,1}^N, so a DFS over increasing coordinates visits exactly those z.
    fn dfs(probe: &mut Vec<usize>, start: usize, sign: i64, lookup: &HashSet<MultiIndex>) -> i64 {
        let mut total = sign;
        for n in start..probe.len() {
            probe[n] += 1;
            if lookup.contains(probe.as_slice()) {
                total += dfs(probe, n + 1, -sign, lookup);
            }
            probe[n] -= 1;
        }
        total
    }
    let mut out = BTreeMap::new();
    let mut probe = Vec::new();
    for m in members {
        probe.clear();
        probe.extend_from_slice(m.entries());
        let c = dfs(&mut probe, 0, 1, lookup);
        if c != 0 {
            out.insert(m.clone(), c);
        }
    }
    out
}
