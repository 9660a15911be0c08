use serde::{Deserialize, Serialize};

use crate::allocation::RoundingScheme;
use crate::{Error, Result};

/// Pairing of mesh levels `k = 0..=K` with sparse-grid levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPlan {
    #[serde(rename = "K")]
    pub k: usize,
    /// Grid level used on mesh level `k` (index `k`).
    pub grid_levels: Vec<usize>,
    /// Cardinality of each grid (index `k`).
    pub sample_counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounding: Option<RoundingScheme>,
}

impl LevelPlan {
    /// Plan from grid levels alone; counts are filled from `sizes[level]`.
    pub fn from_grid_levels(grid_levels: Vec<usize>, sizes: &[u64]) -> Result<Self> {
        let sample_counts = grid_levels
            .iter()
            .map(|&l| {
                sizes
                    .get(l)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("no cardinality known for grid level {l}")))
            })
            .collect::<Result<_>>()?;
        let plan = LevelPlan {
            k: grid_levels.len().saturating_sub(1),
            grid_levels,
            sample_counts,
            rounding: None,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_levels.len() != self.k + 1 || self.sample_counts.len() != self.k + 1 {
            return Err(Error::invalid(format!(
                "plan with K = {} needs {} grid levels and counts",
                self.k,
                self.k + 1
            )));
        }
        if let Some(w) = self.grid_levels.windows(2).find(|w| w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "grid levels must not increase with the mesh level ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(())
    }

    /// Maximal runs `(a, b)` of consecutive mesh levels sharing a grid level.
    pub fn groups(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.k + 1 {
            if k == self.k + 1 || self.grid_levels[k] != self.grid_levels[start] {
                out.push((start, k - 1));
                start = k;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: usize,
    pub grid_level: Option<usize>,
    pub points: u64,
    /// Contribution to the estimate. A run of mesh levels merged into one
    /// difference reports its whole contribution on its finest level.
    pub contribution: f64,
    pub model_cost: f64,
    pub solves: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: String,
    pub value: f64,
    pub per_level: Vec<LevelReport>,
    /// `sum_k M_{K-k} C_k`, ignoring cancellations.
    pub total_model_cost: f64,
    pub total_solve_count: u64,
    /// `sum` of `C_k` over the solves actually performed.
    pub solve_cost: f64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    /// `Q[psi(u_K) - psi(u_{K-1})]` on the finest grid, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finest_difference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl EstimateReport {
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.relative_error = Some(((self.value - reference) / reference).abs());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn grid_levels(&self) -> Vec<Option<usize>> {
        self.per_level.iter().map(|l| l.grid_level).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_are_maximal_runs() {
        let sizes = [1, 5, 13, 29];
        let p = LevelPlan::from_grid_levels(vec![3, 2, 2, 1, 1, 1], &sizes).unwrap();
        assert_eq!(p.groups(), vec![(0, 0), (1, 2), (3, 5)]);
        assert_eq!(p.sample_counts, vec![29, 13, 13, 5, 5, 5]);
        let single = LevelPlan::from_grid_levels(vec![2], &sizes).unwrap();
        assert_eq!(single.groups(), vec![(0, 0)]);
    }

    #[test]
    fn increasing_grid_levels_are_rejected() {
        assert!(LevelPlan::from_grid_levels(vec![1, 2], &[1, 5, 13]).is_err());
    }
}
