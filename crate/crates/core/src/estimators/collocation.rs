use std::time::Instant;

use rayon::prelude::*;

use super::grid_family::{CostModel, GridFamily};
use super::model::Model;
use super::report::{EstimateReport, LevelPlan, LevelReport};
use crate::sparse_grid::SparseGridDesign;
use crate::summation::{pairwise_dot, pairwise_sum};
use crate::{Error, Result};

/// Evaluate `f` at every design point in parallel; failures carry the
/// sample index.
pub fn evaluate_on_design<T: Send>(
    design: &SparseGridDesign,
    level: usize,
    f: impl Fn(&[f64]) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..design.point_count())
        .into_par_iter()
        .map_init(
            || vec![0.0; design.dim()],
            |y, m| {
                design.point_into(m, y);
                f(y).map_err(|e| Error::Sample {
                    level,
                    sample: m,
                    source: Box::new(e),
                })
            },
        )
        .collect()
}

/// Single-level collocation: `sum_m w_m psi(u_h(y_m))` on grid level
/// `grid_level` and mesh level `level`.
pub fn slsc_estimate(
    model: &dyn Model,
    grids: &GridFamily,
    level: usize,
    grid_level: usize,
    cost: &CostModel,
) -> Result<EstimateReport> {
    let start = Instant::now();
    let design = grids.design(grid_level)?;
    let values = evaluate_on_design(&design, level, |y| model.qoi(y, level))?;
    let value = pairwise_dot(design.quad_weights(), &values);
    let points = design.point_count() as u64;
    let c = cost.cost(model.mesh_width(level));
    Ok(EstimateReport {
        method: "slsc".into(),
        value,
        per_level: vec![LevelReport {
            k: level,
            grid_level: Some(grid_level),
            points,
            contribution: value,
            model_cost: points as f64 * c,
            solves: points,
            variance: None,
        }],
        total_model_cost: points as f64 * c,
        total_solve_count: points,
        solve_cost: points as f64 * c,
        wall_time: start.elapsed().as_secs_f64(),
        relative_error: None,
        finest_difference: None,
        std_error: None,
        seed: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MlscOptions {
    /// Merge consecutive mesh levels that share a grid into one difference.
    pub grouping: bool,
    /// Also compute `Q[psi(u_K) - psi(u_{K-1})]` on the finest grid.
    pub finest_difference: bool,
}

impl Default for MlscOptions {
    fn default() -> Self {
        MlscOptions {
            grouping: true,
            finest_difference: false,
        }
    }
}

/// Multilevel collocation `sum_k Q_{K-k}[psi(u_k) - psi(u_{k-1})]`.
pub fn mlsc_estimate(
    model: &dyn Model,
    grids: &GridFamily,
    plan: &LevelPlan,
    cost: &CostModel,
    opts: MlscOptions,
) -> Result<EstimateReport> {
    plan.validate()?;
    let start = Instant::now();
    let groups = if opts.grouping {
        plan.groups()
    } else {
        (0..=plan.k).map(|k| (k, k)).collect()
    };
    let level_cost: Vec<f64> = (0..=plan.k).map(|k| cost.cost(model.mesh_width(k))).collect();

    let mut per_level: Vec<LevelReport> = (0..=plan.k)
        .map(|k| {
            let points = grids.cardinality(plan.grid_levels[k])?;
            Ok(LevelReport {
                k,
                grid_level: Some(plan.grid_levels[k]),
                points,
                contribution: 0.0,
                model_cost: points as f64 * level_cost[k],
                solves: 0,
                variance: None,
            })
        })
        .collect::<Result<_>>()?;

    let mut contributions = Vec::with_capacity(groups.len());
    let mut solve_cost = 0.0;
    let mut finest_difference = None;
    for &(a, b) in &groups {
        let design = grids.design(plan.grid_levels[b])?;
        let pairs = evaluate_on_design(&design, b, |y| {
            let fine = model.qoi(y, b)?;
            let coarse = if a > 0 { model.qoi(y, a - 1)? } else { 0.0 };
            Ok(fine - coarse)
        })?;
        let term = pairwise_dot(design.quad_weights(), &pairs);
        let m = design.point_count() as u64;
        let solves = if a > 0 { 2 * m } else { m };
        per_level[b].contribution = term;
        per_level[b].solves = solves;
        solve_cost += m as f64 * (level_cost[b] + if a > 0 { level_cost[a - 1] } else { 0.0 });
        contributions.push(term);

        if opts.finest_difference && b == plan.k {
            finest_difference = Some(if a == b {
                term
            } else {
                let diff = evaluate_on_design(&design, b, |y| {
                    Ok(model.qoi(y, b)? - model.qoi(y, b - 1)?)
                })?;
                per_level[b].solves += 2 * m;
                solve_cost += m as f64 * (level_cost[b] + level_cost[b - 1]);
                pairwise_dot(design.quad_weights(), &diff)
            });
        }
    }

    let total_model_cost = pairwise_sum(&per_level.iter().map(|l| l.model_cost).collect::<Vec<_>>());
    Ok(EstimateReport {
        method: "mlsc".into(),
        value: pairwise_sum(&contributions),
        total_solve_count: per_level.iter().map(|l| l.solves).sum(),
        per_level,
        total_model_cost,
        solve_cost,
        wall_time: start.elapsed().as_secs_f64(),
        relative_error: None,
        finest_difference,
        std_error: None,
        seed: None,
    })
}
