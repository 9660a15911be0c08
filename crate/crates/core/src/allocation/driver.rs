use serde::{Deserialize, Serialize};

use super::constants::{choose_k, raw_counts, RateConstants};
use super::pilot::{convergence_test, estimate_constants, PilotOptions};
use super::rounding::{round_to_grid, RoundingScheme};
use crate::estimators::{mlsc_estimate, CostModel, EstimateReport, GridFamily, LevelPlan, MlscOptions, Model};
use crate::{Error, Result};

/// Serialized allocation for one target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    #[serde(rename = "K")]
    pub k: usize,
    pub eps: f64,
    pub grid_levels: Vec<Option<usize>>,
    pub counts_raw: Vec<f64>,
    pub counts_rounded: Vec<u64>,
    pub scheme: RoundingScheme,
    pub constants: RateConstants,
}

impl PlanDocument {
    /// The realizable plan, if every count landed on a grid.
    pub fn level_plan(&self) -> Result<LevelPlan> {
        let grid_levels = self
            .grid_levels
            .iter()
            .map(|l| l.ok_or_else(|| Error::invalid(format!("scheme {} does not produce grid sizes", self.scheme))))
            .collect::<Result<Vec<_>>>()?;
        let plan = LevelPlan {
            k: self.k,
            grid_levels,
            sample_counts: self.counts_rounded.clone(),
            rounding: Some(self.scheme),
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Grid sizes from level 0 up to the first one covering `needed`, at most
/// `max_level`.
pub fn covering_sizes(grids: &GridFamily, needed: u64, max_level: usize) -> Result<Vec<u64>> {
    let mut sizes = vec![grids.cardinality(0)?];
    while *sizes.last().unwrap() < needed && sizes.len() <= max_level {
        sizes.push(grids.cardinality(sizes.len())?);
    }
    Ok(sizes)
}

/// Counts for `eps` with `K` levels (from the spatial constant when `k` is
/// `None`), rounded with `scheme`.
pub fn plan(
    eps: f64,
    k: Option<usize>,
    rc: &RateConstants,
    grids: &GridFamily,
    scheme: RoundingScheme,
    max_grid_level: usize,
) -> Result<PlanDocument> {
    rc.validate()?;
    let k = match k {
        Some(k) => k,
        None => choose_k(eps, rc)?,
    };
    let counts_raw = raw_counts(eps, k, rc)?;
    let ceil: Vec<u64> = counts_raw.iter().map(|c| (c.ceil() as u64).max(1)).collect();
    let sizes = covering_sizes(grids, ceil[0], max_grid_level)?;
    let rounded = round_to_grid(&ceil, &sizes, scheme)?;
    Ok(PlanDocument {
        k,
        eps,
        grid_levels: rounded.grid_levels,
        counts_raw,
        counts_rounded: rounded.counts,
        scheme,
        constants: rc.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverOptions {
    pub max_k: usize,
    pub max_grid_level: usize,
    pub pilot: PilotOptions,
    /// Skip the pilot and use these constants.
    pub constants: Option<RateConstants>,
    pub grouping: bool,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions {
            max_k: 10,
            max_grid_level: 8,
            pilot: PilotOptions::default(),
            constants: None,
            grouping: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverStep {
    #[serde(rename = "K")]
    pub k: usize,
    pub plan: PlanDocument,
    pub value: f64,
    pub finest_difference: f64,
    pub threshold: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverOutcome {
    pub plan: LevelPlan,
    pub report: EstimateReport,
    pub constants: RateConstants,
    pub steps: Vec<DriverStep>,
}

/// Reference-free adaptive multilevel collocation: estimate constants once,
/// then for `K = 1, 2, ...` allocate, round, estimate and stop at the first
/// `K` whose finest-level difference passes the convergence test.
pub fn adaptive_driver(
    model: &dyn Model,
    grids: &GridFamily,
    eps: f64,
    scheme: RoundingScheme,
    cost: &CostModel,
    opts: &DriverOptions,
) -> Result<DriverOutcome> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if scheme == RoundingScheme::Ceil {
        return Err(Error::invalid("ceil counts are not realizable by a sparse grid; use up or updown"));
    }
    let rc = match &opts.constants {
        Some(rc) => rc.clone(),
        None => estimate_constants(model, grids, opts.pilot)?.constants,
    };
    rc.validate()?;
    let scale = rc.qoi_scale.unwrap_or(1.0);
    let threshold = (rc.eta.powf(rc.alpha) - 1.0) * eps / 2.0;
    log::info!("adaptive driver eps = {eps:e}, constants {rc:?}");

    let mut steps = Vec::new();
    for k in 1..=opts.max_k {
        let doc = plan(eps, Some(k), &rc, grids, scheme, opts.max_grid_level)?;
        let level_plan = doc.level_plan()?;
        let report = mlsc_estimate(
            model,
            grids,
            &level_plan,
            cost,
            MlscOptions {
                grouping: opts.grouping,
                finest_difference: true,
            },
        )?;
        let diff = report.finest_difference.unwrap_or(0.0) / scale;
        let converged = convergence_test(diff, &rc, eps);
        log::info!("K = {k}: grids {:?}, |diff| = {:.3e}, threshold {threshold:.3e}", level_plan.grid_levels, diff.abs());
        steps.push(DriverStep {
            k,
            plan: doc,
            value: report.value,
            finest_difference: diff,
            threshold,
            converged,
        });
        if converged {
            return Ok(DriverOutcome {
                plan: level_plan,
                report,
                constants: rc,
                steps,
            });
        }
    }
    let diagnostics = steps
        .iter()
        .map(|s| format!("K={} |diff|={:.3e}", s.k, s.finest_difference.abs()))
        .collect::<Vec<_>>()
        .join(", ");
    Err(Error::MaxLevelsExceeded {
        max_levels: opts.max_k,
        diagnostics: format!("{diagnostics}; threshold {threshold:.3e}"),
    })
}
