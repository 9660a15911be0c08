use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::allocation::{
    adaptive_driver, choose_k, estimate_constants, plan, DriverOptions, PilotOptions, PilotReport,
    PlanDocument, RateConstants, RoundingScheme,
};
use crate::estimators::{
    mc_estimate, mlmc_estimate, mlsc_estimate, reference_value, sample_point, slsc_estimate, CostModel,
    EstimateReport, GridFamily, LevelPlan, MlmcSamples, MlscOptions, Model, PdeModel,
};
use crate::fem::{EllipticProblem, MeshHierarchy};
use crate::random_field::CoefficientField;
use crate::summation::linear_fit;
use crate::{Error, Result};

/// Version of the CSV column layout below.
pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: [&str; 12] = [
    "method",
    "eps",
    "K",
    "grids",
    "value",
    "rel_err",
    "interp_err",
    "spatial_err",
    "model_cost",
    "solve_cost",
    "wall_s",
    "seed",
];

/// One CSV row. `grids` lists grid levels per mesh level for collocation and
/// sample counts per level for Monte Carlo, separated by `;`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub method: Method,
    pub eps: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub grids: String,
    pub value: f64,
    pub rel_err: Option<f64>,
    pub interp_err: Option<f64>,
    pub spatial_err: Option<f64>,
    pub model_cost: f64,
    pub solve_cost: f64,
    pub wall_s: f64,
    pub seed: Option<u64>,
}

/// Least-squares slope of `log model_cost` against `log eps` for one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub method: Method,
    pub slope: f64,
    pub points: usize,
}

/// Table-6.1-style allocation rows for one target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRows {
    pub eps: f64,
    pub formula: PlanDocument,
    pub up: PlanDocument,
    pub updown: PlanDocument,
}

impl PlanRows {
    pub fn lines(&self) -> Vec<String> {
        let fmt = |label: &str, counts: &[u64]| {
            let cells: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            format!("{:<9.2e} {:<8} K={} {}", self.eps, label, self.formula.k, cells.join(" "))
        };
        vec![
            fmt("formula", &self.formula.counts_rounded),
            fmt("up", &self.up.counts_rounded),
            fmt("up/down", &self.updown.counts_rounded),
        ]
    }
}

/// A configured problem with its model, grids and cost model.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: PdeModel,
    pub grids: GridFamily,
    pub cost: CostModel,
}

const MAX_GRID_LEVEL: usize = 8;
const MC_PILOT: usize = 32;

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let p = &config.problem;
        let field = match p.spatial_dim {
            1 => CoefficientField::one_d(p.n)?,
            _ => CoefficientField::two_d(p.n)?,
        };
        let hierarchy = MeshHierarchy::new(p.spatial_dim, p.h0, p.eta)?;
        let problem = EllipticProblem::new(Arc::new(field), hierarchy)?.with_solver(p.solver);
        let model = PdeModel::new(Arc::new(problem), config.functional.clone())?;
        let grids = GridFamily::new(config.grid.kind, p.n, config.grid.weights.clone())?;
        let cost = CostModel::for_dim(p.spatial_dim);
        Ok(Experiment {
            config,
            model,
            grids,
            cost,
        })
    }

    pub fn pilot(&self) -> Result<PilotReport> {
        estimate_constants(&self.model, &self.grids, PilotOptions::default())
    }

    /// Configured constants, or pilot estimates.
    pub fn constants(&self) -> Result<RateConstants> {
        match &self.config.constants {
            Some(rc) => Ok(rc.clone()),
            None => Ok(self.pilot()?.constants),
        }
    }

    fn cache_dir(&self) -> Option<&Path> {
        self.config.reference.as_ref().and_then(|r| r.cache_dir.as_deref())
    }

    /// Overkill reference value, if configured.
    pub fn reference(&self) -> Result<Option<f64>> {
        match (&self.config.reference, self.config.reference_level()) {
            (Some(r), Some(level)) => Ok(Some(self.reference_at(level, r.l_star)?)),
            _ => Ok(None),
        }
    }

    /// Reference-level collocation at mesh level `level`.
    pub fn reference_at(&self, level: usize, grid_level: usize) -> Result<f64> {
        reference_value(&self.model, &self.grids, level, grid_level, self.cache_dir())
    }

    pub fn plan_rows(&self, eps: f64, rc: &RateConstants) -> Result<PlanRows> {
        let k = choose_k(eps, rc)?;
        let doc = |scheme| plan(eps, Some(k), rc, &self.grids, scheme, MAX_GRID_LEVEL);
        Ok(PlanRows {
            eps,
            formula: doc(RoundingScheme::Ceil)?,
            up: doc(RoundingScheme::UpToGrid)?,
            updown: doc(RoundingScheme::BalancedUpDown)?,
        })
    }

    /// Scheme used where a realizable grid is needed.
    fn grid_scheme(&self) -> RoundingScheme {
        match self.config.scheme {
            RoundingScheme::Ceil => RoundingScheme::UpToGrid,
            s => s,
        }
    }

    fn slsc_levels(&self, eps: Option<f64>, rc: Option<&RateConstants>) -> Result<(usize, usize)> {
        let (level, grid_level) = match (eps, rc) {
            (Some(eps), Some(rc)) => {
                // single-level count is the K = 0 allocation
                let doc = plan(eps, Some(0), rc, &self.grids, self.grid_scheme(), MAX_GRID_LEVEL)?;
                (choose_k(eps, rc)?, doc.level_plan()?.grid_levels[0])
            }
            _ => (0, 0),
        };
        Ok((
            self.config.level.unwrap_or(level),
            self.config.grid_level.unwrap_or(grid_level),
        ))
    }

    /// Estimate with `method` for target `eps` (or the fixed levels when
    /// `eps` is `None`) and score it against the reference.
    pub fn run_one(&self, method: Method, eps: Option<f64>) -> Result<(RunRow, EstimateReport)> {
        let start = Instant::now();
        let needs_rc = eps.is_some() || method == Method::Adaptive;
        let rc = if needs_rc { Some(self.constants()?) } else { None };
        let seed = self.config.seed;
        let reference = self.reference()?;

        let (report, k, grids) = match method {
            Method::Slsc => {
                let (level, grid_level) = self.slsc_levels(eps, rc.as_ref())?;
                let r = slsc_estimate(&self.model, &self.grids, level, grid_level, &self.cost)?;
                (r, level, grid_level.to_string())
            }
            Method::Mlsc => {
                let plan = match (eps, &rc) {
                    (Some(eps), Some(rc)) => {
                        plan(eps, None, rc, &self.grids, self.grid_scheme(), MAX_GRID_LEVEL)?.level_plan()?
                    }
                    _ => {
                        let levels = self.config.plans.first().cloned().ok_or_else(|| {
                            Error::config("plans", "mlsc without eps needs an explicit plan")
                        })?;
                        let max = levels[0];
                        LevelPlan::from_grid_levels(levels, &self.grids.sizes(max)?)?
                    }
                };
                let r = mlsc_estimate(&self.model, &self.grids, &plan, &self.cost, MlscOptions::default())?;
                (r, plan.k, join(&plan.grid_levels))
            }
            Method::Mc | Method::Mlmc => {
                let eps = eps.ok_or_else(|| Error::config("eps", "Monte Carlo methods need a target"))?;
                let rc = rc.as_ref().expect("constants loaded for eps targets");
                let k = self.config.level.unwrap_or(choose_k(eps, rc)?);
                let scale = match (rc.qoi_scale, reference) {
                    (Some(s), _) => s,
                    (None, Some(r)) => r.abs(),
                    (None, None) => self.pilot_mean(k)?.abs(),
                };
                let abs_eps = eps * scale;
                let r = if method == Method::Mc {
                    let var = self.pilot_variance(k)?;
                    let m = ((2.0 * var / (abs_eps * abs_eps)).ceil() as usize).max(2);
                    mc_estimate(&self.model, k, m, seed, &self.cost)?
                } else {
                    let samples = MlmcSamples::Target {
                        eps: abs_eps,
                        k,
                        pilot: 16,
                    };
                    mlmc_estimate(&self.model, &samples, seed, &self.cost)?
                };
                let counts = join(r.per_level.iter().map(|l| l.points));
                (r, k, counts)
            }
            Method::Adaptive => {
                let eps = eps.ok_or_else(|| Error::config("eps", "the adaptive driver needs a target"))?;
                // the convergence test needs the scale of the quantity of
                // interest, so unscaled constants are re-estimated
                let opts = DriverOptions {
                    constants: self.config.constants.clone().filter(|rc| rc.qoi_scale.is_some()),
                    ..DriverOptions::default()
                };
                let out = adaptive_driver(&self.model, &self.grids, eps, self.grid_scheme(), &self.cost, &opts)?;
                let levels = join(&out.plan.grid_levels);
                (out.report, out.plan.k, levels)
            }
        };

        let (rel_err, interp_err, spatial_err) = match (reference, &self.config.reference) {
            (Some(reference), Some(r)) => {
                let at_k = self.reference_at(k, r.l_star)?;
                let denom = reference.abs();
                (
                    Some((report.value - reference).abs() / denom),
                    Some((report.value - at_k).abs() / denom),
                    Some((at_k - reference).abs() / denom),
                )
            }
            _ => (None, None, None),
        };
        let report = match reference {
            Some(r) => report.with_reference(r),
            None => report,
        };
        let row = RunRow {
            method,
            eps,
            k,
            grids,
            value: report.value,
            rel_err,
            interp_err,
            spatial_err,
            model_cost: report.total_model_cost,
            solve_cost: report.solve_cost,
            wall_s: start.elapsed().as_secs_f64(),
            seed: matches!(method, Method::Mc | Method::Mlmc).then_some(seed),
        };
        Ok((row, report))
    }

    fn pilot_values(&self, level: usize) -> Result<Vec<f64>> {
        (0..MC_PILOT)
            .map(|i| {
                let y = sample_point(self.config.seed ^ 0x5eed, level, i, self.model.param_dim());
                self.model.qoi(&y, level)
            })
            .collect()
    }

    fn pilot_mean(&self, level: usize) -> Result<f64> {
        let v = self.pilot_values(level)?;
        Ok(v.iter().sum::<f64>() / v.len() as f64)
    }

    fn pilot_variance(&self, level: usize) -> Result<f64> {
        let v = self.pilot_values(level)?;
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        Ok(v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64)
    }

    /// `run` verb: the configured method on every target (or once with the
    /// fixed levels when there are no targets).
    pub fn run(&self) -> Result<Vec<(RunRow, EstimateReport)>> {
        if self.config.eps.is_empty() {
            return Ok(vec![self.run_one(self.config.method, None)?]);
        }
        self.config
            .eps
            .iter()
            .map(|&e| self.run_one(self.config.method, Some(e)))
            .collect()
    }

    /// `sweep` verb: every sweep method on every target, plus cost slopes.
    pub fn sweep(&self) -> Result<(Vec<RunRow>, Vec<SweepFit>)> {
        if self.config.eps.len() < 2 {
            return Err(Error::config("eps", "a sweep needs at least two targets"));
        }
        let mut rows = Vec::new();
        let mut fits = Vec::new();
        for &method in &self.config.sweep_methods {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &eps in &self.config.eps {
                let (row, _) = self.run_one(method, Some(eps))?;
                log::info!("{method} eps = {eps:e}: cost {:.3e}, rel_err {:?}", row.model_cost, row.rel_err);
                xs.push(eps.ln());
                ys.push(row.model_cost.ln());
                rows.push(row);
            }
            let (_, slope) = linear_fit(&xs, &ys);
            fits.push(SweepFit {
                method,
                slope,
                points: xs.len(),
            });
        }
        Ok((rows, fits))
    }
}

/// Write rows with the fixed header, plus a `.meta.json` sidecar carrying
/// the schema version.
pub fn write_csv(path: &Path, rows: &[RunRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    w.flush()?;
    let meta = serde_json::json!({
        "schema_version": CSV_SCHEMA_VERSION,
        "columns": CSV_COLUMNS,
    });
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    std::fs::write(meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}
