//! Single-level and multilevel collocation, Monte Carlo baselines, cost
//! bookkeeping and cached reference values.

mod collocation;
mod grid_family;
mod model;
mod monte_carlo;
mod reference;
mod report;

pub use collocation::{evaluate_on_design, mlsc_estimate, slsc_estimate, MlscOptions};
pub use grid_family::{smolyak_cardinality, CostModel, GridFamily};
pub use model::{level_difference, FnModel, Model, PdeModel};
pub use monte_carlo::{mc_estimate, mlmc_estimate, sample_point, MlmcSamples};
pub use reference::{reference_path, reference_value};
pub use report::{EstimateReport, LevelPlan, LevelReport};
