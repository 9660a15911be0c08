//! Level and sample selection, rounding to realizable grids, pilot-based
//! constant estimation and the reference-free adaptive driver.

mod constants;
mod driver;
mod pilot;
mod rounding;

pub use constants::{
    choose_k, level_sum, raw_counts, sample_counts, theoretical_cost, EpsCostRegime, RateConstants, TheoreticalCost,
};
pub use driver::{adaptive_driver, covering_sizes, plan, DriverOptions, DriverOutcome, DriverStep, PlanDocument};
pub use pilot::{
    convergence_test, estimate_constants, fit_interpolation_rate, interpolation_errors, zeta_proxy, PilotError, PilotOptions, PilotReport,
};
pub use rounding::{round_to_grid, Rounded, RoundingScheme};
