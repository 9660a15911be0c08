//! Reference-free adaptive multilevel collocation on the one-dimensional
//! problem with 20 random variables: estimate constants from a pilot, then
//! add levels until the finest difference passes the convergence test.

use std::sync::Arc;

use mlsc::allocation::{adaptive_driver, estimate_constants, DriverOptions, PilotOptions, RoundingScheme};
use mlsc::estimators::{CostModel, GridFamily, PdeModel};
use mlsc::fem::{EllipticProblem, Functional, MeshHierarchy};
use mlsc::random_field::CoefficientField;

fn main() -> mlsc::Result<()> {
    env_logger::init();
    let field = Arc::new(CoefficientField::one_d(20)?);
    let problem = Arc::new(EllipticProblem::new(field, MeshHierarchy::new(1, 0.25, 2)?)?);
    let model = PdeModel::new(problem, Functional::PointValue { x: vec![0.75] })?;
    let grids = GridFamily::smolyak(20);

    let pilot = estimate_constants(&model, &grids, PilotOptions::default())?;
    let rc = &pilot.constants;
    println!(
        "pilot: alpha = {:.3}, C_s = {:.3e}, mu = {:.3}, C = {:.3e}, scale = {:.6}",
        rc.alpha, rc.c_s, rc.mu, rc.c, pilot.scale
    );

    let eps = 6.3e-4;
    let opts = DriverOptions {
        constants: Some(rc.clone()),
        ..DriverOptions::default()
    };
    let out = adaptive_driver(&model, &grids, eps, RoundingScheme::BalancedUpDown, &CostModel::for_dim(1), &opts)?;
    for s in &out.steps {
        println!(
            "K = {}: counts {:?} -> {:?}, |diff| = {:.2e} (threshold {:.2e})",
            s.k,
            s.plan.counts_raw.iter().map(|c| c.ceil() as u64).collect::<Vec<_>>(),
            s.plan.counts_rounded,
            s.finest_difference.abs(),
            s.threshold
        );
    }
    println!(
        "estimate {:.8} with K = {}, model cost {:.0}",
        out.report.value, out.plan.k, out.report.total_model_cost
    );
    Ok(())
}
