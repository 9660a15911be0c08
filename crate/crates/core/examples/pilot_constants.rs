//! Rate constants from cheap pilot levels, with the individual interpolation
//! errors behind the fit of `C` and `mu`.

use std::sync::Arc;

use mlsc::allocation::{estimate_constants, zeta_proxy, PilotOptions};
use mlsc::estimators::{GridFamily, PdeModel};
use mlsc::fem::{EllipticProblem, Functional, MeshHierarchy};
use mlsc::random_field::CoefficientField;

fn main() -> mlsc::Result<()> {
    let problem = EllipticProblem::new(Arc::new(CoefficientField::one_d(20)?), MeshHierarchy::new(1, 0.25, 2)?)?;
    let model = PdeModel::new(Arc::new(problem), Functional::PointValue { x: vec![0.75] })?;
    let grids = GridFamily::smolyak(20);

    let report = estimate_constants(&model, &grids, PilotOptions::default())?;
    let rc = &report.constants;
    println!("differences Q_1[psi_1 - psi_0] = {:.4e}, Q_1[psi_2 - psi_1] = {:.4e}", report.differences[0], report.differences[1]);
    println!("alpha = beta = {:.3}, C_s = {:.3e}, mu = {:.3}, C = {:.3e}", rc.alpha, rc.c_s, rc.mu, rc.c);
    for e in &report.errors {
        println!(
            "  interpoland {} grid level {} ({:>5} points): error {:.2e}, scaled {:.2e}",
            e.interpoland, e.grid_level, e.points, e.error, e.scaled
        );
    }
    for level in 1..=3 {
        println!("max |psi_k - psi_(k-1)| over probes, k = {level}: {:.2e}", zeta_proxy(&model, level, 64, 7)?);
    }
    Ok(())
}
