//! Monte Carlo and multilevel Monte Carlo baselines on the interval problem.

use std::sync::Arc;

use mlsc::estimators::{mc_estimate, mlmc_estimate, CostModel, MlmcSamples, PdeModel};
use mlsc::fem::{EllipticProblem, Functional, MeshHierarchy};
use mlsc::random_field::CoefficientField;

fn main() -> mlsc::Result<()> {
    let problem = EllipticProblem::new(Arc::new(CoefficientField::one_d(20)?), MeshHierarchy::new(1, 0.25, 2)?)?;
    let model = PdeModel::new(Arc::new(problem), Functional::PointValue { x: vec![0.75] })?;
    let cost = CostModel::for_dim(1);

    for m in [100, 1000, 10000] {
        let r = mc_estimate(&model, 4, m, 42, &cost)?;
        println!(
            "MC   M = {m:>5}: {:.6} +- {:.1e}, cost {:.0}",
            r.value,
            r.std_error.unwrap_or(f64::NAN),
            r.total_model_cost
        );
    }

    for eps in [1e-3, 3e-4] {
        let r = mlmc_estimate(&model, &MlmcSamples::Target { eps, k: 4, pilot: 16 }, 42, &cost)?;
        let counts: Vec<u64> = r.per_level.iter().map(|l| l.points).collect();
        println!(
            "MLMC eps = {eps:.0e}: {:.6} +- {:.1e}, samples {counts:?}, cost {:.0}",
            r.value,
            r.std_error.unwrap_or(f64::NAN),
            r.total_model_cost
        );
    }
    Ok(())
}
