//! Single-level against multilevel collocation on the interval problem: the
//! multilevel estimator pairs the coarse meshes with the rich grids.

use std::sync::Arc;

use mlsc::estimators::{mlsc_estimate, slsc_estimate, CostModel, GridFamily, LevelPlan, MlscOptions, PdeModel};
use mlsc::fem::{EllipticProblem, Functional, MeshHierarchy};
use mlsc::random_field::CoefficientField;

fn main() -> mlsc::Result<()> {
    let problem = EllipticProblem::new(Arc::new(CoefficientField::one_d(20)?), MeshHierarchy::new(1, 0.25, 2)?)?;
    let model = PdeModel::new(Arc::new(problem), Functional::PointValue { x: vec![0.75] })?;
    let grids = GridFamily::smolyak(20);
    let cost = CostModel::for_dim(1);

    let reference = slsc_estimate(&model, &grids, 6, 3, &cost)?.value;
    println!("reference (h = 1/256, grid level 3): {reference:.10}");

    let sl = slsc_estimate(&model, &grids, 4, 2, &cost)?;
    println!(
        "SLSC  h = 1/64, grid 2:       {:.10}  rel err {:.2e}  cost {:.0}",
        sl.value,
        (sl.value - reference).abs() / reference,
        sl.total_model_cost
    );

    for levels in [vec![2, 2, 1, 1, 0], vec![2, 1, 1, 0, 0], vec![3, 2, 1, 1, 0]] {
        let plan = LevelPlan::from_grid_levels(levels.clone(), &grids.sizes(3)?)?;
        let ml = mlsc_estimate(&model, &grids, &plan, &cost, MlscOptions::default())?;
        println!(
            "MLSC  grids {levels:?}: {:.10}  rel err {:.2e}  cost {:.0}",
            ml.value,
            (ml.value - reference).abs() / reference,
            ml.total_model_cost
        );
        for l in &ml.per_level {
            println!("      k = {}: {} points, contribution {:+.3e}", l.k, l.points, l.contribution);
        }
    }
    Ok(())
}
