//! One parameter sample solved on a hierarchy of meshes in one and two
//! dimensions, with the quantities of interest on each level.

use std::sync::Arc;

use mlsc::fem::{EllipticProblem, Functional, MeshHierarchy};
use mlsc::random_field::CoefficientField;

fn main() -> mlsc::Result<()> {
    let y1 = vec![0.3; 20];
    let problem = EllipticProblem::new(Arc::new(CoefficientField::one_d(20)?), MeshHierarchy::new(1, 0.25, 2)?)?;
    let point = Functional::PointValue { x: vec![0.75] };
    println!("interval, N = 20");
    let mut prev = None;
    for level in 0..=6 {
        let sol = problem.solve(&y1, level)?;
        let v = point.eval(&sol.field)?;
        let diff = prev.map_or(String::new(), |p: f64| format!(", difference {:.2e}", (v - p).abs()));
        println!("  h = 1/{:<4} u(3/4) = {v:.10}{diff}", problem.hierarchy().cells(level));
        prev = Some(v);
    }

    let y2 = vec![-0.4; 10];
    let problem = EllipticProblem::new(Arc::new(CoefficientField::two_d(10)?), MeshHierarchy::new(2, 0.25, 2)?)?;
    let average = Functional::LocalAverage {
        reference_width: 1.0 / 256.0,
        center: vec![0.5, 0.5],
    };
    println!("square, N = 10");
    for level in 0..=5 {
        let sol = problem.solve(&y2, level)?;
        println!(
            "  h = 1/{:<4} local average {:.10}, L2 norm {:.10}, energy {:.10}",
            problem.hierarchy().cells(level),
            average.eval(&sol.field)?,
            Functional::L2Norm.eval(&sol.field)?,
            sol.energy
        );
    }
    Ok(())
}
