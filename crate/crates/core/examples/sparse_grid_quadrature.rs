//! Smolyak Clenshaw-Curtis grids: point counts and quadrature of a smooth
//! function of several uniform variables on `[-1, 1]`.

use mlsc::estimators::smolyak_cardinality;
use mlsc::sparse_grid::{build_design, GridKind};
use mlsc::summation::pairwise_dot;

fn main() -> mlsc::Result<()> {
    for n in [10, 20] {
        let counts: Vec<u64> = (0..=5).map(|l| smolyak_cardinality(n, l)).collect();
        println!("N = {n:>2}: {counts:?}");
    }

    // E[exp(sum_n y_n / n)] with y_n uniform on [-1, 1]
    let dim = 6;
    let exact: f64 = (1..=dim).map(|n| (n as f64) * (1.0 / n as f64).sinh()).product();
    for level in 0..=5 {
        let design = build_design(GridKind::Smolyak, dim, level, None)?;
        let values: Vec<f64> = design
            .points()
            .iter()
            .map(|y| y.iter().enumerate().map(|(n, v)| v / (n + 1) as f64).sum::<f64>().exp())
            .collect();
        let q = pairwise_dot(design.quad_weights(), &values);
        println!("level {level}: {:>5} points, error {:.2e}", design.point_count(), (q - exact).abs());
    }
    Ok(())
}
