//! Sparse-grid interpolation of an analytic function: the maximum error at
//! random probes against the number of points, for several index sets.

use std::sync::Arc;

use mlsc::sparse_grid::{build_design, GridKind, Interpolant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mlsc::Result<()> {
    let dim = 4;
    let f = |y: &[f64]| 1.0 / (2.0 + y.iter().enumerate().map(|(n, v)| v / (n + 2) as f64).sum::<f64>());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let probes: Vec<Vec<f64>> = (0..500)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();

    let anisotropic = [1.0, 1.5, 2.0, 2.5];
    for (kind, weights) in [
        (GridKind::Smolyak, None),
        (GridKind::AnisotropicSmolyak, Some(&anisotropic[..])),
        (GridKind::TotalDegree, None),
    ] {
        println!("{kind:?}");
        for level in 0..=5 {
            let design = Arc::new(build_design(kind, dim, level, weights)?);
            let interp = Interpolant::from_fn(design.clone(), f);
            let mut worst = 0.0f64;
            for y in &probes {
                worst = worst.max((interp.interpolate(y)? - f(y)).abs());
            }
            println!("  level {level}: {:>5} points, max error {worst:.2e}", design.point_count());
        }
    }
    Ok(())
}
