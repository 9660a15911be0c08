//! Karhunen-Loève eigenpairs of the exponential covariance with unit
//! correlation length on the unit interval and square, and one realization
//! of the resulting coefficient.

use mlsc::random_field::{default_pool_size, eigen_2d, Coefficient, CoefficientField, KLExpansion1D};

fn main() -> mlsc::Result<()> {
    let kl = KLExpansion1D::new(8)?;
    println!("interval");
    for (i, (w, lam)) in kl.roots.iter().zip(&kl.eigenvalues).enumerate() {
        println!("  n = {}: omega = {w:.6}, lambda = {lam:.6e}, sup|b| = {:.4}", i + 1, kl.eigenfunction_sup(i));
    }

    let n = 10;
    let sq = eigen_2d(n, default_pool_size(n))?;
    println!("square");
    for (k, ((i, j), lam)) in sq.pairs.iter().zip(&sq.eigenvalues).enumerate() {
        println!("  n = {:>2}: pair ({}, {}), lambda = {lam:.6e}", k + 1, i + 1, j + 1);
    }

    let field = CoefficientField::one_d(20)?;
    let y: Vec<f64> = (0..20).map(|n| if n % 2 == 0 { 0.5 } else { -0.5 }).collect();
    let values: Vec<String> = (0..=8)
        .map(|i| field.eval(&y, &[i as f64 / 8.0]).map(|a| format!("{a:.4}")))
        .collect::<mlsc::Result<_>>()?;
    println!("a(y, x) at x = 0, 1/8, .., 1: {}", values.join(" "));
    println!("upper bound over the parameter box: {:.4}", field.upper_bound());
    Ok(())
}
