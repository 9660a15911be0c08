//! Level and sample selection from rate constants, and the three ways of
//! mapping the formula counts onto realizable Smolyak grids.

use mlsc::allocation::{choose_k, plan, RateConstants, RoundingScheme};
use mlsc::estimators::GridFamily;

fn main() -> mlsc::Result<()> {
    let rc = RateConstants {
        alpha: 2.1,
        c_s: 0.03,
        beta: 2.1,
        mu: 0.8,
        c: 0.01,
        gamma: 1.0,
        c_c: 1.0,
        eta: 2.0,
        h0: 0.25,
        qoi_scale: None,
    };
    let grids = GridFamily::smolyak(20);
    println!("grid sizes: {:?}", grids.sizes(5)?);
    for eps in [6.3e-4, 7.9e-5, 1.4e-5, 4.7e-6] {
        let k = choose_k(eps, &rc)?;
        println!("eps = {eps:.1e}, K = {k}");
        for scheme in [RoundingScheme::Ceil, RoundingScheme::UpToGrid, RoundingScheme::BalancedUpDown] {
            let doc = plan(eps, Some(k), &rc, &grids, scheme, 8)?;
            println!("  {:<7} {:?}", scheme.to_string(), doc.counts_rounded);
        }
    }
    Ok(())
}
