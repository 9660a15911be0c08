//! Asymptotic cost exponents of single- and multilevel collocation for the
//! three orderings of `beta` and `mu gamma`.

use mlsc::allocation::{theoretical_cost, RateConstants};

fn main() -> mlsc::Result<()> {
    let base = RateConstants {
        alpha: 2.0,
        c_s: 1.0,
        beta: 2.0,
        mu: 0.8,
        c: 0.01,
        gamma: 1.0,
        c_c: 1.0,
        eta: 2.0,
        h0: 1.0,
        qoi_scale: None,
    };
    let cases = [
        ("interval, mu = 0.8", base.clone()),
        ("square, mu = 1.4", RateConstants { mu: 1.4, gamma: 2.0, ..base.clone() }),
        ("square, mu = 1.0", RateConstants { mu: 1.0, gamma: 2.0, ..base.clone() }),
    ];
    for (name, rc) in cases {
        let t = theoretical_cost(1e-4, &rc, true)?;
        println!(
            "{name:<20} {:?}: ML eps^-{:.3} (log power {:.2}), SL eps^-{:.3}; at eps = 1e-4 ML {:.3e}, SL {:.3e}",
            t.regime, t.ml_exponent, t.log_exponent, t.sl_exponent, t.ml_cost, t.sl_cost
        );
    }
    Ok(())
}
