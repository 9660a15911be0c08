//! Anisotropy weights and predicted algebraic convergence rates.

use crate::{Error, Result};

/// Convergence rate `alpha_n` of best polynomial approximation for a function
/// analytic in a `tau`-neighbourhood of an interval of the given width:
/// `alpha = 1/2 log(2 tau / w + sqrt(1 + 4 tau^2 / w^2))`.
pub fn weight_from_tau(tau: f64, interval_width: f64) -> Result<f64> {
    if !(tau > 0.0) || !(interval_width > 0.0) {
        return Err(Error::invalid(format!(
            "tau and interval width must be positive (got {tau}, {interval_width})"
        )));
    }
    let r = 2.0 * tau / interval_width;
    // asinh(r) == log(r + sqrt(1 + r^2)), accurate as r -> 0
    Ok(0.5 * r.asinh())
}

/// Family of interpolation grids for which a rate `mu(N)` is tabulated.
#[derive(Clone, Debug, PartialEq)]
pub enum RateGrid {
    FullTensor,
    Smolyak,
    /// Anisotropic Smolyak with weight vector `alpha_n`.
    AnisotropicSmolyak(Vec<f64>),
}

/// Predicted rate `mu` in `error <= C M^{-mu}` for `N`-dimensional Clenshaw-Curtis
/// interpolation of a function with analyticity rate `alpha_min`.
pub fn predicted_mu(dim: usize, alpha_min: f64, grid: &RateGrid) -> Result<f64> {
    if dim == 0 || !(alpha_min > 0.0) {
        return Err(Error::invalid("predicted_mu needs N >= 1 and alpha_min > 0"));
    }
    let n = dim as f64;
    Ok(match grid {
        RateGrid::FullTensor => alpha_min / n,
        RateGrid::Smolyak => alpha_min / (1.0 + (2.0 * n).ln()),
        RateGrid::AnisotropicSmolyak(weights) => {
            if weights.len() != dim || weights.iter().any(|&a| !(a > 0.0)) {
                return Err(Error::invalid("anisotropy weights must be N positive numbers"));
            }
            let ln2 = std::f64::consts::LN_2;
            let denom = ln2 + weights.iter().map(|a| alpha_min / a).sum::<f64>();
            alpha_min * (ln2 * std::f64::consts::E - 0.5) / denom
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_limits_and_closed_form() {
        assert!(weight_from_tau(1e-12, 2.0).unwrap() < 1e-11);
        let a = weight_from_tau(1.0, 2.0).unwrap();
        assert!((a - 0.5 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!(weight_from_tau(0.6, 2.0).unwrap() > weight_from_tau(0.3, 2.0).unwrap());
        assert!(weight_from_tau(0.0, 2.0).is_err());
        assert!(weight_from_tau(1.0, -1.0).is_err());
    }

    #[test]
    fn tabulated_rates() {
        assert_eq!(predicted_mu(1, 1.0, &RateGrid::FullTensor).unwrap(), 1.0);
        let s10 = predicted_mu(10, 1.0, &RateGrid::Smolyak).unwrap();
        assert!((s10 - 1.0 / (1.0 + 20f64.ln())).abs() < 1e-15);
        assert!((s10 - 0.2503).abs() < 1e-4);
        assert!(predicted_mu(20, 1.0, &RateGrid::Smolyak).unwrap() < s10);
        // isotropic weights in the anisotropic formula
        let an = predicted_mu(2, 1.0, &RateGrid::AnisotropicSmolyak(vec![1.0, 1.0])).unwrap();
        let expect = (2f64.ln() * std::f64::consts::E - 0.5) / (2f64.ln() + 2.0);
        assert!((an - expect).abs() < 1e-15);
    }
}
