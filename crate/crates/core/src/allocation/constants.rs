use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rates and constants of the error and cost model.
///
/// With `h_k = h0 eta^{-k}`: the spatial error is `C_s h_K^alpha`, the
/// interpolation error of the level-`k` difference on `M` points is
/// `C M^{-mu} (h_k / h0)^beta`, and one sample on level `k` costs
/// `C_c h_k^{-gamma}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    pub alpha: f64,
    pub c_s: f64,
    pub beta: f64,
    pub mu: f64,
    /// Product of the interpolation and analyticity constants.
    pub c: f64,
    pub gamma: f64,
    pub c_c: f64,
    pub eta: f64,
    pub h0: f64,
    /// Magnitude used to turn absolute errors into relative ones; constants
    /// estimated in relative mode are already divided by it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qoi_scale: Option<f64>,
}

impl RateConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("C_s", self.c_s),
            ("beta", self.beta),
            ("mu", self.mu),
            ("C", self.c),
            ("gamma", self.gamma),
            ("C_c", self.c_c),
            ("h0", self.h0),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.eta > 1.0) {
            return Err(Error::config("eta", format!("must exceed 1, got {}", self.eta)));
        }
        Ok(())
    }

    /// Warning text when `alpha >= min(beta, mu gamma)` fails.
    pub fn hypothesis_warning(&self) -> Option<String> {
        let bound = self.beta.min(self.mu * self.gamma);
        (self.alpha < bound).then(|| {
            format!(
                "alpha = {} is below min(beta, mu gamma) = {bound}; the cost bounds do not apply",
                self.alpha
            )
        })
    }

    pub fn mesh_width(&self, k: usize) -> f64 {
        self.h0 * self.eta.powi(-(k as i32))
    }
}

/// Smallest `K >= 0` with `C_s h_K^alpha <= eps / 2`.
pub fn choose_k(eps: f64, rc: &RateConstants) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let x = (2.0 * rc.c_s * rc.h0.powf(rc.alpha) / eps).ln() / (rc.alpha * rc.eta.ln());
    // absorb round-off when eps sits exactly on a level boundary
    let k = (x - 1e-9).ceil();
    Ok(if k > 0.0 { k as usize } else { 0 })
}

/// `S(eta, K) = sum_{k=0}^K eta^{-k (beta - gamma mu) / (mu + 1)}`.
pub fn level_sum(k_max: usize, rc: &RateConstants) -> f64 {
    let r = rc.eta.powf(-(rc.beta - rc.gamma * rc.mu) / (rc.mu + 1.0));
    (0..=k_max).map(|k| r.powi(k as i32)).sum()
}

const MAX_COUNT: f64 = 1e15;

/// Optimal real-valued counts `M_{K-k}` for mesh levels `k = 0..=K`.
pub fn raw_counts(eps: f64, k_max: usize, rc: &RateConstants) -> Result<Vec<f64>> {
    if !(rc.mu > 0.0) {
        return Err(Error::config("mu", "must be positive"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let base = (2.0 * rc.c * level_sum(k_max, rc)).powf(1.0 / rc.mu) * eps.powf(-1.0 / rc.mu);
    let decay = rc.eta.powf(-(rc.beta + rc.gamma) / (rc.mu + 1.0));
    let counts: Vec<f64> = (0..=k_max).map(|k| base * decay.powi(k as i32)).collect();
    if counts.iter().any(|c| !c.is_finite() || *c > MAX_COUNT) {
        return Err(Error::invalid(format!(
            "sample counts overflow for eps = {eps}: {:e}",
            counts[0]
        )));
    }
    Ok(counts)
}

/// Counts rounded up to integers.
pub fn sample_counts(eps: f64, k_max: usize, rc: &RateConstants) -> Result<Vec<u64>> {
    Ok(raw_counts(eps, k_max, rc)?
        .into_iter()
        .map(|c| (c.ceil() as u64).max(1))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsCostRegime {
    /// `beta > mu gamma`: `eps^{-1/mu}`.
    BetaGt,
    /// `beta = mu gamma`: `eps^{-1/mu} |log eps|^{1 + 1/mu}`.
    BetaEq,
    /// `beta < mu gamma`: `eps^{-1/mu - (gamma mu - beta)/(alpha mu)}`.
    BetaLt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalCost {
    pub regime: EpsCostRegime,
    pub ml_exponent: f64,
    pub log_exponent: f64,
    pub sl_exponent: f64,
    /// Cost bounds up to constants at the requested `eps`.
    pub ml_cost: f64,
    pub sl_cost: f64,
}

/// Asymptotic eps-cost of multilevel and single-level collocation. With
/// `strict`, `eps` outside `(0, 1/e)` is an error; otherwise a warning.
pub fn theoretical_cost(eps: f64, rc: &RateConstants, strict: bool) -> Result<TheoreticalCost> {
    if !(eps > 0.0 && eps < (-1.0f64).exp()) {
        let msg = format!("eps = {eps} is outside (0, 1/e) where the bound holds");
        if strict || !(eps > 0.0) {
            return Err(Error::invalid(msg));
        }
        log::warn!("{msg}");
    }
    let mg = rc.mu * rc.gamma;
    let regime = if (rc.beta - mg).abs() <= 1e-12 * rc.beta.abs().max(mg.abs()) {
        EpsCostRegime::BetaEq
    } else if rc.beta > mg {
        EpsCostRegime::BetaGt
    } else {
        EpsCostRegime::BetaLt
    };
    let (ml_exponent, log_exponent) = match regime {
        EpsCostRegime::BetaGt => (1.0 / rc.mu, 0.0),
        EpsCostRegime::BetaEq => (1.0 / rc.mu, 1.0 + 1.0 / rc.mu),
        EpsCostRegime::BetaLt => (1.0 / rc.mu + (mg - rc.beta) / (rc.alpha * rc.mu), 0.0),
    };
    let sl_exponent = 1.0 / rc.mu + rc.gamma / rc.alpha;
    Ok(TheoreticalCost {
        regime,
        ml_exponent,
        log_exponent,
        sl_exponent,
        ml_cost: eps.powf(-ml_exponent) * eps.ln().abs().powf(log_exponent),
        sl_cost: eps.powf(-sl_exponent),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table_constants() -> RateConstants {
        RateConstants {
            alpha: 2.1,
            c_s: 0.01,
            beta: 2.1,
            mu: 0.8,
            c: 0.01,
            gamma: 1.0,
            c_c: 1.0,
            eta: 2.0,
            h0: 1.0,
            qoi_scale: None,
        }
    }

    #[test]
    fn number_of_levels() {
        let mut rc = table_constants();
        rc.alpha = 2.0;
        rc.c_s = 1.0;
        assert_eq!(choose_k(1e-3, &rc).unwrap(), 6);
        for k0 in 0..8 {
            let eps = 2.0 * rc.c_s * rc.eta.powf(-rc.alpha * k0 as f64);
            assert_eq!(choose_k(eps, &rc).unwrap(), k0);
        }
        assert_eq!(choose_k(5.0, &rc).unwrap(), 0);
        assert!(choose_k(0.0, &rc).is_err());
    }

    #[test]
    fn coarse_width_enters_the_level_count() {
        let mut rc = table_constants();
        rc.alpha = 2.0;
        rc.c_s = 1.0;
        rc.h0 = 0.5;
        // C_s h0^2 = 1/4: same as h0 = 1 with C_s = 1/4
        let mut unit = rc.clone();
        unit.h0 = 1.0;
        unit.c_s = 0.25;
        for eps in [1e-2, 1e-3, 1e-5] {
            assert_eq!(choose_k(eps, &rc).unwrap(), choose_k(eps, &unit).unwrap());
        }
    }

    #[test]
    fn single_level_count() {
        let rc = table_constants();
        let c = sample_counts(1e-3, 0, &rc).unwrap();
        let expect = ((2.0 * rc.c).powf(1.0 / rc.mu) * 1e-3f64.powf(-1.0 / rc.mu)).ceil() as u64;
        assert_eq!(c, vec![expect]);
    }

    #[test]
    fn formula_row_is_within_a_factor_two_of_the_table() {
        let rc = table_constants();
        let c = sample_counts(6.3e-4, 2, &rc).unwrap();
        for (got, paper) in c.iter().zip([191.0, 48.0, 15.0]) {
            let r = *got as f64 / paper;
            assert!((0.5..=2.0).contains(&r), "{c:?}");
        }
    }

    #[test]
    fn counts_scale_with_accuracy() {
        let rc = table_constants();
        let a = raw_counts(1e-3, 3, &rc).unwrap();
        let b = raw_counts(5e-4, 3, &rc).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y / x - 2f64.powf(1.0 / rc.mu)).abs() < 1e-12);
        }
        for w in a.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn overflow_and_bad_mu_are_rejected() {
        let mut rc = table_constants();
        assert!(raw_counts(1e-30, 2, &rc).is_err());
        rc.mu = 0.0;
        assert!(raw_counts(1e-3, 2, &rc).is_err());
    }

    #[test]
    fn cost_regimes() {
        let two_d = RateConstants {
            alpha: 2.0,
            beta: 2.0,
            mu: 1.4,
            gamma: 2.0,
            ..table_constants()
        };
        let t = theoretical_cost(1e-3, &two_d, true).unwrap();
        assert_eq!(t.regime, EpsCostRegime::BetaLt);
        assert!((t.ml_exponent - 1.0).abs() < 0.01);
        assert!((t.sl_exponent - 1.714).abs() < 0.01);

        let one_d = RateConstants {
            alpha: 2.0,
            beta: 2.0,
            mu: 0.8,
            gamma: 1.0,
            ..table_constants()
        };
        let t = theoretical_cost(1e-3, &one_d, true).unwrap();
        assert_eq!(t.regime, EpsCostRegime::BetaGt);
        assert!((t.ml_exponent - 1.25).abs() < 0.01);
        assert!((t.sl_exponent - 1.75).abs() < 0.01);

        let eq = RateConstants {
            beta: 1.6,
            mu: 0.8,
            gamma: 2.0,
            ..table_constants()
        };
        let t = theoretical_cost(1e-3, &eq, true).unwrap();
        assert_eq!(t.regime, EpsCostRegime::BetaEq);
        assert!((t.log_exponent - 2.25).abs() < 1e-12);

        assert!(theoretical_cost(0.5, &one_d, true).is_err());
        assert!(theoretical_cost(0.5, &one_d, false).is_ok());
    }

    #[test]
    fn hypothesis_check() {
        let mut rc = table_constants();
        assert!(rc.hypothesis_warning().is_none());
        rc.alpha = 0.5;
        assert!(rc.hypothesis_warning().is_some());
        rc.eta = 1.0;
        assert!(rc.validate().unwrap_err().to_string().contains("eta"));
    }
}
