use serde::{Deserialize, Serialize};

use super::constants::RateConstants;
use crate::estimators::{evaluate_on_design, level_difference, sample_point, GridFamily, Model};
use crate::summation::{linear_fit, pairwise_dot};
use crate::{Error, Result};

/// Pilot computation: mesh levels `0, 1, 2`, grid levels `0..grid_levels`,
/// errors measured against grid level `reference_grid_level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PilotOptions {
    pub grid_levels: usize,
    pub reference_grid_level: usize,
    /// Divide error constants by the magnitude of the quantity of interest.
    pub relative: bool,
}

impl Default for PilotOptions {
    fn default() -> Self {
        PilotOptions {
            grid_levels: 3,
            reference_grid_level: 3,
            relative: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilotError {
    /// Mesh level `k` of the interpoland: `psi(u_0)` for 0, otherwise
    /// `psi(u_k) - psi(u_{k-1})`.
    pub interpoland: usize,
    pub grid_level: usize,
    pub points: u64,
    pub error: f64,
    /// Error with the `(h_k / h0)^beta` factor removed.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilotReport {
    pub constants: RateConstants,
    /// `Q_1[psi(u_1) - psi(u_0)]` and `Q_1[psi(u_2) - psi(u_1)]`.
    pub differences: [f64; 2],
    pub errors: Vec<PilotError>,
    pub scale: f64,
}

/// Least-squares fit of `log e = log C - mu log M`; zero errors are dropped.
pub fn fit_interpolation_rate(points: &[u64], errors: &[f64]) -> Result<(f64, f64)> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(&m, &e)| ((m as f64).ln(), e.ln()))
        .unzip();
    let distinct = xs.iter().any(|x| (x - xs[0]).abs() > 0.0);
    if xs.len() < 2 || !distinct {
        return Err(Error::Estimation(
            "fewer than two nonzero interpolation errors at distinct grid sizes".into(),
        ));
    }
    let (intercept, slope) = linear_fit(&xs, &ys);
    let mu = -slope;
    if !(mu > 0.0) {
        return Err(Error::Estimation(format!("fitted interpolation rate mu = {mu} is not positive")));
    }
    Ok((intercept.exp(), mu))
}

/// Quadrature errors `|Q_ref v_k - Q_l v_k|` of the interpolands
/// `v_0 = psi(u_0)` and `v_k = psi(u_k) - psi(u_{k-1})` for each mesh level
/// in `mesh_levels` and grid level in `grid_levels`. `scaled` removes the
/// factor `(h_k / h0)^beta`; with `relative` everything is divided by
/// `|Q_ref psi(u_kmax)|`, which is returned as the scale.
pub fn interpolation_errors(
    model: &dyn Model,
    grids: &GridFamily,
    mesh_levels: &[usize],
    grid_levels: &[usize],
    reference_grid_level: usize,
    beta: f64,
    relative: bool,
) -> Result<(Vec<PilotError>, f64)> {
    let finest = *mesh_levels
        .iter()
        .max()
        .ok_or_else(|| Error::invalid("no mesh levels given"))?;
    let eta = model.eta() as f64;
    let quad = |l: usize| -> Result<(Vec<f64>, u64)> {
        let design = grids.design(l)?;
        let rows = evaluate_on_design(&design, finest, |y| {
            let psi = (0..=finest).map(|k| model.qoi(y, k)).collect::<Result<Vec<f64>>>()?;
            Ok(mesh_levels
                .iter()
                .map(|&k| if k == 0 { psi[0] } else { psi[k] - psi[k - 1] })
                .collect::<Vec<f64>>())
        })?;
        let q = (0..mesh_levels.len())
            .map(|j| {
                let v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                pairwise_dot(design.quad_weights(), &v)
            })
            .collect();
        Ok((q, design.point_count() as u64))
    };
    let (reference, _) = quad(reference_grid_level)?;
    let scale = if relative {
        // telescoped value at the finest listed mesh level
        let s = if mesh_levels.iter().copied().eq(0..=finest) {
            reference.iter().sum::<f64>().abs()
        } else {
            let design = grids.design(reference_grid_level)?;
            let v = evaluate_on_design(&design, finest, |y| model.qoi(y, finest))?;
            pairwise_dot(design.quad_weights(), &v).abs()
        };
        if !(s > 0.0) {
            return Err(Error::Estimation("quantity of interest vanishes; use absolute mode".into()));
        }
        s
    } else {
        1.0
    };
    let mut errors = Vec::new();
    for &l in grid_levels {
        let (q, points) = quad(l)?;
        for (j, &k) in mesh_levels.iter().enumerate() {
            let error = (reference[j] - q[j]).abs() / scale;
            errors.push(PilotError {
                interpoland: k,
                grid_level: l,
                points,
                error,
                scaled: error * eta.powf(beta * k as f64),
            });
        }
    }
    Ok((errors, scale))
}

/// Estimate `alpha`, `C_s`, `beta = alpha`, `C` and `mu` from cheap pilot
/// levels; `gamma` is the spatial dimension and `C_c = 1`.
pub fn estimate_constants(model: &dyn Model, grids: &GridFamily, opts: PilotOptions) -> Result<PilotReport> {
    if opts.grid_levels < 2 || opts.reference_grid_level < opts.grid_levels {
        return Err(Error::invalid(
            "pilot needs at least two grid levels below or at the reference level",
        ));
    }
    let eta = model.eta() as f64;
    let h0 = model.h0();

    // level-1 quadrature of psi(u_0), psi(u_1), psi(u_2)
    let design = grids.design(1)?;
    let triples = evaluate_on_design(&design, 2, |y| {
        Ok([model.qoi(y, 0)?, model.qoi(y, 1)?, model.qoi(y, 2)?])
    })?;
    let q: Vec<f64> = (0..3)
        .map(|i| {
            let v: Vec<f64> = triples.iter().map(|t| t[i]).collect();
            pairwise_dot(design.quad_weights(), &v)
        })
        .collect();
    let d1 = q[1] - q[0];
    let d2 = q[2] - q[1];
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::Estimation(format!("zero pilot difference (d1 = {d1}, d2 = {d2})")));
    }
    let alpha = (d1 / d2).abs().ln() / eta.ln();
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Estimation(format!("estimated alpha = {alpha} is not positive")));
    }
    let beta = alpha;

    let grid_levels: Vec<usize> = (0..opts.grid_levels).collect();
    let (errors, scale) = interpolation_errors(
        model,
        grids,
        &[0, 1],
        &grid_levels,
        opts.reference_grid_level,
        beta,
        opts.relative,
    )?;
    let (c, mu) = fit_interpolation_rate(
        &errors.iter().map(|e| e.points).collect::<Vec<_>>(),
        &errors.iter().map(|e| e.scaled).collect::<Vec<_>>(),
    )?;

    let h1 = h0 / eta;
    let c_s = d1.abs() / (h1.powf(alpha) * (eta.powf(alpha) - 1.0)) / scale;
    let constants = RateConstants {
        alpha,
        c_s,
        beta,
        mu,
        c,
        gamma: model.spatial_dim() as f64,
        c_c: 1.0,
        eta,
        h0,
        qoi_scale: opts.relative.then_some(scale),
    };
    constants.validate()?;
    if let Some(w) = constants.hypothesis_warning() {
        log::warn!("{w}");
    }
    Ok(PilotReport {
        constants,
        differences: [d1, d2],
        errors,
        scale,
    })
}

/// Empirical stand-in for the analyticity constant of the level-`level`
/// difference: the largest `|psi(u_k) - psi(u_{k-1})|` over `probes`
/// uniformly drawn parameters.
pub fn zeta_proxy(model: &dyn Model, level: usize, probes: usize, seed: u64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for i in 0..probes {
        let y = sample_point(seed, level, i, model.param_dim());
        best = best.max(level_difference(model, &y, level)?.abs());
    }
    Ok(best)
}

/// `|Q[psi(u_K) - psi(u_{K-1})]| <= (eta^alpha - 1) eps / 2`.
pub fn convergence_test(finest_difference: f64, rc: &RateConstants, eps: f64) -> bool {
    finest_difference.abs() <= (rc.eta.powf(rc.alpha) - 1.0) * eps / 2.0
}
