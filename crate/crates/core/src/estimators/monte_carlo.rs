use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::grid_family::CostModel;
use super::model::{level_difference, Model};
use super::report::{EstimateReport, LevelReport};
use crate::summation::pairwise_sum;
use crate::{Error, Result};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Uniform point in `[-1, 1]^dim` for stream `(seed, level)` and sample
/// `index`; independent of evaluation order.
pub fn sample_point(seed: u64, level: usize, index: usize, dim: usize) -> Vec<f64> {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ level as u64) ^ index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn draw(
    model: &dyn Model,
    level: usize,
    range: std::ops::Range<usize>,
    seed: u64,
    f: impl Fn(&[f64]) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    range
        .into_par_iter()
        .map(|i| {
            let y = sample_point(seed, level, i, model.param_dim());
            f(&y).map_err(|e| Error::Sample {
                level,
                sample: i,
                source: Box::new(e),
            })
        })
        .collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, pairwise_sum(&dev) / (n - 1.0))
}

/// Plain Monte Carlo with `m` samples on mesh level `level`.
pub fn mc_estimate(
    model: &dyn Model,
    level: usize,
    m: usize,
    seed: u64,
    cost: &CostModel,
) -> Result<EstimateReport> {
    if m == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let start = Instant::now();
    let values = draw(model, level, 0..m, seed, |y| model.qoi(y, level))?;
    let (mean, var) = mean_var(&values);
    let c = cost.cost(model.mesh_width(level));
    Ok(EstimateReport {
        method: "mc".into(),
        value: mean,
        per_level: vec![LevelReport {
            k: level,
            grid_level: None,
            points: m as u64,
            contribution: mean,
            model_cost: m as f64 * c,
            solves: m as u64,
            variance: Some(var),
        }],
        total_model_cost: m as f64 * c,
        total_solve_count: m as u64,
        solve_cost: m as f64 * c,
        wall_time: start.elapsed().as_secs_f64(),
        relative_error: None,
        finest_difference: None,
        std_error: Some((var / m as f64).sqrt()),
        seed: Some(seed),
    })
}

/// How MLMC chooses its per-level sample counts.
#[derive(Clone, Debug, PartialEq)]
pub enum MlmcSamples {
    /// Explicit counts for levels `0..=K`.
    Counts(Vec<usize>),
    /// Variance-optimal counts `M_k ~ sqrt(V_k / C_k)` for a root mean square
    /// error `eps / sqrt(2)` from the statistical part, using `pilot`
    /// samples per level to estimate `V_k`.
    Target { eps: f64, k: usize, pilot: usize },
}

/// Multilevel Monte Carlo with independent streams per level.
pub fn mlmc_estimate(model: &dyn Model, samples: &MlmcSamples, seed: u64, cost: &CostModel) -> Result<EstimateReport> {
    let start = Instant::now();
    let (k_max, mut values, counts) = match samples {
        MlmcSamples::Counts(c) => {
            if c.is_empty() || c.contains(&0) {
                return Err(Error::invalid("every MLMC level needs at least one sample"));
            }
            (c.len() - 1, vec![Vec::new(); c.len()], c.clone())
        }
        MlmcSamples::Target { eps, k, pilot } => {
            if *pilot < 2 {
                return Err(Error::Estimation("pilot variance needs at least 2 samples per level".into()));
            }
            if !(*eps > 0.0) {
                return Err(Error::invalid("MLMC target must be positive"));
            }
            let mut values = Vec::with_capacity(k + 1);
            let mut weights = Vec::with_capacity(k + 1);
            for level in 0..=*k {
                let v = draw(model, level, 0..*pilot, seed, |y| level_difference(model, y, level))?;
                let (_, var) = mean_var(&v);
                weights.push((var, cost.cost(model.mesh_width(level))));
                values.push(v);
            }
            let total: f64 = weights.iter().map(|(v, c)| (v * c).sqrt()).sum();
            let counts = weights
                .iter()
                .map(|(v, c)| {
                    let m = 2.0 / (eps * eps) * (v / c).sqrt() * total;
                    (m.ceil() as usize).max(*pilot)
                })
                .collect();
            (*k, values, counts)
        }
    };

    let mut per_level = Vec::with_capacity(k_max + 1);
    let mut means = Vec::with_capacity(k_max + 1);
    let mut var_sum = 0.0;
    let mut solve_cost = 0.0;
    let mut model_cost = 0.0;
    let mut solves = 0u64;
    for level in 0..=k_max {
        let have = values[level].len();
        if counts[level] > have {
            let more = draw(model, level, have..counts[level], seed, |y| level_difference(model, y, level))?;
            values[level].extend(more);
        }
        let (mean, var) = mean_var(&values[level]);
        let m = values[level].len();
        let c = cost.cost(model.mesh_width(level));
        let cprev = if level > 0 { cost.cost(model.mesh_width(level - 1)) } else { 0.0 };
        let level_solves = if level > 0 { 2 * m } else { m } as u64;
        solves += level_solves;
        solve_cost += m as f64 * (c + cprev);
        model_cost += m as f64 * c;
        var_sum += var / m as f64;
        means.push(mean);
        per_level.push(LevelReport {
            k: level,
            grid_level: None,
            points: m as u64,
            contribution: mean,
            model_cost: m as f64 * c,
            solves: level_solves,
            variance: Some(var),
        });
    }
    Ok(EstimateReport {
        method: "mlmc".into(),
        value: pairwise_sum(&means),
        per_level,
        total_model_cost: model_cost,
        total_solve_count: solves,
        solve_cost,
        wall_time: start.elapsed().as_secs_f64(),
        relative_error: None,
        finest_difference: None,
        std_error: Some(var_sum.sqrt()),
        seed: Some(seed),
    })
}
