//! Order-stable floating point accumulation.

const BLOCK: usize = 32;

/// Pairwise (cascade) summation. Error grows like `O(log n)` instead of `O(n)`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `sum_i weights[i] * values[i]` with pairwise accumulation of the products.
pub fn pairwise_dot(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    if weights.len() <= BLOCK {
        return weights.iter().zip(values).map(|(w, v)| w * v).sum();
    }
    let mid = weights.len() / 2;
    pairwise_dot(&weights[..mid], &values[..mid]) + pairwise_dot(&weights[mid..], &values[mid..])
}

/// Ordinary least squares fit `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
