//! One-dimensional Clenshaw-Curtis rules.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GridKind;

/// Map from a 1D level `l >= 1` to the number of abscissas `p(l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Growth {
    /// `p(l) = l`.
    Linear,
    /// `p(1) = 1`, `p(l) = 2^(l-1) + 1`; yields nested Clenshaw-Curtis abscissas.
    Doubling,
}

impl Growth {
    pub fn points(self, level: usize) -> usize {
        assert!(level >= 1, "1D levels start at 1");
        match self {
            Growth::Linear => level,
            Growth::Doubling if level == 1 => 1,
            Growth::Doubling => (1usize << (level - 1)) + 1,
        }
    }

    /// Whether level `l` abscissas are a subset of level `l + 1` abscissas.
    pub fn is_nested(self) -> bool {
        matches!(self, Growth::Doubling)
    }
}

/// Number of points `p(l)` used by the given index-set kind at 1D level `level`.
pub fn growth(level: usize, kind: GridKind) -> usize {
    kind.growth().points(level)
}

/// Canonical label of a Clenshaw-Curtis abscissa: `-cos(pi * num / den)` with
/// `num / den` in lowest terms. Identical labels always produce bit-identical
/// coordinates, which is what point deduplication relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeLabel {
    pub num: u32,
    pub den: u32,
}

impl NodeLabel {
    fn new(num: u32, den: u32) -> Self {
        let g = gcd(num, den);
        NodeLabel {
            num: num / g,
            den: den / g,
        }
    }

    /// Coordinate of the node. Symmetric by construction: `x(1 - t) == -x(t)`
    /// exactly and the midpoint is exactly zero.
    pub fn coordinate(self) -> f64 {
        let (num, den) = (self.num as u64, self.den as u64);
        if 2 * num == den {
            0.0
        } else if 2 * num > den {
            -NodeLabel::new(self.den - self.num, self.den).coordinate()
        } else {
            -(PI * num as f64 / den as f64).cos()
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Abscissas and quadrature weights of one 1D interpolation level.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimRule {
    pub level: usize,
    pub point_count: usize,
    pub abscissas: Vec<f64>,
    /// Weights for the uniform density 1/2 on [-1, 1]; they sum to one.
    pub quad_weights: Vec<f64>,
    pub(crate) labels: Vec<NodeLabel>,
}

impl OneDimRule {
    /// Barycentric weights of the rule (Chebyshev-extrema closed form).
    pub(crate) fn barycentric_weights(&self) -> Vec<f64> {
        let p = self.point_count;
        if p == 1 {
            return vec![1.0];
        }
        (0..p)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == p - 1 {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect()
    }

    /// Values of the Lagrange fundamental polynomials at `y`.
    pub fn lagrange_basis(&self, y: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.point_count];
        self.lagrange_basis_into(y, &self.barycentric_weights(), &mut out);
        out
    }

    pub(crate) fn lagrange_basis_into(&self, y: f64, bary: &[f64], out: &mut [f64]) {
        if self.point_count == 1 {
            out[0] = 1.0;
            return;
        }
        if let Some(hit) = self.abscissas.iter().position(|&x| x == y) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[hit] = 1.0;
            return;
        }
        let mut denom = 0.0;
        for ((o, &x), &w) in out.iter_mut().zip(&self.abscissas).zip(bary) {
            *o = w / (y - x);
            denom += *o;
        }
        out.iter_mut().for_each(|v| *v /= denom);
    }
}

/// Clenshaw-Curtis rule at `level` with the point count given by `growth`.
///
/// Abscissas are `y_j = -cos(pi (j-1) / (p-1))`, `j = 1..p` (the single point 0
/// when `p = 1`). Weights integrate polynomials of degree `p - 1` exactly against
/// the uniform density on [-1, 1].
pub fn cc_abscissas(level: usize, growth: Growth) -> OneDimRule {
    assert!(level >= 1, "1D levels start at 1");
    let p = growth.points(level);
    if p == 1 {
        return OneDimRule {
            level,
            point_count: 1,
            abscissas: vec![0.0],
            quad_weights: vec![1.0],
            labels: vec![NodeLabel::new(1, 2)],
        };
    }
    let n = (p - 1) as u32;
    let labels: Vec<NodeLabel> = (0..p as u32).map(|j| NodeLabel::new(j, n)).collect();
    let abscissas: Vec<f64> = labels.iter().map(|l| l.coordinate()).collect();

    // Closed-form weights for the Chebyshev extrema:
    //   w_j = c_j / n * (1 - sum_{k=1}^{n/2} b_k / (4k^2 - 1) cos(2 k theta_j)),
    // c_j = 1 at the ends and 2 inside, b_k = 1 when 2k = n and 2 otherwise.
    // These sum to 2 (length of [-1, 1]); halve for the uniform density.
    let nn = n as usize;
    let mut quad_weights = vec![0.0; p];
    for j in 0..=nn / 2 {
        let mut s = 0.0;
        for k in 1..=nn / 2 {
            let b = if 2 * k == nn { 1.0 } else { 2.0 };
            let angle = NodeLabel::new((2 * k * j % (2 * nn)) as u32, nn as u32);
            // cos(2 k theta_j) = cos(pi * 2kj / n) = -coordinate(2kj mod 2n / n) folded
            s += b / (4.0 * (k * k) as f64 - 1.0) * cos_pi_fraction(angle);
        }
        let c = if j == 0 || j == nn { 1.0 } else { 2.0 };
        let w = 0.5 * c / nn as f64 * (1.0 - s);
        quad_weights[j] = w;
        quad_weights[nn - j] = w;
    }
    OneDimRule {
        level,
        point_count: p,
        abscissas,
        quad_weights,
        labels,
    }
}

/// `cos(pi * num / den)` for `num / den` in `[0, 2)`.
fn cos_pi_fraction(frac: NodeLabel) -> f64 {
    let (num, den) = (frac.num, frac.den);
    if num <= den {
        -NodeLabel { num, den }.coordinate()
    } else {
        // cos(pi (2 - t)) = cos(pi t)
        -NodeLabel::new(2 * den - num, den).coordinate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smolyak_growth_values() {
        assert_eq!(growth(1, GridKind::Smolyak), 1);
        assert_eq!(growth(4, GridKind::Smolyak), 9);
        assert_eq!(growth(4, GridKind::TotalDegree), 4);
        assert_eq!(growth(3, GridKind::HyperbolicCross), 3);
    }

    #[test]
    fn first_levels() {
        assert_eq!(cc_abscissas(1, Growth::Doubling).abscissas, vec![0.0]);
        assert_eq!(cc_abscissas(2, Growth::Doubling).abscissas, vec![-1.0, 0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let l3 = cc_abscissas(3, Growth::Doubling).abscissas;
        let expect = [-1.0, -h, 0.0, h, 1.0];
        for (a, b) in l3.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn simpson_weights_at_level_two() {
        let r = cc_abscissas(2, Growth::Doubling);
        let w = r.quad_weights;
        assert!((w[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[2] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_symmetric_sorted_and_normalised() {
        for growth in [Growth::Linear, Growth::Doubling] {
            for level in 1..=7 {
                let r = cc_abscissas(level, growth);
                assert_eq!(r.point_count, growth.points(level));
                let p = r.point_count;
                for j in 0..p {
                    assert_eq!(r.abscissas[j], -r.abscissas[p - 1 - j]);
                    assert!(r.abscissas[j].abs() <= 1.0);
                    if j > 0 {
                        assert!(r.abscissas[j] > r.abscissas[j - 1]);
                    }
                }
                let s: f64 = r.quad_weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-14, "level {level}: sum {s}");
            }
        }
    }

    #[test]
    fn weights_integrate_polynomials_exactly() {
        // Oracle: moments of the uniform density, E[y^k] = 1/(k+1) for even k.
        for growth in [Growth::Linear, Growth::Doubling] {
            for level in 1..=6 {
                let r = cc_abscissas(level, growth);
                for k in 0..r.point_count {
                    let q: f64 = r
                        .abscissas
                        .iter()
                        .zip(&r.quad_weights)
                        .map(|(x, w)| w * x.powi(k as i32))
                        .sum();
                    let exact = if k % 2 == 0 { 1.0 / (k as f64 + 1.0) } else { 0.0 };
                    assert!((q - exact).abs() < 1e-13, "level {level} degree {k}: {q}");
                }
            }
        }
    }

    #[test]
    fn doubling_rules_are_nested_bitwise() {
        for level in 1..7 {
            let coarse = cc_abscissas(level, Growth::Doubling);
            let fine = cc_abscissas(level + 1, Growth::Doubling);
            for x in &coarse.abscissas {
                assert!(fine.abscissas.iter().any(|y| y.to_bits() == x.to_bits()));
            }
        }
    }

    #[test]
    fn lagrange_basis_is_cardinal_and_sums_to_one() {
        let r = cc_abscissas(4, Growth::Doubling);
        for (i, &x) in r.abscissas.iter().enumerate() {
            let b = r.lagrange_basis(x);
            for (j, v) in b.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
        let b = r.lagrange_basis(0.3141);
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
