use serde::{Deserialize, Serialize};

use super::mesh::{NodalField, UniformMesh};
use crate::{Error, Result};

/// Scalar quantities of interest `psi(u)` of a P1 solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Functional {
    /// `u(x)`.
    PointValue { x: Vec<f64> },
    /// Mean of `u` over the six triangles of the reference mesh (width
    /// `reference_width`) that share the node closest to `center`.
    LocalAverage { reference_width: f64, center: Vec<f64> },
    L2NormSquared,
    L2Norm,
    /// `inner(u)^q` for a linear inner functional.
    PowerOfLinear { inner: Box<Functional>, q: u32 },
}

impl Functional {
    pub fn is_linear(&self) -> bool {
        matches!(self, Functional::PointValue { .. } | Functional::LocalAverage { .. })
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Functional::PointValue { x } => {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: x.len(),
                    });
                }
                if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(Error::OutsideDomain { point: x.clone() });
                }
            }
            Functional::LocalAverage {
                reference_width,
                center,
            } => {
                if dim != 2 || center.len() != 2 {
                    return Err(Error::invalid("local averages are defined on the unit square"));
                }
                let node = reference_node(*reference_width, center)?;
                let n = (1.0 / reference_width).round() as usize;
                if node.0 == 0 || node.1 == 0 || node.0 >= n || node.1 >= n {
                    return Err(Error::invalid("local average node must be interior"));
                }
            }
            Functional::PowerOfLinear { inner, q } => {
                if !inner.is_linear() {
                    return Err(Error::invalid("power functionals need a linear inner functional"));
                }
                if *q == 0 {
                    return Err(Error::invalid("power must be a positive integer"));
                }
                inner.validate(dim)?;
            }
            Functional::L2NormSquared | Functional::L2Norm => {}
        }
        Ok(())
    }

    pub fn eval(&self, u: &NodalField) -> Result<f64> {
        self.validate(u.mesh.dim)?;
        Ok(match self {
            Functional::PointValue { x } => point_value(u, x),
            Functional::LocalAverage {
                reference_width,
                center,
            } => local_average(u, *reference_width, center)?,
            Functional::L2NormSquared => l2_norm_squared(u),
            Functional::L2Norm => l2_norm_squared(u).sqrt(),
            Functional::PowerOfLinear { inner, q } => inner.eval(u)?.powi(*q as i32),
        })
    }
}

fn reference_node(width: f64, center: &[f64]) -> Result<(usize, usize)> {
    let n = (1.0 / width).round();
    if !(width > 0.0) || (n * width - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("reference width {width} is not 1/n")));
    }
    if center.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::OutsideDomain { point: center.to_vec() });
    }
    Ok(((center[0] * n).round() as usize, (center[1] * n).round() as usize))
}

/// Exact evaluation of the piecewise-linear interpolant at `x`.
pub fn point_value(u: &NodalField, x: &[f64]) -> f64 {
    let mesh = u.mesh;
    let n = mesh.n;
    let locate = |c: f64| {
        let s = c * n as f64;
        let cell = (s.floor() as usize).min(n - 1);
        (cell, s - cell as f64)
    };
    match mesh.dim {
        1 => {
            let (i, t) = locate(x[0]);
            u.values[i] * (1.0 - t) + u.values[i + 1] * t
        }
        _ => {
            let (i, s) = locate(x[0]);
            let (j, t) = locate(x[1]);
            let v = |a: usize, b: usize| u.values[mesh.node(i + a, j + b)];
            if s >= t {
                v(0, 0) * (1.0 - s) + v(1, 0) * (s - t) + v(1, 1) * t
            } else {
                v(0, 0) * (1.0 - t) + v(1, 1) * s + v(0, 1) * (t - s)
            }
        }
    }
}

/// Vertices of triangle `upper` (`false` = T1, `true` = T2) of cell `(i, j)`
/// in grid units.
fn triangle(i: usize, j: usize, upper: bool) -> [(usize, usize); 3] {
    if upper {
        [(i, j), (i + 1, j + 1), (i, j + 1)]
    } else {
        [(i, j), (i + 1, j), (i + 1, j + 1)]
    }
}

/// Exact integral of `u` over triangle `upper` of cell `(ci, cj)` on the mesh
/// with `rn` cells per side. Meshes are nested, so the triangle lies in one
/// triangle of a coarser solution mesh (where `u` is linear and the centroid
/// rule is exact) or is tiled by triangles of a finer one.
fn integrate_triangle(u: &NodalField, rn: usize, ci: usize, cj: usize, upper: bool) -> f64 {
    let n = u.mesh.n;
    let area = 0.5 / (rn * rn) as f64;
    if n <= rn {
        let c = triangle(ci, cj, upper).iter().fold([0.0; 2], |acc, &(a, b)| {
            [acc[0] + a as f64 / (3 * rn) as f64, acc[1] + b as f64 / (3 * rn) as f64]
        });
        return area * point_value(u, &c);
    }
    let r = n / rn;
    let fine_area = 0.5 / (n * n) as f64;
    let mut total = 0.0;
    for a in 0..r {
        for b in 0..r {
            let (i, j) = (ci * r + a, cj * r + b);
            for fine_upper in [false, true] {
                // fine centroid relative to the reference cell decides membership
                let (ds, dt) = if fine_upper { (1.0 / 3.0, 2.0 / 3.0) } else { (2.0 / 3.0, 1.0 / 3.0) };
                let s = (a as f64 + ds) / r as f64;
                let t = (b as f64 + dt) / r as f64;
                if (t > s) != upper {
                    continue;
                }
                let sum: f64 = triangle(i, j, fine_upper)
                    .iter()
                    .map(|&(x, y)| u.values[u.mesh.node(x, y)])
                    .sum();
                total += fine_area * sum / 3.0;
            }
        }
    }
    total
}

fn local_average(u: &NodalField, width: f64, center: &[f64]) -> Result<f64> {
    let (ni, nj) = reference_node(width, center)?;
    let rn = (1.0 / width).round() as usize;
    let n = u.mesh.n;
    if n > rn && n % rn != 0 || n < rn && rn % n != 0 {
        return Err(Error::invalid(format!(
            "reference mesh 1/{rn} and solution mesh 1/{n} are not nested"
        )));
    }
    let patch = [
        (ni - 1, nj - 1, false),
        (ni - 1, nj - 1, true),
        (ni, nj - 1, true),
        (ni - 1, nj, false),
        (ni, nj, false),
        (ni, nj, true),
    ];
    let integral: f64 = patch
        .iter()
        .map(|&(i, j, up)| integrate_triangle(u, rn, i, j, up))
        .sum();
    Ok(integral / (3.0 / (rn * rn) as f64))
}

/// Exact `||u||^2_{L^2}` from the P1 element mass matrices.
pub fn l2_norm_squared(u: &NodalField) -> f64 {
    let mesh: UniformMesh = u.mesh;
    let h = mesh.h();
    let n = mesh.n;
    let v = &u.values;
    match mesh.dim {
        1 => {
            let terms: Vec<f64> = (0..n)
                .map(|i| v[i] * v[i] + v[i] * v[i + 1] + v[i + 1] * v[i + 1])
                .collect();
            h / 3.0 * crate::summation::pairwise_sum(&terms)
        }
        _ => {
            let mut terms = Vec::with_capacity(2 * n * n);
            for i in 0..n {
                for j in 0..n {
                    for up in [false, true] {
                        let [a, b, c] = triangle(i, j, up).map(|(x, y)| v[mesh.node(x, y)]);
                        terms.push(a * a + b * b + c * c + a * b + b * c + a * c);
                    }
                }
            }
            h * h / 12.0 * crate::summation::pairwise_sum(&terms)
        }
    }
}
