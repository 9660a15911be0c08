//! Karhunen-Loève eigenpairs of `C(x, x') = exp(-|x - x'|_1)` on the unit
//! interval and the unit square.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pole-free form of `tan(w) = 2w / (w^2 - 1)`: `sin(w)(w^2 - 1) - 2w cos(w)`.
fn secular(w: f64) -> f64 {
    w.sin() * (w * w - 1.0) - 2.0 * w * w.cos()
}

/// Number of sign probes per window used to certify a single crossing.
const PROBES_PER_WINDOW: usize = 256;

/// The `count` smallest positive roots of `tan(w) = 2w / (w^2 - 1)`.
///
/// Root `n` lives in the window `((n-1) pi, n pi)`; the secular function has
/// opposite signs at the window ends and the window is probed to make sure it
/// crosses zero exactly once before bisecting to machine precision.
pub fn solve_transcendental(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("need at least one root"));
    }
    (1..=count).map(window_root).collect()
}

fn window_root(n: usize) -> Result<f64> {
    let lo = if n == 1 { 1e-8 } else { (n - 1) as f64 * PI };
    let hi = n as f64 * PI;
    let (glo, ghi) = (secular(lo), secular(hi));
    if glo.signum() == ghi.signum() {
        return Err(Error::RootBracketing(format!(
            "no sign change in window {n}: g({lo}) = {glo}, g({hi}) = {ghi}"
        )));
    }
    let mut crossings = 0;
    let mut prev = glo;
    for i in 1..=PROBES_PER_WINDOW {
        let g = secular(lo + (hi - lo) * i as f64 / PROBES_PER_WINDOW as f64);
        if g.signum() != prev.signum() {
            crossings += 1;
        }
        prev = g;
    }
    if crossings != 1 {
        return Err(Error::RootBracketing(format!(
            "window {n} shows {crossings} sign changes"
        )));
    }

    let (mut a, mut b) = (lo, hi);
    let sa = glo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if secular(mid).signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(if secular(a).abs() <= secular(b).abs() { a } else { b })
}

/// `A` such that `b(x) = A (sin(w x) + w cos(w x))` has unit `L^2(0,1)` norm,
/// from the closed-form antiderivative of `(sin(wx) + w cos(wx))^2`.
pub fn normalization_constant(w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::invalid(format!("root must be positive, got {w}")));
    }
    let s2 = (2.0 * w).sin();
    let sin = w.sin();
    let integral = 0.5 - s2 / (4.0 * w) + sin * sin + 0.5 * w * w + 0.25 * w * s2;
    Ok(1.0 / integral.sqrt())
}

/// Eigenvalue `lambda = 2 / (w^2 + 1)` associated with root `w`.
pub fn eigenvalue(w: f64) -> f64 {
    2.0 / (w * w + 1.0)
}

/// Truncated 1D expansion on `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLExpansion1D {
    #[serde(rename = "N")]
    pub n: usize,
    pub roots: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub norm_constants: Vec<f64>,
}

impl KLExpansion1D {
    pub fn new(n: usize) -> Result<Self> {
        let roots = solve_transcendental(n)?;
        let eigenvalues = roots.iter().map(|&w| eigenvalue(w)).collect();
        let norm_constants = roots
            .iter()
            .map(|&w| normalization_constant(w))
            .collect::<Result<_>>()?;
        Ok(KLExpansion1D {
            n,
            roots,
            eigenvalues,
            norm_constants,
        })
    }

    /// Eigenfunction `b_{i+1}` (zero-based `i`) at `x`.
    pub fn eigenfunction(&self, i: usize, x: f64) -> f64 {
        let w = self.roots[i];
        self.norm_constants[i] * ((w * x).sin() + w * (w * x).cos())
    }

    /// `max_{x in [0,1]} |b_{i+1}(x)|`, from the amplitude `A sqrt(1 + w^2)` when
    /// the extremum is interior, otherwise from the endpoint values.
    pub fn eigenfunction_sup(&self, i: usize) -> f64 {
        let w = self.roots[i];
        // critical points: tan(w x) = 1 / w
        let base = (1.0 / w).atan() / w;
        let period = PI / w;
        let mut best = self.eigenfunction(i, 0.0).abs().max(self.eigenfunction(i, 1.0).abs());
        let mut x = base;
        while x <= 1.0 {
            best = best.max(self.eigenfunction(i, x).abs());
            x += period;
        }
        best
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Truncated 2D expansion on `(0, 1)^2` built from products of 1D pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLExpansion2D {
    #[serde(rename = "N")]
    pub n: usize,
    /// Zero-based `(i, j)` pairs; eigenfunction `b_i(x_1) b_j(x_2)`.
    pub pairs: Vec<(usize, usize)>,
    pub eigenvalues: Vec<f64>,
    pub one_d: KLExpansion1D,
}

impl KLExpansion2D {
    pub fn eigenfunction(&self, k: usize, x: &[f64]) -> f64 {
        let (i, j) = self.pairs[k];
        self.one_d.eigenfunction(i, x[0]) * self.one_d.eigenfunction(j, x[1])
    }

    pub fn eigenfunction_sup(&self, k: usize) -> f64 {
        let (i, j) = self.pairs[k];
        self.one_d.eigenfunction_sup(i) * self.one_d.eigenfunction_sup(j)
    }
}

/// Default 1D pool used to certify the top `n` products.
pub fn default_pool_size(n: usize) -> usize {
    (2 * (n as f64).sqrt().ceil() as usize).max(10)
}

/// The `n` largest products `lambda_i lambda_j` over `(i, j)` in the pool,
/// sorted decreasingly with ties broken lexicographically by `(i, j)`.
///
/// The pool is certified when every excluded product, including those with
/// an index beyond the pool (bounded by `lambda_1 lambda_{pool+1}`), is no
/// larger than the smallest included one.
pub fn eigen_2d(n: usize, pool: usize) -> Result<KLExpansion2D> {
    if n == 0 || pool * pool < n {
        return Err(Error::invalid(format!("pool {pool} cannot hold {n} product pairs")));
    }
    let wide = KLExpansion1D::new(pool + 1)?;
    let lam = &wide.eigenvalues;
    let mut cands: Vec<(f64, usize, usize)> = (0..pool)
        .flat_map(|i| (0..pool).map(move |j| (i, j)))
        .map(|(i, j)| (lam[i] * lam[j], i, j))
        .collect();
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let smallest_kept = cands[n - 1].0;
    let excluded_in_pool = cands.get(n).map_or(0.0, |c| c.0);
    let outside = lam[0] * lam[pool];
    if excluded_in_pool > smallest_kept || outside > smallest_kept {
        return Err(Error::invalid(format!(
            "pool {pool} too small to certify the top {n} eigenpairs"
        )));
    }
    cands.truncate(n);
    let one_d = KLExpansion1D {
        n: pool,
        roots: wide.roots[..pool].to_vec(),
        eigenvalues: wide.eigenvalues[..pool].to_vec(),
        norm_constants: wide.norm_constants[..pool].to_vec(),
    };
    Ok(KLExpansion2D {
        n,
        pairs: cands.iter().map(|c| (c.1, c.2)).collect(),
        eigenvalues: cands.iter().map(|c| c.0).collect(),
        one_d,
    })
}
