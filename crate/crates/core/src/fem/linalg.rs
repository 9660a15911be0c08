//! Stiffness operators and linear solvers for the uniform P1 meshes.
//!
//! In 2D the hypotenuse couplings of the right triangles vanish, so the P1
//! stiffness matrix is a five-point operator with one weight per mesh edge.

use crate::{Error, Result};

/// Solve a symmetric tridiagonal system in place (`diag`, `off` of length
/// `len - 1`, right-hand side overwritten by the solution).
pub fn thomas(diag: &[f64], off: &[f64], rhs: &mut [f64]) -> Result<()> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = diag[0];
    if !(d > 0.0) {
        return Err(Error::SolverFailure("zero pivot in tridiagonal solve".into()));
    }
    rhs[0] /= d;
    for i in 1..m {
        c[i - 1] = off[i - 1] / d;
        d = diag[i] - off[i - 1] * c[i - 1];
        if !(d > 0.0) {
            return Err(Error::SolverFailure("zero pivot in tridiagonal solve".into()));
        }
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / d;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Five-point operator on the `(n+1)^2` node grid with homogeneous
/// Dirichlet rows removed. Vectors are full node arrays with zero boundary.
#[derive(Clone, Debug)]
pub struct Stencil2D {
    pub n: usize,
    /// Weight of edge `(i,j)-(i+1,j)`, indexed `i (n+1) + j`.
    wx: Vec<f64>,
    /// Weight of edge `(i,j)-(i,j+1)`, indexed `i (n+1) + j`.
    wy: Vec<f64>,
    diag: Vec<f64>,
}

impl Stencil2D {
    /// Bound on the operator norm: every row sums to twice its diagonal.
    pub fn norm_bound(&self) -> f64 {
        2.0 * self.diag.iter().fold(0.0f64, |m, &d| m.max(d))
    }

    /// Assemble from one coefficient per triangle (`2 (i n + j)` is `T1` of
    /// cell `(i, j)`, the next entry its `T2`).
    pub fn from_triangles(n: usize, a: &[f64]) -> Self {
        let s = n + 1;
        let t1 = |i: usize, j: usize| a[2 * (i * n + j)];
        let t2 = |i: usize, j: usize| a[2 * (i * n + j) + 1];
        let mut wx = vec![0.0; s * s];
        let mut wy = vec![0.0; s * s];
        for i in 0..=n {
            for j in 0..=n {
                if i < n {
                    let below = if j < n { t1(i, j) } else { 0.0 };
                    let above = if j > 0 { t2(i, j - 1) } else { 0.0 };
                    wx[i * s + j] = 0.5 * (below + above);
                }
                if j < n {
                    let right = if i < n { t2(i, j) } else { 0.0 };
                    let left = if i > 0 { t1(i - 1, j) } else { 0.0 };
                    wy[i * s + j] = 0.5 * (right + left);
                }
            }
        }
        let mut diag = vec![0.0; s * s];
        for i in 1..n {
            for j in 1..n {
                let k = i * s + j;
                diag[k] = wx[k] + wx[k - s] + wy[k] + wy[k - 1];
            }
        }
        Stencil2D { n, wx, wy, diag }
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let s = self.n + 1;
        for i in 1..self.n {
            for j in 1..self.n {
                let k = i * s + j;
                out[k] = self.diag[k] * u[k]
                    - self.wx[k] * u[k + s]
                    - self.wx[k - s] * u[k - s]
                    - self.wy[k] * u[k + 1]
                    - self.wy[k - 1] * u[k - 1];
            }
        }
    }

    /// Interior-ordered dense matrix (small meshes only).
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let m = self.n - 1;
        let s = self.n + 1;
        let idx = |i: usize, j: usize| (i - 1) * m + (j - 1);
        let mut a = vec![vec![0.0; m * m]; m * m];
        for i in 1..self.n {
            for j in 1..self.n {
                let k = i * s + j;
                let p = idx(i, j);
                a[p][p] = self.diag[k];
                if i + 1 < self.n {
                    a[p][idx(i + 1, j)] = -self.wx[k];
                }
                if i > 1 {
                    a[p][idx(i - 1, j)] = -self.wx[k - s];
                }
                if j + 1 < self.n {
                    a[p][idx(i, j + 1)] = -self.wy[k];
                }
                if j > 1 {
                    a[p][idx(i, j - 1)] = -self.wy[k - 1];
                }
            }
        }
        a
    }

    fn gauss_seidel(&self, u: &mut [f64], b: &[f64], forward: bool) {
        let s = self.n + 1;
        let mut relax = |i: usize, j: usize| {
            let k = i * s + j;
            let off = self.wx[k] * u[k + s]
                + self.wx[k - s] * u[k - s]
                + self.wy[k] * u[k + 1]
                + self.wy[k - 1] * u[k - 1];
            u[k] = (b[k] + off) / self.diag[k];
        };
        if forward {
            for i in 1..self.n {
                for j in 1..self.n {
                    relax(i, j);
                }
            }
        } else {
            for i in (1..self.n).rev() {
                for j in (1..self.n).rev() {
                    relax(i, j);
                }
            }
        }
    }
}

/// Banded Cholesky factor of a [`Stencil2D`] with interior ordering; the
/// half-bandwidth is `n - 1`.
#[derive(Clone, Debug)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// `band[p * (bw + 1) + d] = L(p, p - d)`.
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(op: &Stencil2D) -> Result<Self> {
        let n = op.n;
        let m = n - 1;
        let size = m * m;
        let bw = m;
        let w = bw + 1;
        let s = n + 1;
        let mut band = vec![0.0; size * w];
        for i in 1..n {
            for j in 1..n {
                let p = (i - 1) * m + (j - 1);
                let k = i * s + j;
                band[p * w] = op.diag[k];
                if j > 1 {
                    band[p * w + 1] = -op.wy[k - 1];
                }
                if i > 1 {
                    band[p * w + bw] = -op.wx[k - s];
                }
            }
        }
        for p in 0..size {
            let lo = p.saturating_sub(bw);
            for q in lo..p {
                let mut v = band[p * w + (p - q)];
                for k in lo.max(q.saturating_sub(bw))..q {
                    v -= band[p * w + (p - k)] * band[q * w + (q - k)];
                }
                band[p * w + (p - q)] = v / band[q * w];
            }
            let mut v = band[p * w];
            for k in lo..p {
                let l = band[p * w + (p - k)];
                v -= l * l;
            }
            if !(v > 0.0) {
                return Err(Error::SolverFailure("matrix is not positive definite".into()));
            }
            band[p * w] = v.sqrt();
        }
        Ok(BandedCholesky { n, bw, band })
    }

    /// Solve with full node arrays (boundary entries ignored and zeroed).
    pub fn solve(&self, b: &[f64], u: &mut [f64]) {
        let m = self.n - 1;
        let s = self.n + 1;
        let w = self.bw + 1;
        let mut x: Vec<f64> = (1..self.n)
            .flat_map(|i| (1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| b[i * s + j])
            .collect();
        let size = x.len();
        for p in 0..size {
            let lo = p.saturating_sub(self.bw);
            let mut v = x[p];
            for k in lo..p {
                v -= self.band[p * w + (p - k)] * x[k];
            }
            x[p] = v / self.band[p * w];
        }
        for p in (0..size).rev() {
            x[p] /= self.band[p * w];
            let lo = p.saturating_sub(self.bw);
            let xp = x[p];
            for k in lo..p {
                x[k] -= self.band[p * w + (p - k)] * xp;
            }
        }
        u.iter_mut().for_each(|v| *v = 0.0);
        for i in 1..self.n {
            for j in 1..self.n {
                u[i * s + j] = x[(i - 1) * m + (j - 1)];
            }
        }
    }
}

/// Geometric multigrid V-cycle used as a CG preconditioner. Coarse operators
/// are rediscretizations with each coarse triangle carrying the mean of the
/// four fine triangles it contains.
pub struct Multigrid {
    levels: Vec<Stencil2D>,
    coarse: BandedCholesky,
}

const COARSEST_CELLS: usize = 8;

impl Multigrid {
    pub fn new(n: usize, triangles: &[f64]) -> Result<Self> {
        let mut levels = vec![Stencil2D::from_triangles(n, triangles)];
        let mut a = triangles.to_vec();
        let mut cn = n;
        while cn % 2 == 0 && cn > COARSEST_CELLS {
            a = coarsen_triangles(cn, &a);
            cn /= 2;
            levels.push(Stencil2D::from_triangles(cn, &a));
        }
        let coarse = BandedCholesky::factor(levels.last().unwrap())?;
        Ok(Multigrid { levels, coarse })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn vcycle(&self, level: usize, b: &[f64], u: &mut [f64]) {
        if level + 1 == self.levels.len() {
            self.coarse.solve(b, u);
            return;
        }
        let op = &self.levels[level];
        let size = (op.n + 1) * (op.n + 1);
        u.iter_mut().for_each(|v| *v = 0.0);
        op.gauss_seidel(u, b, true);
        let mut r = vec![0.0; size];
        op.apply(u, &mut r);
        for i in 1..op.n {
            for j in 1..op.n {
                let k = i * (op.n + 1) + j;
                r[k] = b[k] - r[k];
            }
        }
        let cn = op.n / 2;
        let mut rc = vec![0.0; (cn + 1) * (cn + 1)];
        restrict(op.n, &r, &mut rc);
        let mut ec = vec![0.0; rc.len()];
        self.vcycle(level + 1, &rc, &mut ec);
        prolong_add(op.n, &ec, u);
        op.gauss_seidel(u, b, false);
    }
}

/// Coarse triangle coefficients as means of their four fine children.
fn coarsen_triangles(n: usize, a: &[f64]) -> Vec<f64> {
    let cn = n / 2;
    let t1 = |i: usize, j: usize| a[2 * (i * n + j)];
    let t2 = |i: usize, j: usize| a[2 * (i * n + j) + 1];
    let mut out = vec![0.0; 2 * cn * cn];
    for ci in 0..cn {
        for cj in 0..cn {
            let (i, j) = (2 * ci, 2 * cj);
            out[2 * (ci * cn + cj)] =
                0.25 * (t1(i, j) + t1(i + 1, j) + t1(i + 1, j + 1) + t2(i + 1, j));
            out[2 * (ci * cn + cj) + 1] =
                0.25 * (t2(i, j) + t2(i, j + 1) + t2(i + 1, j + 1) + t1(i, j + 1));
        }
    }
    out
}

/// P1 interpolation weights from the coarse grid (`n/2` cells) at fine node
/// `(i, j)`; odd-odd nodes sit on a coarse diagonal.
fn coarse_parents(i: usize, j: usize) -> [(usize, usize, f64); 2] {
    match (i % 2, j % 2) {
        (0, 0) => [(i / 2, j / 2, 1.0), (i / 2, j / 2, 0.0)],
        (1, 0) => [(i / 2, j / 2, 0.5), (i / 2 + 1, j / 2, 0.5)],
        (0, 1) => [(i / 2, j / 2, 0.5), (i / 2, j / 2 + 1, 0.5)],
        _ => [(i / 2, j / 2, 0.5), (i / 2 + 1, j / 2 + 1, 0.5)],
    }
}

fn restrict(n: usize, r: &[f64], rc: &mut [f64]) {
    let cs = n / 2 + 1;
    rc.iter_mut().for_each(|v| *v = 0.0);
    for i in 1..n {
        for j in 1..n {
            let v = r[i * (n + 1) + j];
            for (ci, cj, w) in coarse_parents(i, j) {
                rc[ci * cs + cj] += w * v;
            }
        }
    }
    // keep coarse boundary rows at zero
    let cn = n / 2;
    for k in 0..=cn {
        rc[k] = 0.0;
        rc[cn * cs + k] = 0.0;
        rc[k * cs] = 0.0;
        rc[k * cs + cn] = 0.0;
    }
}

fn prolong_add(n: usize, ec: &[f64], u: &mut [f64]) {
    let cs = n / 2 + 1;
    for i in 1..n {
        for j in 1..n {
            let mut v = 0.0;
            for (ci, cj, w) in coarse_parents(i, j) {
                v += w * ec[ci * cs + cj];
            }
            u[i * (n + 1) + j] += v;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::summation::pairwise_dot(a, b)
}

/// Preconditioned conjugate gradients with a multigrid V-cycle; stops when
/// the residual drops below `rel_tol ||b||`.
pub fn mg_pcg(op: &Stencil2D, mg: &Multigrid, b: &[f64], u: &mut [f64], rel_tol: f64) -> Result<usize> {
    let size = b.len();
    let bnorm = dot(b, b).sqrt();
    u.iter_mut().for_each(|v| *v = 0.0);
    if bnorm == 0.0 {
        return Ok(0);
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; size];
    mg.vcycle(0, &r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; size];
    for it in 1..=200 {
        op.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..size {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            return Ok(it);
        }
        mg.vcycle(0, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..size {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::SolverFailure("preconditioned CG did not converge in 200 iterations".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(n: usize) -> Vec<f64> {
        (0..2 * n * n).map(|e| 1.0 + 0.9 * ((e as f64) * 0.37).sin().abs()).collect()
    }

    fn rhs(n: usize) -> Vec<f64> {
        let s = n + 1;
        let mut b = vec![0.0; s * s];
        for i in 1..n {
            for j in 1..n {
                b[i * s + j] = ((i * 7 + j * 3) % 5) as f64 - 1.5;
            }
        }
        b
    }

    fn residual(op: &Stencil2D, u: &[f64], b: &[f64]) -> f64 {
        let mut au = vec![0.0; b.len()];
        op.apply(u, &mut au);
        let r: f64 = au.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        r.sqrt() / dot(b, b).sqrt()
    }

    #[test]
    fn thomas_solves_poisson() {
        let m = 9;
        let mut rhs = vec![1.0; m];
        thomas(&vec![2.0; m], &vec![-1.0; m - 1], &mut rhs).unwrap();
        for (i, v) in rhs.iter().enumerate() {
            let x = (i + 1) as f64;
            assert!((v - x * (10.0 - x) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stiffness_is_symmetric_positive_definite() {
        let op = Stencil2D::from_triangles(5, &field(5));
        let a = op.dense();
        for p in 0..a.len() {
            for q in 0..a.len() {
                assert_eq!(a[p][q], a[q][p]);
            }
            assert!(a[p][p] > 0.0);
        }
        assert!(BandedCholesky::factor(&op).is_ok());
    }

    #[test]
    fn constant_coefficient_gives_the_laplacian_stencil() {
        let op = Stencil2D::from_triangles(4, &vec![1.0; 32]);
        let a = op.dense();
        assert_eq!(a[4][4], 4.0);
        assert_eq!(a[4][1], -1.0);
        assert_eq!(a[4][3], -1.0);
        assert_eq!(a[4][0], 0.0);
    }

    #[test]
    fn banded_cholesky_matches_dense_apply() {
        let n = 7;
        let op = Stencil2D::from_triangles(n, &field(n));
        let b = rhs(n);
        let mut u = vec![0.0; b.len()];
        BandedCholesky::factor(&op).unwrap().solve(&b, &mut u);
        assert!(residual(&op, &u, &b) < 1e-14);
    }

    #[test]
    fn multigrid_cg_converges_fast() {
        for n in [16, 64, 128] {
            let op = Stencil2D::from_triangles(n, &field(n));
            let mg = Multigrid::new(n, &field(n)).unwrap();
            let b = rhs(n);
            let mut u = vec![0.0; b.len()];
            let its = mg_pcg(&op, &mg, &b, &mut u, 1e-13).unwrap();
            assert!(its < 30, "n={n}: {its} iterations");
            assert!(residual(&op, &u, &b) < 1e-12);
        }
    }

    #[test]
    fn multigrid_agrees_with_direct() {
        let n = 32;
        let op = Stencil2D::from_triangles(n, &field(n));
        let b = rhs(n);
        let mut direct = vec![0.0; b.len()];
        BandedCholesky::factor(&op).unwrap().solve(&b, &mut direct);
        let mut iter = vec![0.0; b.len()];
        mg_pcg(&op, &Multigrid::new(n, &field(n)).unwrap(), &b, &mut iter, 1e-14).unwrap();
        for (a, b) in direct.iter().zip(&iter) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
