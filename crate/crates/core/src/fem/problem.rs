use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::functional::Functional;
use super::linalg::{mg_pcg, thomas, BandedCholesky, Multigrid, Stencil2D};
use super::mesh::{MeshHierarchy, NodalField, UniformMesh};
use crate::random_field::{Coefficient, CoefficientTable};
use crate::summation::pairwise_dot;
use crate::{Error, Result};

/// How 2D systems are solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Banded Cholesky on small meshes, multigrid-preconditioned CG otherwise.
    #[default]
    Auto,
    Direct,
    Multigrid,
}

/// Largest 2D mesh (cells per side) factored directly under [`SolverKind::Auto`].
const DIRECT_MAX_CELLS: usize = 16;
const RESIDUAL_TOL: f64 = 1e-12;

/// Galerkin P1 solution on one level of the hierarchy.
#[derive(Clone, Debug)]
pub struct FemSolution {
    pub level: usize,
    pub field: NodalField,
    /// `a(u, u) = (f, u)`.
    pub energy: f64,
}

/// `-div(a(y, x) grad u) = f` on the unit interval or square with `u = 0` on
/// the boundary and constant forcing `f`.
pub struct EllipticProblem {
    coefficient: Arc<dyn Coefficient>,
    hierarchy: MeshHierarchy,
    forcing: f64,
    solver: SolverKind,
    tables: Mutex<HashMap<usize, Arc<CoefficientTable>>>,
}

impl std::fmt::Debug for EllipticProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EllipticProblem")
            .field("coefficient", &self.coefficient.fingerprint())
            .field("hierarchy", &self.hierarchy)
            .field("forcing", &self.forcing)
            .finish()
    }
}

impl EllipticProblem {
    pub fn new(coefficient: Arc<dyn Coefficient>, hierarchy: MeshHierarchy) -> Result<Self> {
        if coefficient.spatial_dim() != hierarchy.spatial_dim {
            return Err(Error::DimensionMismatch {
                expected: hierarchy.spatial_dim,
                got: coefficient.spatial_dim(),
            });
        }
        Ok(EllipticProblem {
            coefficient,
            hierarchy,
            forcing: 1.0,
            solver: SolverKind::Auto,
            tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_forcing(mut self, f: f64) -> Self {
        self.forcing = f;
        self
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn hierarchy(&self) -> &MeshHierarchy {
        &self.hierarchy
    }

    pub fn coefficient(&self) -> &dyn Coefficient {
        self.coefficient.as_ref()
    }

    pub fn param_dim(&self) -> usize {
        self.coefficient.param_dim()
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "{}|d={}|h0={:e}|eta={}|f={:e}",
            self.coefficient.fingerprint(),
            self.hierarchy.spatial_dim,
            self.hierarchy.h0,
            self.hierarchy.eta,
            self.forcing
        )
    }

    fn table(&self, level: usize) -> Arc<CoefficientTable> {
        let mut cache = self.tables.lock().unwrap_or_else(|e| e.into_inner());
        cache
            .entry(level)
            .or_insert_with(|| {
                let centres = self.hierarchy.mesh(level).element_centres();
                Arc::new(self.coefficient.tabulate(&centres))
            })
            .clone()
    }

    /// Element coefficients of level `level` at parameter `y`.
    pub fn element_coefficients(&self, y: &[f64], level: usize) -> Result<Vec<f64>> {
        let a = self.table(level).eval(y)?;
        if let Some((element, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveCoefficient { value, element });
        }
        Ok(a)
    }

    pub fn solve(&self, y: &[f64], level: usize) -> Result<FemSolution> {
        let mesh = self.hierarchy.mesh(level);
        let a = self.element_coefficients(y, level)?;
        let (field, energy) = match mesh.dim {
            1 => solve_1d(mesh, &a, self.forcing)?,
            _ => solve_2d(mesh, &a, self.forcing, self.solver)?,
        };
        Ok(FemSolution {
            level,
            field,
            energy,
        })
    }

    /// `psi(u_k(y)) - psi(u_{k-1}(y))`, with `u_{-1} = 0`.
    pub fn level_difference_sample(&self, y: &[f64], level: usize, psi: &Functional) -> Result<f64> {
        let fine = psi.eval(&self.solve(y, level)?.field)?;
        if level == 0 {
            return Ok(fine);
        }
        Ok(fine - psi.eval(&self.solve(y, level - 1)?.field)?)
    }
}

/// Normwise relative residual `||r|| / (||A|| ||u|| + ||b||)`; measuring
/// against `||b||` alone would sit below round-off on fine meshes.
fn check_residual(residual: f64, a_norm: f64, u: &[f64], b: &[f64]) -> Result<()> {
    let scale = a_norm * pairwise_dot(u, u).sqrt() + pairwise_dot(b, b).sqrt();
    if scale > 0.0 && !(residual <= RESIDUAL_TOL * scale) {
        return Err(Error::SolverFailure(format!(
            "relative residual {:e} exceeds {RESIDUAL_TOL:e}",
            residual / scale
        )));
    }
    Ok(())
}

fn solve_1d(mesh: UniformMesh, a: &[f64], f: f64) -> Result<(NodalField, f64)> {
    let n = mesh.n;
    let h = mesh.h();
    let diag: Vec<f64> = (1..n).map(|i| (a[i - 1] + a[i]) / h).collect();
    let off: Vec<f64> = (1..n - 1).map(|i| -a[i] / h).collect();
    let b = vec![f * h; n - 1];
    let mut x = b.clone();
    thomas(&diag, &off, &mut x)?;

    let mut r2 = 0.0;
    for i in 0..n - 1 {
        let mut ax = diag[i] * x[i];
        if i > 0 {
            ax += off[i - 1] * x[i - 1];
        }
        if i + 1 < n - 1 {
            ax += off[i] * x[i + 1];
        }
        r2 += (ax - b[i]) * (ax - b[i]);
    }
    let a_norm = diag.iter().fold(0.0f64, |m, &d| m.max(d)) * 2.0;
    check_residual(r2.sqrt(), a_norm, &x, &b)?;

    let energy = pairwise_dot(&b, &x);
    let mut values = vec![0.0; n + 1];
    values[1..n].copy_from_slice(&x);
    Ok((NodalField { mesh, values }, energy))
}

fn solve_2d(mesh: UniformMesh, a: &[f64], f: f64, solver: SolverKind) -> Result<(NodalField, f64)> {
    let n = mesh.n;
    let s = n + 1;
    let h = mesh.h();
    let op = Stencil2D::from_triangles(n, a);
    let mut b = vec![0.0; s * s];
    for i in 1..n {
        for j in 1..n {
            b[i * s + j] = f * h * h;
        }
    }
    let mut u = vec![0.0; s * s];
    let direct = match solver {
        SolverKind::Direct => true,
        SolverKind::Multigrid => false,
        SolverKind::Auto => n <= DIRECT_MAX_CELLS,
    };
    if direct {
        BandedCholesky::factor(&op)?.solve(&b, &mut u);
    } else {
        let mg = Multigrid::new(n, a)?;
        mg_pcg(&op, &mg, &b, &mut u, 0.1 * RESIDUAL_TOL)?;
    }
    let mut au = vec![0.0; s * s];
    op.apply(&u, &mut au);
    let r2: f64 = au.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    check_residual(r2.sqrt(), op.norm_bound(), &u, &b)?;
    let energy = pairwise_dot(&b, &u);
    Ok((NodalField { mesh, values: u }, energy))
}
