//! P1 finite elements on nested uniform meshes of the unit interval and the
//! unit square, and the quantities of interest evaluated on their solutions.

mod functional;
mod linalg;
mod mesh;
mod problem;

pub use functional::{l2_norm_squared, point_value, Functional};
pub use linalg::{mg_pcg, thomas, BandedCholesky, Multigrid, Stencil2D};
pub use mesh::{MeshHierarchy, NodalField, UniformMesh};
pub use problem::{EllipticProblem, FemSolution, SolverKind};
