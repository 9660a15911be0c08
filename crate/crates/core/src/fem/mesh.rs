use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform mesh of the unit interval or the unit square with `n` cells per
/// side. Square cells are split by the diagonal from bottom-left to top-right
/// into `T1 = (i,j),(i+1,j),(i+1,j+1)` and `T2 = (i,j),(i+1,j+1),(i,j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UniformMesh {
    pub dim: usize,
    pub n: usize,
}

impl UniformMesh {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::invalid(format!("spatial dimension must be 1 or 2, got {dim}")));
        }
        if n < 2 {
            return Err(Error::invalid("a mesh needs at least two cells per side"));
        }
        Ok(UniformMesh { dim, n })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        (self.n + 1).pow(self.dim as u32)
    }

    pub fn interior_count(&self) -> usize {
        (self.n - 1).pow(self.dim as u32)
    }

    pub fn element_count(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => 2 * self.n * self.n,
        }
    }

    /// Node `(i, j)` in lexicographic `(x, y)` order: `y` varies fastest.
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    /// Coefficient sampling points: element midpoints in 1D, triangle
    /// centroids in 2D (cell `(i, j)` holds elements `2(i n + j)` and `+1`).
    pub fn element_centres(&self) -> Vec<f64> {
        let h = self.h();
        match self.dim {
            1 => (0..self.n).map(|i| (i as f64 + 0.5) * h).collect(),
            _ => {
                let mut out = Vec::with_capacity(4 * self.n * self.n);
                for i in 0..self.n {
                    for j in 0..self.n {
                        let (x, y) = (i as f64, j as f64);
                        out.extend_from_slice(&[(x + 2.0 / 3.0) * h, (y + 1.0 / 3.0) * h]);
                        out.extend_from_slice(&[(x + 1.0 / 3.0) * h, (y + 2.0 / 3.0) * h]);
                    }
                }
                out
            }
        }
    }

    pub fn node_coordinates(&self, node: usize) -> Vec<f64> {
        let h = self.h();
        match self.dim {
            1 => vec![node as f64 * h],
            _ => vec![(node / (self.n + 1)) as f64 * h, (node % (self.n + 1)) as f64 * h],
        }
    }
}

/// Nested meshes with `h_k = h_0 eta^{-k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshHierarchy {
    pub spatial_dim: usize,
    pub h0: f64,
    pub eta: usize,
    n0: usize,
}

impl MeshHierarchy {
    pub fn new(spatial_dim: usize, h0: f64, eta: usize) -> Result<Self> {
        if !(spatial_dim == 1 || spatial_dim == 2) {
            return Err(Error::config("d", format!("must be 1 or 2, got {spatial_dim}")));
        }
        if eta < 2 {
            return Err(Error::config("eta", format!("refinement ratio must be an integer > 1, got {eta}")));
        }
        let n0 = (1.0 / h0).round();
        if !(h0 > 0.0) || n0 < 2.0 || (n0 * h0 - 1.0).abs() > 1e-12 {
            return Err(Error::config("h0", format!("must be 1/n for an integer n >= 2, got {h0}")));
        }
        Ok(MeshHierarchy {
            spatial_dim,
            h0,
            eta,
            n0: n0 as usize,
        })
    }

    pub fn cells(&self, level: usize) -> usize {
        self.n0 * self.eta.pow(level as u32)
    }

    pub fn h(&self, level: usize) -> f64 {
        1.0 / self.cells(level) as f64
    }

    pub fn mesh(&self, level: usize) -> UniformMesh {
        UniformMesh {
            dim: self.spatial_dim,
            n: self.cells(level),
        }
    }

    /// Level whose mesh width is `h`, if it belongs to the hierarchy.
    pub fn level_of(&self, h: f64) -> Result<usize> {
        (0..40)
            .find(|&k| (self.h(k) / h - 1.0).abs() < 1e-9)
            .ok_or_else(|| Error::invalid(format!("mesh width {h} is not in the hierarchy")))
    }
}

/// Nodal values of a P1 function on all nodes (boundary included).
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    pub mesh: UniformMesh,
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn zeros(mesh: UniformMesh) -> Self {
        NodalField {
            mesh,
            values: vec![0.0; mesh.node_count()],
        }
    }

    pub fn from_fn(mesh: UniformMesh, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..mesh.node_count())
            .map(|k| f(&mesh.node_coordinates(k)))
            .collect();
        NodalField { mesh, values }
    }

    /// Values at interior nodes, lexicographic order.
    pub fn interior(&self) -> Vec<f64> {
        let n = self.mesh.n;
        match self.mesh.dim {
            1 => self.values[1..n].to_vec(),
            _ => (1..n)
                .flat_map(|i| (1..n).map(move |j| (i, j)))
                .map(|(i, j)| self.values[self.mesh.node(i, j)])
                .collect(),
        }
    }

    /// Writes `x[,y],u` rows plus a JSON sidecar next to `path`.
    pub fn dump_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        match self.mesh.dim {
            1 => w.write_record(["x", "u"])?,
            _ => w.write_record(["x", "y", "u"])?,
        }
        for (k, v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self
                .mesh
                .node_coordinates(k)
                .iter()
                .map(|c| format!("{c:.17e}"))
                .collect();
            row.push(format!("{v:.17e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        let sidecar = serde_json::json!({
            "d": self.mesh.dim,
            "h": self.mesh.h(),
            "ordering": "lexicographic (x, y)",
        });
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hierarchy_widths_are_nested() {
        let m = MeshHierarchy::new(2, 0.25, 2).unwrap();
        assert_eq!(m.cells(6), 256);
        for k in 0..5 {
            assert_eq!(m.cells(k + 1), 2 * m.cells(k));
        }
        assert_eq!(m.level_of(1.0 / 256.0).unwrap(), 6);
        assert!(m.level_of(0.3).is_err());
    }

    #[test]
    fn bad_hierarchies_name_the_key() {
        let e = MeshHierarchy::new(1, 0.5, 1).unwrap_err();
        assert!(e.to_string().contains("eta"));
        let e = MeshHierarchy::new(1, 0.3, 2).unwrap_err();
        assert!(e.to_string().contains("h0"));
    }

    #[test]
    fn centroids_lie_in_their_triangles() {
        let mesh = UniformMesh::new(2, 3).unwrap();
        let c = mesh.element_centres();
        assert_eq!(c.len(), 2 * mesh.element_count());
        // T1 sits below the diagonal, T2 above it
        assert!(c[0] > c[1] && c[2] < c[3]);
    }

    #[test]
    fn dump_writes_csv_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let f = NodalField::from_fn(UniformMesh::new(2, 2).unwrap(), |x| x[0] + 10.0 * x[1]);
        f.dump_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 10);
        let side: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
        assert_eq!(side["d"], 2);
        assert_eq!(side["ordering"], "lexicographic (x, y)");
        // second row: x = 0, y = 0.5
        let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 0.5, 5.0]);
    }
}
