use sprs::{CsMat, TriMat};

use super::mesh::TriMesh;
use super::SpectralError;
use crate::Point;

pub type ElementMatrix = [[f64; 3]; 3];

/// Element stiffness and consistent mass matrices of the P1 triangle
/// `(a, b, c)`, which must be counterclockwise.
pub fn element_matrices(
    a: Point,
    b: Point,
    c: Point,
) -> Result<(ElementMatrix, ElementMatrix), SpectralError> {
    let p = [a, b, c];
    let area = 0.5 * ((b - a).re * (c - a).im - (b - a).im * (c - a).re);
    if !(area > 0.0) {
        return Err(SpectralError::DegenerateTriangle { index: 0, area });
    }
    // ∇φ_i = (y_j − y_k, x_k − x_j) / 2A with (i, j, k) cyclic
    let g: Vec<(f64, f64)> = (0..3)
        .map(|i| {
            let (pj, pk) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            (pj.im - pk.im, pk.re - pj.re)
        })
        .collect();
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (g[i].0 * g[j].0 + g[i].1 * g[j].1) / (4.0 * area);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    Ok((k, m))
}

/// Assembled stiffness `K` and mass `M` on the free (non-Dirichlet)
/// vertices.
#[derive(Debug, Clone)]
pub struct FemSystem {
    pub k: CsMat<f64>,
    pub m: CsMat<f64>,
    /// Mesh vertex of each free unknown.
    pub free_to_vertex: Vec<usize>,
    /// Unknown of each mesh vertex, `None` on Dirichlet vertices.
    pub vertex_to_free: Vec<Option<usize>>,
}

impl FemSystem {
    pub fn size(&self) -> usize {
        self.free_to_vertex.len()
    }

    /// Scatters free values to a full nodal vector, zero on Dirichlet
    /// vertices.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.vertex_to_free
            .iter()
            .map(|f| f.map_or(0.0, |i| x[i]))
            .collect()
    }
}

/// Assembles the P1 system; Dirichlet vertices are eliminated and the
/// Neumann condition is natural.
pub fn assemble(mesh: &TriMesh) -> Result<FemSystem, SpectralError> {
    let dirichlet = mesh.dirichlet_vertices();
    let mut vertex_to_free = vec![None; dirichlet.len()];
    let mut free_to_vertex = Vec::new();
    for (v, d) in dirichlet.iter().enumerate() {
        if !d {
            vertex_to_free[v] = Some(free_to_vertex.len());
            free_to_vertex.push(v);
        }
    }
    let n = free_to_vertex.len();
    if n == 0 {
        return Err(SpectralError::InvalidMesh(
            "every vertex is Dirichlet".to_string(),
        ));
    }
    let cap = 9 * mesh.triangles().len();
    let mut kt = TriMat::with_capacity((n, n), cap);
    let mut mt = TriMat::with_capacity((n, n), cap);
    let vs = mesh.vertices();
    for (ti, t) in mesh.triangles().iter().enumerate() {
        let (ke, me) = element_matrices(vs[t[0]], vs[t[1]], vs[t[2]]).map_err(|e| match e {
            SpectralError::DegenerateTriangle { area, .. } => {
                SpectralError::DegenerateTriangle { index: ti, area }
            }
            other => other,
        })?;
        for i in 0..3 {
            let Some(fi) = vertex_to_free[t[i]] else { continue };
            for j in 0..3 {
                let Some(fj) = vertex_to_free[t[j]] else { continue };
                kt.add_triplet(fi, fj, ke[i][j]);
                mt.add_triplet(fi, fj, me[i][j]);
            }
        }
    }
    Ok(FemSystem {
        k: kt.to_csr(),
        m: mt.to_csr(),
        free_to_vertex,
        vertex_to_free,
    })
}

pub(crate) fn matvec(a: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    for (i, row) in a.outer_iterator().enumerate() {
        let mut s = 0.0;
        for (j, v) in row.iter() {
            s += v * x[j];
        }
        y[i] = s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DirichletPart, MixedDomain};
    use crate::spectral::mesh::{mesh_domain, EdgeTag};

    #[test]
    fn reference_triangle() {
        let (k, m) =
            element_matrices(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        for row in &k {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
        assert_eq!(k[0], [1.0, -0.5, -0.5]);
        let total: f64 = m.iter().flatten().sum();
        assert!((total - 0.5).abs() < 1e-15);
        assert!(element_matrices(Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn mass_total_is_mesh_area_and_k_is_symmetric() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let mesh = mesh_domain(&d, 0.1).unwrap().retagged(EdgeTag::Neumann);
        let sys = assemble(&mesh).unwrap();
        assert_eq!(sys.size(), mesh.vertices().len());
        let total: f64 = sys.m.data().iter().sum();
        assert!((total - mesh.area()).abs() < 1e-10);
        // constants lie in the kernel of the pure Neumann stiffness
        let ones = vec![1.0; sys.size()];
        let mut y = vec![0.0; sys.size()];
        matvec(&sys.k, &ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
        let kt = sys.k.transpose_view().to_csr();
        for (i, row) in sys.k.outer_iterator().enumerate() {
            for (j, v) in row.iter() {
                assert!((kt.get(i, j).copied().unwrap_or(0.0) - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dirichlet_vertices_are_eliminated() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let mesh = mesh_domain(&d, 0.1).unwrap();
        let sys = assemble(&mesh).unwrap();
        let dir = mesh.dirichlet_vertices();
        assert_eq!(sys.size(), dir.iter().filter(|d| !**d).count());
        let full = sys.expand(&vec![1.0; sys.size()]);
        for (v, d) in dir.iter().enumerate() {
            assert_eq!(full[v], if *d { 0.0 } else { 1.0 });
        }
    }
}
