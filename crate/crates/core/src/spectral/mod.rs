//! P1 finite elements for the mixed Dirichlet–Neumann ground state: meshing,
//! assembly, the sparse eigensolver, hot-spot location, monotonicity along
//! curve families and closed-form Bessel references.
//!
//! The eigenproblem is `−Δψ = μψ` in `D`, `ψ = 0` on γ₂, `∂ψ/∂n = 0` on γ₁.

mod analysis;
mod fem;
mod mesh;
mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, MixedDomain};
use crate::Point;

pub use analysis::{
    expansion_crosscheck, hotspot_locate, monotonicity_along_curve, reference_eigen, CrossCheck, Hotspot,
    Monotonicity, ProbeDeviation, RayCurve, RayKind, ReferenceCase, ReferenceEigen,
};
pub use fem::{assemble, element_matrices, ElementMatrix, FemSystem};
pub use mesh::{mesh_domain, EdgeTag, NodalField, TriMesh, CORNER_REFINEMENT, REFINEMENT_ANGLE_DEG};
pub use solve::{smallest_eigenpair, EigenPair, EnvelopeCholesky, EIGEN_TOL, MAX_EIGEN_ITERATIONS};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectralError {
    #[error("meshing failed: {0}")]
    Meshing(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh text line {line}: {message}")]
    MeshFormat { line: usize, message: String },
    #[error("triangle {index} is degenerate (signed area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("eigensolver did not converge in {iterations} iterations (μ ≈ {mu}, residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        mu: f64,
        residual: f64,
    },
    #[error("unsupported reference case: {0}")]
    Unsupported(String),
    #[error("sample {0} lies outside the mesh")]
    SampleOutside(Point),
    #[error("spectral gap too small: exp(−(μ₂ − μ₁)t) = {factor:.3} ≥ 0.05")]
    SpectralGap { factor: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Ground-state summary written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub mu1: f64,
    pub residual: f64,
    pub argmax: [f64; 2],
    pub dist_to_gamma1: f64,
    pub h: f64,
}

impl EigenReport {
    pub fn new(pair: &EigenPair, hotspot: &Hotspot, mesh: &TriMesh) -> Self {
        Self {
            mu1: pair.mu1,
            residual: pair.residual,
            argmax: [hotspot.argmax.re, hotspot.argmax.im],
            dist_to_gamma1: hotspot.dist_to_gamma1,
            h: mesh.h(),
        }
    }
}

/// Meshes `domain` at size `h`, assembles and solves for the ground state.
pub fn ground_state(domain: &MixedDomain, h: f64) -> Result<(TriMesh, EigenPair), SpectralError> {
    let mesh = mesh_domain(domain, h)?;
    let system = assemble(&mesh)?;
    let pair = smallest_eigenpair(&system, mesh.vertices(), EIGEN_TOL)?;
    Ok((mesh, pair))
}
