use serde::{Deserialize, Serialize};
use sprs::CsMat;

use super::fem::{matvec, FemSystem};
use super::SpectralError;

/// Envelope (skyline) Cholesky factor of a symmetric positive definite
/// matrix under a reverse Cuthill–McKee ordering.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    /// `order[new] = old`.
    order: Vec<usize>,
    /// First stored column of each row of `L`.
    first: Vec<usize>,
    /// Start of each row in `values`; row `i` holds columns `first[i]..=i`.
    start: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn new(a: &CsMat<f64>) -> Result<Self, SpectralError> {
        let n = a.rows();
        let a = if a.is_csr() { a.clone() } else { a.to_csr() };
        let order: Vec<usize> = sprs::linalg::reverse_cuthill_mckee(a.view()).perm.vec();
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old_i, row) in a.outer_iterator().enumerate() {
            let i = pos[old_i];
            for (old_j, _) in row.iter() {
                let j = pos[old_j];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut len = 0;
        for i in 0..n {
            start.push(len);
            len += i - first[i] + 1;
        }
        start.push(len);
        let mut values = vec![0.0; len];
        for (old_i, row) in a.outer_iterator().enumerate() {
            let i = pos[old_i];
            for (old_j, &v) in row.iter() {
                let j = pos[old_j];
                if j <= i {
                    values[start[i] + j - first[i]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (ri, rj) = (start[i], start[j]);
                let mut s = values[ri + j - fi];
                for k in lo..j {
                    s -= values[ri + k - fi] * values[rj + k - fj];
                }
                if j < i {
                    values[ri + j - fi] = s / values[rj + j - fj];
                } else {
                    if !(s > 0.0) {
                        return Err(SpectralError::Factorization(format!(
                            "pivot {s:.3e} at row {i}: matrix is not positive definite"
                        )));
                    }
                    values[ri + i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self {
            order,
            first,
            start,
            values,
        })
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    /// Stored entries of `L`.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.size();
        let mut y: Vec<f64> = self.order.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let (fi, ri) = (self.first[i], self.start[i]);
            let mut s = y[i];
            for k in fi..i {
                s -= self.values[ri + k - fi] * y[k];
            }
            y[i] = s / self.values[ri + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, ri) = (self.first[i], self.start[i]);
            y[i] /= self.values[ri + i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= self.values[ri + k - fi] * yi;
            }
        }
        for (new, &old) in self.order.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

/// The mixed ground state: `ψ₁` is a full nodal vector, zero on Dirichlet
/// vertices, normalized to `ψᵀMψ = 1` with its largest entry positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub mu1: f64,
    pub psi1: Vec<f64>,
    /// `‖Kx − μMx‖ / ‖x‖` on the free unknowns.
    pub residual: f64,
    /// Second eigenvalue from the same subspace iteration.
    pub mu2: Option<f64>,
    pub iterations: usize,
}

/// Default residual tolerance of [`smallest_eigenpair`].
pub const EIGEN_TOL: f64 = 1e-8;
pub const MAX_EIGEN_ITERATIONS: usize = 500;
const BLOCK: usize = 4;

/// Smallest generalized eigenpairs of `K x = μ M x` by shift-invert
/// subspace iteration from shift 0 with a deterministic start block
/// (all-ones first).
pub fn smallest_eigenpair(
    system: &FemSystem,
    mesh_points: &[crate::Point],
    tol: f64,
) -> Result<EigenPair, SpectralError> {
    let n = system.size();
    let p = BLOCK.min(n);
    let chol = EnvelopeCholesky::new(&system.k)?;
    let coords: Vec<crate::Point> = system.free_to_vertex.iter().map(|&v| mesh_points[v]).collect();
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|c| {
            coords
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    // low-discrepancy jitter keeps the block independent
                    let jitter = ((i * (c + 1)) as f64 * 0.618_033_988_749_894_9).fract() - 0.5;
                    match c {
                        0 => 1.0,
                        1 => z.re + 0.1 * jitter,
                        2 => z.im + 0.1 * jitter,
                        _ => z.re * z.im + jitter,
                    }
                })
                .collect()
        })
        .collect();
    let mut tmp = vec![0.0; n];
    let mut prev_mu2 = f64::NAN;
    let mut history = (f64::NAN, f64::NAN);
    for it in 1..=MAX_EIGEN_ITERATIONS {
        // Y = K⁻¹ M X
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|xc| {
                let mut v = vec![0.0; n];
                matvec(&system.m, xc, &mut v);
                chol.solve(&mut v);
                v
            })
            .collect();
        let ky: Vec<Vec<f64>> = y
            .iter()
            .map(|v| {
                let mut w = vec![0.0; n];
                matvec(&system.k, v, &mut w);
                w
            })
            .collect();
        let my: Vec<Vec<f64>> = y
            .iter()
            .map(|v| {
                let mut w = vec![0.0; n];
                matvec(&system.m, v, &mut w);
                w
            })
            .collect();
        let mut kr = vec![vec![0.0; p]; p];
        let mut mr = vec![vec![0.0; p]; p];
        for a in 0..p {
            for b in 0..p {
                kr[a][b] = dot(&y[a], &ky[b]);
                mr[a][b] = dot(&y[a], &my[b]);
            }
        }
        let (lambda, vecs) = small_generalized_eigen(&kr, &mr)?;
        x = (0..p)
            .map(|c| {
                let mut v = vec![0.0; n];
                for (b, yb) in y.iter().enumerate() {
                    let w = vecs[b][c];
                    for (vi, yi) in v.iter_mut().zip(yb) {
                        *vi += w * yi;
                    }
                }
                v
            })
            .collect();
        // residual of the leading Ritz pair
        let x0 = &x[0];
        matvec(&system.k, x0, &mut tmp);
        let mut mx = vec![0.0; n];
        matvec(&system.m, x0, &mut mx);
        let mu = lambda[0];
        let r = tmp
            .iter()
            .zip(&mx)
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / dot(x0, x0).sqrt();
        let mu2 = lambda.get(1).copied();
        let mu2_settled = mu2.is_none_or(|m| (m - prev_mu2).abs() <= 1e-10 * m);
        prev_mu2 = mu2.unwrap_or(f64::NAN);
        history = (mu, r);
        if r < tol && mu2_settled {
            let mut psi = system.expand(x0);
            let (imax, imin) = psi.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), v| {
                (a.max(*v), b.min(*v))
            });
            if imax < -imin {
                psi.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok(EigenPair {
                mu1: mu,
                psi1: psi,
                residual: r,
                mu2,
                iterations: it,
            });
        }
    }
    Err(SpectralError::NonConvergence {
        iterations: MAX_EIGEN_ITERATIONS,
        mu: history.0,
        residual: history.1,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the dense symmetric-definite problem `K v = λ M v`; eigenvalues
/// ascend and eigenvectors (columns of the result) are `M`-orthonormal.
fn small_generalized_eigen(
    k: &[Vec<f64>],
    m: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectralError> {
    let p = k.len();
    // M = L Lᵀ
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = m[i][j];
            for q in 0..j {
                s -= l[i][q] * l[j][q];
            }
            if i == j {
                if !(s > 1e-300) {
                    return Err(SpectralError::Factorization("Ritz basis collapsed".to_string()));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // C = L⁻¹ K L⁻ᵀ
    let linv = lower_inverse(&l);
    let mut c = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for a in 0..p {
                for b in 0..p {
                    s += linv[i][a] * k[a][b] * linv[j][b];
                }
            }
            c[i][j] = s;
        }
    }
    let (vals, q) = jacobi_eigen(c);
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let lambda = idx.iter().map(|&i| vals[i]).collect();
    // v = L⁻ᵀ q
    let mut v = vec![vec![0.0; p]; p];
    for (col, &src) in idx.iter().enumerate() {
        for r in 0..p {
            v[r][col] = (0..p).map(|a| linv[a][r] * q[a][src]).sum();
        }
    }
    Ok((lambda, v))
}

fn lower_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = l.len();
    let mut inv = vec![vec![0.0; p]; p];
    for j in 0..p {
        inv[j][j] = 1.0 / l[j][j];
        for i in j + 1..p {
            let s: f64 = (j..i).map(|q| l[i][q] * inv[q][j]).sum();
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

/// Cyclic Jacobi rotations; returns eigenvalues and eigenvectors as the
/// columns of the second result.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = a.len();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..p)
            .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..p).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag {
            break;
        }
        for r in 0..p {
            for s in r + 1..p {
                if a[r][s].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[s][s] - a[r][r]) / (2.0 * a[r][s]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..p {
                    let (akr, aks) = (a[k][r], a[k][s]);
                    a[k][r] = c * akr - sn * aks;
                    a[k][s] = sn * akr + c * aks;
                }
                for k in 0..p {
                    let (ark, ask) = (a[r][k], a[s][k]);
                    a[r][k] = c * ark - sn * ask;
                    a[s][k] = sn * ark + c * ask;
                }
                for k in 0..p {
                    let (vkr, vks) = (v[k][r], v[k][s]);
                    v[k][r] = c * vkr - sn * vks;
                    v[k][s] = sn * vkr + c * vks;
                }
            }
        }
    }
    ((0..p).map(|i| a[i][i]).collect(), v)
}
