//! Small dense real-symmetric kernels.
//!
//! Everything here is written for matrices of order 3 and 9, where a cyclic
//! Jacobi eigensolver is exact to a few ulps and fully deterministic. These
//! routines are the numeric reference that every closed-form expression in
//! the crate is checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm, relative to the input norm, at which the
/// Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in `[-EIG_CLAMP, 0)` of a PSD matrix are treated as zero.
pub const EIG_CLAMP: f64 = 1e-12;

/// Probabilities below this are exact zeros inside logarithms.
pub const PROB_ZERO: f64 = 1e-14;

/// Dense real symmetric matrix, row-major.
///
/// Every constructor keeps `entries[i][j] == entries[j][i]` bit-for-bit;
/// the only mutator, [`SymMatrix::set`], writes both halves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix from the upper triangle of `f(i, j)` (`i <= j`),
    /// mirroring it into the lower triangle.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Row-major construction; rejects inputs that are not exactly symmetric.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Symmetric part `(a + aᵀ)/2` of an arbitrary square row-major array.
    pub fn symmetrized(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::invalid("symmetrized: wrong number of entries"));
        }
        Ok(Self::from_upper_fn(dim, |i, j| {
            0.5 * (data[i * dim + j] + data[j * dim + i])
        }))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Largest elementwise absolute difference. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mat_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Dense product `self · other` (generally not symmetric), row-major.
    pub fn mat_mul(&self, other: &SymMatrix) -> Vec<f64> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        mat_mul(&self.data, &other.data, self.dim)
    }

    /// `trace(M²)`; for a density matrix this is the purity.
    pub fn trace_of_square(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// Row-major square product.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Max-abs entry of the commutator `[a, b]`.
pub fn commutator_max_abs(a: &SymMatrix, b: &SymMatrix) -> f64 {
    let ab = a.mat_mul(b);
    let ba = b.mat_mul(a);
    ab.iter()
        .zip(&ba)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Eigenvalues sorted ascending, with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        SymMatrix::from_upper_fn(n, |i, j| {
            self.vectors
                .iter()
                .zip(&weights)
                .map(|(v, w)| w * v[i] * v[j])
                .sum()
        })
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn symmetric_eig(m: &SymMatrix) -> Result<EigenSystem> {
    if !m.is_finite() {
        return Err(Error::invalid("symmetric_eig: non-finite matrix entry"));
    }
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * scale;
    let mut converged = scale == 0.0;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, n, p, q, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > threshold {
        return Err(Error::numeric(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|row| v[row * n + k]).collect())
        .collect();
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// `A ← Jᵀ A J`, `V ← V J` for the plane rotation in (p, q).
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    // annihilated analytically
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

/// Transposes the first tensor factor of a `dim_a ⊗ dim_b` operator.
///
/// Output entry `(a·d_b + b, a'·d_b + b')` is input entry
/// `(a'·d_b + b, a·d_b + b')`.
pub fn partial_transpose_a(m: &SymMatrix, dim_a: usize, dim_b: usize) -> Result<SymMatrix> {
    if dim_a == 0 || dim_b == 0 || m.dim != dim_a * dim_b {
        return Err(Error::invalid(format!(
            "partial transpose: matrix of order {} is not {dim_a}x{dim_b}",
            m.dim
        )));
    }
    let idx = |a: usize, b: usize| a * dim_b + b;
    let mut out = SymMatrix::zeros(m.dim);
    for a in 0..dim_a {
        for b in 0..dim_b {
            for a2 in 0..dim_a {
                for b2 in 0..dim_b {
                    out.data[idx(a, b) * m.dim + idx(a2, b2)] = m.get(idx(a2, b), idx(a, b2));
                }
            }
        }
    }
    Ok(out)
}

/// `Σ |λᵢ|`.
pub fn trace_norm(m: &SymMatrix) -> Result<f64> {
    Ok(symmetric_eig(m)?.values.iter().map(|l| l.abs()).sum())
}

/// Shannon entropy in bits with `0·log 0 = 0`.
///
/// Entries down to `-1e-12` are clamped to zero; the total must be 1 within
/// `1e-9`.
pub fn shannon_entropy_bits(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::invalid("empty probability vector"));
    }
    let mut total = 0.0;
    for &x in p {
        if !x.is_finite() || x < -EIG_CLAMP {
            return Err(Error::invalid(format!("invalid probability {x}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(entropy_terms(p))
}

/// `-Σ p log₂ p` without validation; entries below [`PROB_ZERO`] contribute 0.
pub(crate) fn entropy_terms(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > PROB_ZERO)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Von Neumann entropy (bits) of a density matrix from its spectrum.
pub fn von_neumann_entropy_bits(rho: &SymMatrix) -> Result<f64> {
    let eig = symmetric_eig(rho)?;
    let clamped: Vec<f64> = eig.values.iter().map(|&l| clamp_psd(l)).collect();
    shannon_entropy_bits(&clamped)
}

#[inline]
pub(crate) fn clamp_psd(x: f64) -> f64 {
    if (-EIG_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// `V · diag(f(λ)) · Vᵀ`.
pub fn spectral_map(m: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = symmetric_eig(m)?;
    for &l in &eig.values {
        let y = f(l);
        if !y.is_finite() {
            return Err(Error::numeric(format!(
                "spectral map is not finite at eigenvalue {l}"
            )));
        }
    }
    Ok(eig.reconstruct_with(f))
}
