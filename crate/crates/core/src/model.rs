//! Spin-1 dimer Hamiltonian and its closed-form spectrum.
//!
//! Two-site states are indexed `3·a + b` with site labels `a, b ∈ {0, 1, 2}`
//! standing for the magnetic quantum numbers `-1, 0, 1`, so the nine basis
//! vectors run `|-1,-1⟩, |-1,0⟩, …, |1,1⟩`.
//!
//! The single-site `Sᶻ` is represented as `diag(+1, 0, -1)` over that label
//! order. With this choice the Zeeman term `-h(S₁ᶻ + S₂ᶻ)` gives `|-1,-1⟩`
//! the energy `Δ + 2D - 2h`, which is what the closed-form thermal matrix
//! elements require. The spectrum is invariant under `h → -h`, so nothing
//! physical depends on the choice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Basis index of `|a, b⟩` for magnetic labels `a, b ∈ {-1, 0, 1}`.
#[inline]
pub const fn basis_index(a: i32, b: i32) -> usize {
    (3 * (a + 1) + (b + 1)) as usize
}

/// Couplings of the dimer Hamiltonian, all in the same energy unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// XY exchange `J` (`J_x = J_y = J`).
    pub j: f64,
    /// Easy-axis exchange anisotropy `Δ`.
    pub delta: f64,
    /// Uniaxial single-ion anisotropy `D`.
    pub d_ani: f64,
    /// Zeeman energy `h = g μ_B B`.
    pub h: f64,
}

impl ModelParams {
    pub fn new(j: f64, delta: f64, d_ani: f64, h: f64) -> Result<Self> {
        let p = ModelParams { j, delta, d_ani, h };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units of `J` (`j = 1`).
    pub fn reduced(delta: f64, d_ani: f64, h: f64) -> Result<Self> {
        Self::new(1.0, delta, d_ani, h)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("j", self.j),
            ("delta", self.delta),
            ("d_ani", self.d_ani),
            ("h", self.h),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.j == 0.0 {
            return Err(Error::unsupported(
                "j = 0 is not supported (Λ± is singular)",
            ));
        }
        if self.j < 0.0 {
            return Err(Error::invalid(format!(
                "j must be positive, got {}",
                self.j
            )));
        }
        Ok(())
    }

    /// Same couplings with the field reversed.
    pub fn with_field_reversed(&self) -> Self {
        ModelParams {
            h: -self.h,
            ..*self
        }
    }
}

pub type Mat3 = [[f64; 3]; 3];

/// Spin-1 operators over the label order `(|-1⟩, |0⟩, |1⟩)`.
///
/// `Sʸ` is purely imaginary; `sy_imag` holds `A` with `Sʸ = i·A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperators {
    pub sx: Mat3,
    pub sy_imag: Mat3,
    pub sz: Mat3,
}

impl SpinOperators {
    pub fn spin_one() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        SpinOperators {
            sx: [[0.0, r, 0.0], [r, 0.0, r], [0.0, r, 0.0]],
            sy_imag: [[0.0, -r, 0.0], [r, 0.0, -r], [0.0, r, 0.0]],
            sz: [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
        }
    }

    /// `(Sˣ)² + (Sʸ)² + (Sᶻ)²`, real because `(iA)² = -A²`.
    pub fn casimir(&self) -> Mat3 {
        let xx = mul3(&self.sx, &self.sx);
        let yy = mul3(&self.sy_imag, &self.sy_imag);
        let zz = mul3(&self.sz, &self.sz);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = xx[i][j] - yy[i][j] + zz[i][j];
            }
        }
        out
    }

    /// Coefficient of `i` in `[Sˣ, Sʸ]`, i.e. `SˣA - ASˣ`.
    pub fn commutator_xy_imag(&self) -> Mat3 {
        let a = mul3(&self.sx, &self.sy_imag);
        let b = mul3(&self.sy_imag, &self.sx);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][j] - b[i][j];
            }
        }
        out
    }
}

pub(crate) fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn kron(a: &Mat3, b: &Mat3) -> [[f64; 9]; 9] {
    let mut out = [[0.0; 9]; 9];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i / 3][j / 3] * b[i % 3][j % 3];
        }
    }
    out
}

/// `Ĥ = J(S₁ˣS₂ˣ + S₁ʸS₂ʸ) + Δ S₁ᶻS₂ᶻ + D[(S₁ᶻ)² + (S₂ᶻ)²] - h(S₁ᶻ + S₂ᶻ)`.
pub fn build_hamiltonian(p: &ModelParams) -> Result<SymMatrix> {
    p.validate()?;
    let s = SpinOperators::spin_one();
    let sz2 = mul3(&s.sz, &s.sz);
    let xx = kron(&s.sx, &s.sx);
    // Sʸ⊗Sʸ = (iA)⊗(iA) = -A⊗A
    let yy = kron(&s.sy_imag, &s.sy_imag);
    let zz = kron(&s.sz, &s.sz);
    let z2_1 = kron(&sz2, &IDENTITY3);
    let z2_2 = kron(&IDENTITY3, &sz2);
    let z_1 = kron(&s.sz, &IDENTITY3);
    let z_2 = kron(&IDENTITY3, &s.sz);

    let dense: Vec<f64> = (0..81)
        .map(|k| {
            let (i, j) = (k / 9, k % 9);
            p.j * (xx[i][j] - yy[i][j]) + p.delta * zz[i][j] + p.d_ani * (z2_1[i][j] + z2_2[i][j])
                - p.h * (z_1[i][j] + z_2[i][j])
        })
        .collect();
    SymMatrix::symmetrized(9, &dense)
}

/// Closed-form eigenpairs of the dimer.
///
/// `energies[i]` belongs to `eigenvectors[i]`; index `i` is the conventional
/// label `i + 1` (so `energies[5]` is `E₆`).
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum {
    pub energies: [f64; 9],
    pub eigenvectors: [[f64; 9]; 9],
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl AnalyticSpectrum {
    pub fn min_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ e^{-β Eᵢ}`.
    pub fn boltzmann_sum(&self, beta: f64) -> f64 {
        self.energies.iter().map(|e| (-beta * e).exp()).sum()
    }
}

/// `√((Δ - 2D)² + 8J²)`, the splitting of the `|-1,1⟩, |0,0⟩, |1,-1⟩` sector.
pub fn central_gap(p: &ModelParams) -> f64 {
    let a = p.delta - 2.0 * p.d_ani;
    (a * a + 8.0 * p.j * p.j).sqrt()
}

/// `Λ± = (Δ - 2D ± √((Δ-2D)² + 8J²)) / 2J`.
pub fn lambdas(p: &ModelParams) -> (f64, f64) {
    let a = p.delta - 2.0 * p.d_ani;
    let root = central_gap(p);
    ((a + root) / (2.0 * p.j), (a - root) / (2.0 * p.j))
}

pub fn analytic_spectrum(p: &ModelParams) -> Result<AnalyticSpectrum> {
    p.validate()?;
    let ModelParams {
        j,
        delta,
        d_ani: d,
        h,
    } = *p;
    let root = central_gap(p);
    let (lp, lm) = lambdas(p);

    let energies = [
        delta + 2.0 * d - 2.0 * h,
        j + d + h,
        -j + d + h,
        delta + 2.0 * d + 2.0 * h,
        -delta / 2.0 + d + root / 2.0,
        -delta / 2.0 + d - root / 2.0,
        -delta + 2.0 * d,
        j + d - h,
        -j + d - h,
    ];

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut vecs = [[0.0; 9]; 9];
    vecs[0][basis_index(-1, -1)] = 1.0;
    vecs[1][basis_index(0, 1)] = r;
    vecs[1][basis_index(1, 0)] = r;
    vecs[2][basis_index(0, 1)] = -r;
    vecs[2][basis_index(1, 0)] = r;
    vecs[3][basis_index(1, 1)] = 1.0;
    for (k, lam) in [(4, lp), (5, lm)] {
        let n = 1.0 / (2.0 + lam * lam).sqrt();
        vecs[k][basis_index(-1, 1)] = n;
        vecs[k][basis_index(0, 0)] = lam * n;
        vecs[k][basis_index(1, -1)] = n;
    }
    vecs[6][basis_index(-1, 1)] = -r;
    vecs[6][basis_index(1, -1)] = r;
    vecs[7][basis_index(-1, 0)] = r;
    vecs[7][basis_index(0, -1)] = r;
    vecs[8][basis_index(-1, 0)] = -r;
    vecs[8][basis_index(0, -1)] = r;

    Ok(AnalyticSpectrum {
        energies,
        eigenvectors: vecs,
        lambda_plus: lp,
        lambda_minus: lm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eig;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    fn params() -> impl Strategy<Value = ModelParams> {
        (-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0)
            .prop_map(|(delta, d, h)| ModelParams::reduced(delta, d, h).unwrap())
    }

    #[test]
    fn spin_algebra() {
        let s = SpinOperators::spin_one();
        let c = s.casimir();
        let k = s.commutator_xy_imag();
        for i in 0..3 {
            for j in 0..3 {
                let two = if i == j { 2.0 } else { 0.0 };
                assert!((c[i][j] - two).abs() < 1e-14);
                assert!((k[i][j] - s.sz[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn isotropic_spectrum() {
        let p = ModelParams::reduced(1.0, 0.0, 0.0).unwrap();
        let numeric = symmetric_eig(&build_hamiltonian(&p).unwrap())
            .unwrap()
            .values;
        let want = [-2.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        for (a, b) in numeric.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{numeric:?}");
        }
        let analytic = analytic_spectrum(&p).unwrap().energies;
        assert_eq!(analytic[5], -2.0);
        for k in [2, 6, 8] {
            assert_eq!(analytic[k], -1.0);
        }
    }

    #[test]
    fn xy_limit_extremes() {
        let p = ModelParams::reduced(0.0, 0.0, 0.0).unwrap();
        let v = symmetric_eig(&build_hamiltonian(&p).unwrap())
            .unwrap()
            .values;
        assert!((v[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((v[8] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singlet_coefficients() {
        let p = ModelParams::reduced(1.0, 0.0, 0.0).unwrap();
        let s = analytic_spectrum(&p).unwrap();
        // (1 ± 3)/2
        assert_eq!(s.lambda_plus, 2.0);
        assert_eq!(s.lambda_minus, -1.0);
        let t = 1.0 / 3f64.sqrt();
        let psi6 = s.eigenvectors[5];
        let mut want = [0.0; 9];
        want[basis_index(-1, 1)] = t;
        want[basis_index(0, 0)] = -t;
        want[basis_index(1, -1)] = t;
        for (a, b) in psi6.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compensated_anisotropy_point() {
        // Δ - 2D = 0 makes the central sector splitting 2√2 J.
        let p = ModelParams::new(1.0, 2.0, 1.0, 0.0).unwrap();
        let s = analytic_spectrum(&p).unwrap();
        let r2 = 2f64.sqrt();
        assert!((s.lambda_plus - r2).abs() < 1e-15);
        assert!((s.lambda_minus + r2).abs() < 1e-15);
        assert!((s.energies[4] - r2).abs() < 1e-15);
        assert!((s.energies[5] + r2).abs() < 1e-15);
        let numeric = symmetric_eig(&build_hamiltonian(&p).unwrap())
            .unwrap()
            .values;
        assert!((numeric[0] + r2).abs() < 1e-12);
    }

    #[test]
    fn zero_exchange_rejected() {
        let p = ModelParams {
            j: 0.0,
            delta: 1.0,
            d_ani: 0.0,
            h: 0.0,
        };
        assert!(matches!(analytic_spectrum(&p), Err(Error::Unsupported(_))));
        assert!(ModelParams::new(1.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn basis_ordering() {
        assert_eq!(basis_index(-1, -1), 0);
        assert_eq!(basis_index(0, 0), 4);
        assert_eq!(basis_index(1, 1), 8);
        // |-1,-1⟩ carries Δ + 2D - 2h on the diagonal
        let p = ModelParams::new(1.0, 0.7, 0.3, 0.9).unwrap();
        let hm = build_hamiltonian(&p).unwrap();
        assert!((hm.get(0, 0) - (0.7 + 0.6 - 1.8)).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn analytic_matches_numeric(p in params()) {
            let hm = build_hamiltonian(&p).unwrap();
            let s = analytic_spectrum(&p).unwrap();
            let numeric = symmetric_eig(&hm).unwrap().values;
            let analytic = sorted(s.energies.to_vec());
            for (a, b) in analytic.iter().zip(&numeric) {
                prop_assert!((a - b).abs() <= 1e-10 * p.j);
            }
            let scale = s.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            for (e, v) in s.energies.iter().zip(&s.eigenvectors) {
                let hv = hm.mat_vec(v);
                let res = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-10 * scale.max(1.0));
            }
            for i in 0..9 {
                for k in 0..9 {
                    let dot: f64 = s.eigenvectors[i].iter().zip(&s.eigenvectors[k]).map(|(a, b)| a * b).sum();
                    let expected = if i == k { 1.0 } else { 0.0 };
                    prop_assert!((dot - expected).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn zeeman_symmetry(p in params()) {
            let a = symmetric_eig(&build_hamiltonian(&p).unwrap()).unwrap().values;
            let b = symmetric_eig(&build_hamiltonian(&p.with_field_reversed()).unwrap()).unwrap().values;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
