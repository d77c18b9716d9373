//! Entropic-uncertainty steering from spin-component measurements.
//!
//! Both sites measure `Sˣ`, `Sʸ` and `Sᶻ`. For each axis the joint outcome
//! table `p(a, b)` and the A-marginal give the conditional entropy
//! `H(B|A) = H(AB) - H(A)`, and
//!
//! ```text
//! S = Σ_{X,Y} Σ p log₂ p + Σ_Z p log₂(2^{16/3} p) - Σ_{X,Y,Z} Σ p_A log₂ p_A
//!   = 16/3 - Σ_axes H(B|A)
//! ```
//!
//! The state is steerable when `S > 8/3`, i.e. when the summed conditional
//! entropies drop below the three-measurement qutrit bound.
//!
//! Outcome index `k` of every axis carries eigenvalue `m = 1 - k`
//! (`+1, 0, -1`). Since `Sᶻ = diag(+1, 0, -1)` over the basis labels, the
//! `Z` outcome `k` is basis label index `k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{entropy_terms, SymMatrix, PROB_ZERO};
use crate::measures::validate_density;

/// Lower bound on `Σ H(B|A)` for three spin-1 components.
pub const STEERING_BOUND: f64 = 8.0 / 3.0;
/// `log₂(32 · 2^{1/3})`.
pub const STEERING_OFFSET: f64 = 16.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Eigenbasis of one spin-1 component, as complex amplitudes split into real
/// and imaginary parts. `re[k]`/`im[k]` belong to eigenvalue `1 - k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    pub axis: Axis,
    pub re: [[f64; 3]; 3],
    pub im: [[f64; 3]; 3],
}

impl MeasurementBasis {
    pub fn new(axis: Axis) -> Self {
        let h = 0.5;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = [0.0; 3];
        match axis {
            Axis::X => MeasurementBasis {
                axis,
                re: [[h, r, h], [r, 0.0, -r], [h, -r, h]],
                im: [z; 3],
            },
            Axis::Y => MeasurementBasis {
                axis,
                re: [[h, 0.0, -h], [r, 0.0, r], [h, 0.0, -h]],
                im: [[0.0, r, 0.0], z, [0.0, -r, 0.0]],
            },
            Axis::Z => MeasurementBasis {
                axis,
                re: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                im: [z; 3],
            },
        }
    }

    /// `⟨u|v⟩` for outcomes `k`, `l` as (re, im).
    pub fn overlap(&self, k: usize, l: usize) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..3 {
            // conj(a) * b
            re += self.re[k][i] * self.re[l][i] + self.im[k][i] * self.im[l][i];
            im += self.re[k][i] * self.im[l][i] - self.im[k][i] * self.re[l][i];
        }
        (re, im)
    }
}

pub type JointTable = [[f64; 3]; 3];

/// `p(a, b) = ⟨u_a ⊗ u_b| ρ |u_a ⊗ u_b⟩`.
pub fn joint_probabilities(rho: &SymMatrix, axis: Axis) -> Result<JointTable> {
    validate_density(rho)?;
    if rho.dim() != 9 {
        return Err(Error::invalid("joint probabilities need a 9x9 state"));
    }
    Ok(joint_unchecked(rho, &MeasurementBasis::new(axis)))
}

fn joint_unchecked(rho: &SymMatrix, basis: &MeasurementBasis) -> JointTable {
    let mut table = [[0.0; 3]; 3];
    let mut vr = [0.0; 9];
    let mut vi = [0.0; 9];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    let (ar, ai) = (basis.re[a][i], basis.im[a][i]);
                    let (br, bi) = (basis.re[b][j], basis.im[b][j]);
                    vr[3 * i + j] = ar * br - ai * bi;
                    vi[3 * i + j] = ar * bi + ai * br;
                }
            }
            // Real symmetric ρ: the imaginary cross terms cancel.
            *cell = rho.quad_form(&vr) + rho.quad_form(&vi);
        }
    }
    table
}

/// Aggregates of the thermal-pattern entries used by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringAggregates {
    pub kappa: f64,
    pub zeta: f64,
    pub eta: f64,
    pub xi: f64,
}

impl SteeringAggregates {
    pub fn from_state(rho: &SymMatrix) -> Self {
        let g = |i: usize, j: usize| rho.get(i, j);
        SteeringAggregates {
            kappa: g(0, 0) + g(2, 2) + g(6, 6) + g(8, 8),
            zeta: g(1, 1) + g(3, 3) + 3.0 * g(4, 4) + g(5, 5) + g(7, 7),
            eta: 4.0 * (g(1, 3) + g(2, 4) + g(4, 6) + g(5, 7)),
            xi: 2.0 * g(2, 6),
        }
    }
}

/// Closed-form joint tables for a state with the thermal sparsity pattern.
///
/// X and Y coincide for such states. The `m = ±1` ↔ `m = 0` cross terms are
/// `(κ - ξ + 2(ρ₃₃ + ρ₅₅))/8` and `(κ - ξ + 2(ρ₁₁ + ρ₇₇))/8`; these follow
/// from the marginals and are checked against projector expectations.
pub fn joint_probabilities_thermal(rho: &SymMatrix, axis: Axis) -> JointTable {
    let g = |i: usize, j: usize| rho.get(i, j);
    match axis {
        Axis::Z => {
            let mut t = [[0.0; 3]; 3];
            for (a, row) in t.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    *cell = g(3 * a + b, 3 * a + b);
                }
            }
            t
        }
        Axis::X | Axis::Y => {
            let SteeringAggregates {
                kappa,
                zeta,
                eta,
                xi,
            } = SteeringAggregates::from_state(rho);
            let trace = rho.trace();
            let same_pm = (trace + zeta + eta + xi) / 16.0;
            let opposite_pm = (trace + zeta - eta + xi) / 16.0;
            let zero_zero = (kappa + xi) / 4.0;
            let pm_zero = (kappa - xi + 2.0 * (g(3, 3) + g(5, 5))) / 8.0;
            let zero_pm = (kappa - xi + 2.0 * (g(1, 1) + g(7, 7))) / 8.0;
            [
                [same_pm, pm_zero, opposite_pm],
                [zero_pm, zero_zero, zero_pm],
                [opposite_pm, pm_zero, same_pm],
            ]
        }
    }
}

/// Closed-form A-marginals for a thermal-pattern state.
pub fn marginals_thermal(rho: &SymMatrix, axis: Axis) -> [f64; 3] {
    let g = |i: usize| rho.get(i, i);
    match axis {
        Axis::Z => [g(0) + g(1) + g(2), g(3) + g(4) + g(5), g(6) + g(7) + g(8)],
        Axis::X | Axis::Y => {
            let mid = g(3) + g(4) + g(5);
            let pm = (rho.trace() + mid) / 4.0;
            [pm, (rho.trace() - mid) / 2.0, pm]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringBreakdown {
    /// Indexed X, Y, Z.
    pub joint_probs: [JointTable; 3],
    pub marginals_a: [[f64; 3]; 3],
    pub conditional_entropies: [f64; 3],
    pub s_value: f64,
    pub steerable: bool,
}

impl SteeringBreakdown {
    pub fn from_tables(joint_probs: [JointTable; 3]) -> Self {
        let marginals_a =
            joint_probs.map(|t| [t[0].iter().sum(), t[1].iter().sum(), t[2].iter().sum()]);
        let mut conditional_entropies = [0.0; 3];
        let mut s_value = 0.0;
        for (k, axis) in Axis::ALL.iter().enumerate() {
            let flat: Vec<f64> = joint_probs[k].iter().flatten().copied().collect();
            let h_ab = entropy_terms(&flat);
            let h_a = entropy_terms(&marginals_a[k]);
            conditional_entropies[k] = h_ab - h_a;
            // Σ p log₂ p, plus log₂(32·2^{1/3}) · Σ p on the Z axis.
            s_value -= h_ab;
            if *axis == Axis::Z {
                s_value += STEERING_OFFSET * flat.iter().filter(|&&p| p > PROB_ZERO).sum::<f64>();
            }
            s_value += h_a;
        }
        SteeringBreakdown {
            joint_probs,
            marginals_a,
            conditional_entropies,
            s_value,
            steerable: s_value > STEERING_BOUND,
        }
    }

    /// `16/3 - Σ H(B|A)`; equals `s_value` for normalized tables.
    pub fn s_from_conditionals(&self) -> f64 {
        STEERING_OFFSET - self.conditional_entropies.iter().sum::<f64>()
    }
}

/// Steering quantity from projector expectations.
pub fn steering_value(rho: &SymMatrix) -> Result<SteeringBreakdown> {
    validate_density(rho)?;
    if rho.dim() != 9 {
        return Err(Error::invalid("steering needs a 9x9 state"));
    }
    let tables = Axis::ALL.map(|a| joint_unchecked(rho, &MeasurementBasis::new(a)));
    Ok(SteeringBreakdown::from_tables(tables))
}

/// Steering quantity from [`joint_probabilities_thermal`].
pub fn steering_value_thermal(rho: &SymMatrix) -> SteeringBreakdown {
    SteeringBreakdown::from_tables(Axis::ALL.map(|a| joint_probabilities_thermal(rho, a)))
}

/// Entropic uncertainty bound
/// `B = N log₂F + (N - F(d+N-1)/d)·(1+F) log₂(1 + 1/F)`, `F = ⌊N d/(d+N-1)⌋`.
pub fn eur_bound(n_measurements: u32, dim_a: u32) -> Result<f64> {
    if n_measurements == 0 || dim_a < 2 {
        return Err(Error::invalid(format!(
            "eur_bound needs N >= 1 and d >= 2, got N={n_measurements}, d={dim_a}"
        )));
    }
    let n = n_measurements as f64;
    let d = dim_a as f64;
    let f = ((n_measurements * dim_a) / (dim_a + n_measurements - 1)) as f64;
    Ok(n * f.log2() + (n - f * (d + n - 1.0) / d) * (1.0 + f) * (1.0 + 1.0 / f).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{basis_index, ModelParams, SpinOperators};
    use crate::thermal::{gibbs_closed_form, ground_state, Temperature};
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn mixed() -> SymMatrix {
        SymMatrix::identity(9).scaled(1.0 / 9.0)
    }

    fn product_up_up() -> SymMatrix {
        let mut m = SymMatrix::zeros(9);
        m.set(basis_index(1, 1), basis_index(1, 1), 1.0);
        m
    }

    fn singlet() -> SymMatrix {
        ground_state(&ModelParams::reduced(1.0, 0.0, 0.0).unwrap(), 1e-9)
            .unwrap()
            .rho
    }

    fn draw() -> impl Strategy<Value = SymMatrix> {
        (-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0, 0.05f64..5.0).prop_map(|(a, d, h, t)| {
            let p = ModelParams::reduced(a, d, h).unwrap();
            gibbs_closed_form(&p, Temperature::new(t).unwrap())
                .unwrap()
                .rho
        })
    }

    #[test]
    fn bases_are_orthonormal_eigenbases() {
        let s = SpinOperators::spin_one();
        for axis in Axis::ALL {
            let b = MeasurementBasis::new(axis);
            for k in 0..3 {
                for l in 0..3 {
                    let (re, im) = b.overlap(k, l);
                    assert!((re - if k == l { 1.0 } else { 0.0 }).abs() < TOL);
                    assert!(im.abs() < TOL);
                }
                // S v = m v with m = 1 - k; Sʸ = iA acts as (re, im) → (-A im, A re).
                let m = 1.0 - k as f64;
                for i in 0..3 {
                    let (sr, si) = match axis {
                        Axis::X => (
                            (0..3).map(|j| s.sx[i][j] * b.re[k][j]).sum::<f64>(),
                            (0..3).map(|j| s.sx[i][j] * b.im[k][j]).sum::<f64>(),
                        ),
                        Axis::Y => (
                            -(0..3).map(|j| s.sy_imag[i][j] * b.im[k][j]).sum::<f64>(),
                            (0..3).map(|j| s.sy_imag[i][j] * b.re[k][j]).sum::<f64>(),
                        ),
                        Axis::Z => (s.sz[i][i] * b.re[k][i], s.sz[i][i] * b.im[k][i]),
                    };
                    assert!((sr - m * b.re[k][i]).abs() < TOL, "{axis:?} k={k}");
                    assert!((si - m * b.im[k][i]).abs() < TOL, "{axis:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn mixed_state_tables() {
        for axis in Axis::ALL {
            let t = joint_probabilities(&mixed(), axis).unwrap();
            for row in t {
                for p in row {
                    assert!((p - 1.0 / 9.0).abs() < TOL);
                }
            }
        }
        let b = steering_value(&mixed()).unwrap();
        assert!((b.s_value - (16.0 / 3.0 - 3.0 * 3f64.log2())).abs() < 1e-12);
        assert!((b.s_value - 0.578_445_831_169_866).abs() < 1e-12);
        assert!(!b.steerable);
    }

    #[test]
    fn singlet_is_perfectly_anticorrelated() {
        let t = joint_probabilities(&singlet(), Axis::Z).unwrap();
        for (a, row) in t.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                let want = if a + b == 2 { 1.0 / 3.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-12);
            }
        }
        let b = steering_value(&singlet()).unwrap();
        assert!((b.s_value - 16.0 / 3.0).abs() < 1e-9);
        assert!(b.steerable);
    }

    #[test]
    fn product_state_statistics() {
        let t = joint_probabilities(&product_up_up(), Axis::X).unwrap();
        let q = [0.25, 0.5, 0.25];
        for a in 0..3 {
            for b in 0..3 {
                assert!((t[a][b] - q[a] * q[b]).abs() < TOL);
            }
        }
        let b = steering_value(&product_up_up()).unwrap();
        assert!((b.conditional_entropies[0] - 1.5).abs() < TOL);
        assert!((b.conditional_entropies[1] - 1.5).abs() < TOL);
        assert!(b.conditional_entropies[2].abs() < TOL);
        assert!((b.s_value - 7.0 / 3.0).abs() < 1e-12);
        assert!(!b.steerable);
    }

    #[test]
    fn eur_bound_values() {
        assert!((eur_bound(3, 3).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(eur_bound(1, 2).unwrap(), 0.0);
        assert!((eur_bound(2, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(eur_bound(0, 3).is_err());
        assert!(eur_bound(3, 1).is_err());
        assert!((eur_bound(3, 3).unwrap() - STEERING_BOUND).abs() < 1e-15);
    }

    #[test]
    fn literal_cross_term_disagrees() {
        // The published p(±1, 0) uses κ - ζ; it is not a probability in general.
        let p = ModelParams::reduced(2.0, 0.5, 1.0).unwrap();
        let rho = gibbs_closed_form(&p, Temperature::new(0.2).unwrap())
            .unwrap()
            .rho;
        let a = SteeringAggregates::from_state(&rho);
        let literal = (a.kappa - a.zeta + 2.0 * (rho.get(3, 3) + rho.get(5, 5))) / 8.0;
        let generic = joint_probabilities(&rho, Axis::X).unwrap()[0][1];
        assert!(literal < 0.0);
        assert!((generic - joint_probabilities_thermal(&rho, Axis::X)[0][1]).abs() < 1e-12);
    }

    #[test]
    fn site_swap_leaves_s_unchanged() {
        let p = ModelParams::reduced(2.0, -1.0, 0.7).unwrap();
        let rho = gibbs_closed_form(&p, Temperature::new(0.4).unwrap())
            .unwrap()
            .rho;
        let swap = |k: usize| 3 * (k % 3) + k / 3;
        let swapped = SymMatrix::from_upper_fn(9, |i, j| rho.get(swap(i), swap(j)));
        let a = steering_value(&rho).unwrap().s_value;
        let b = steering_value(&swapped).unwrap().s_value;
        assert!((a - b).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn closed_forms_match_projectors(rho in draw()) {
            for axis in Axis::ALL {
                let generic = joint_probabilities(&rho, axis).unwrap();
                let closed = joint_probabilities_thermal(&rho, axis);
                let total: f64 = generic.iter().flatten().sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
                for a in 0..3 {
                    for b in 0..3 {
                        prop_assert!(generic[a][b] >= -1e-14);
                        prop_assert!((generic[a][b] - closed[a][b]).abs() <= 1e-10);
                    }
                    let marginal: f64 = generic[a].iter().sum();
                    prop_assert!((marginal - marginals_thermal(&rho, axis)[a]).abs() <= 1e-10);
                }
            }
            // aliased positions
            prop_assert_eq!(rho.get(3, 3), rho.get(1, 1));
            prop_assert_eq!(rho.get(6, 6), rho.get(2, 2));
            prop_assert_eq!(rho.get(7, 7), rho.get(5, 5));
            prop_assert_eq!(rho.get(4, 6), rho.get(2, 4));
        }

        #[test]
        fn s_identity_and_bound(rho in draw()) {
            let b = steering_value(&rho).unwrap();
            prop_assert!((b.s_value - b.s_from_conditionals()).abs() <= 1e-10);
            prop_assert!(b.s_value <= STEERING_OFFSET + 1e-10);
            prop_assert_eq!(b.steerable, b.s_value > STEERING_BOUND);
        }

        #[test]
        fn outcome_relabeling_invariance(rho in draw(), perm in 0usize..6) {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let pi = perms[perm];
            let b = steering_value(&rho).unwrap();
            let permuted = b.joint_probs.map(|t| {
                let mut out = [[0.0; 3]; 3];
                for a in 0..3 {
                    for c in 0..3 {
                        out[pi[a]][pi[c]] = t[a][c];
                    }
                }
                out
            });
            let s2 = SteeringBreakdown::from_tables(permuted).s_value;
            prop_assert!((b.s_value - s2).abs() < 1e-12);
        }
    }
}
