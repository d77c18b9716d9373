//! Gibbs states of the dimer.
//!
//! Two independent finite-temperature constructions are provided: the
//! closed-form matrix assembled from the analytic spectrum, and a spectral
//! oracle `exp(-βĤ)/Z` computed from the numeric eigendecomposition. At
//! `t = 0` the state is the uniform mixture over the ground manifold.
//!
//! Both finite-temperature builders subtract the lowest energy before
//! exponentiating, so the weights stay finite for any `t > 0`; the reported
//! partition function is rescaled afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eig, SymMatrix};
use crate::model::{analytic_spectrum, build_hamiltonian, central_gap, ModelParams};

/// Dimensionless temperature `k_B T / J`; zero selects the ground state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::invalid(format!(
                "temperature must be finite and non-negative, got {t}"
            )));
        }
        Ok(Temperature(t))
    }

    pub const ZERO: Temperature = Temperature(0.0);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// Inverse temperature, in units of the energy scale of the couplings.
    pub fn beta(self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::unsupported(
                "t = 0 has no finite β; use the ground-state path",
            ));
        }
        Ok(1.0 / self.0)
    }
}

impl TryFrom<f64> for Temperature {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        Temperature::new(t)
    }
}

impl From<Temperature> for f64 {
    fn from(t: Temperature) -> f64 {
        t.0
    }
}

/// Distinct nonzero entries of the thermal matrix before division by `Z`.
///
/// Field names give the (row, column) position in the nine-state basis; the
/// remaining nonzero positions repeat these values. All entries and `z` carry
/// a common factor `e^{β E_min}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalElements {
    pub r00: f64,
    pub r11: f64,
    pub r13: f64,
    pub r22: f64,
    pub r24: f64,
    pub r26: f64,
    pub r44: f64,
    pub r55: f64,
    pub r57: f64,
    pub r88: f64,
    /// Sum of the shifted Boltzmann weights.
    pub z: f64,
    /// Energy subtracted before exponentiation.
    pub shift: f64,
}

impl ThermalElements {
    /// Places the entries at their matrix positions and divides by `z`.
    pub fn to_matrix(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(9);
        let n = 1.0 / self.z;
        m.set(0, 0, self.r00 * n);
        m.set(1, 1, self.r11 * n);
        m.set(3, 3, self.r11 * n);
        m.set(1, 3, self.r13 * n);
        m.set(2, 2, self.r22 * n);
        m.set(6, 6, self.r22 * n);
        m.set(2, 4, self.r24 * n);
        m.set(4, 6, self.r24 * n);
        m.set(2, 6, self.r26 * n);
        m.set(4, 4, self.r44 * n);
        m.set(5, 5, self.r55 * n);
        m.set(7, 7, self.r55 * n);
        m.set(5, 7, self.r57 * n);
        m.set(8, 8, self.r88 * n);
        m
    }
}

/// Matrix positions (upper triangle) that may be nonzero in a thermal state.
pub const THERMAL_SUPPORT: [(usize, usize); 14] = [
    (0, 0),
    (1, 1),
    (1, 3),
    (2, 2),
    (2, 4),
    (2, 6),
    (3, 3),
    (4, 4),
    (4, 6),
    (5, 5),
    (5, 7),
    (6, 6),
    (7, 7),
    (8, 8),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub rho: SymMatrix,
    /// Partition function; `None` on the ground-state path. May be `+inf`
    /// when `e^{-β E_min}` overflows even though `rho` is fine.
    pub z: Option<f64>,
    pub params: ModelParams,
    pub t: Temperature,
    /// Closed-form entries, present only for [`gibbs_closed_form`].
    pub elements: Option<ThermalElements>,
    /// Ground-manifold dimension, present only for [`ground_state`].
    pub ground_rank: Option<usize>,
}

impl ThermalState {
    /// Finite `t` goes through the closed form; `t = 0` through [`ground_state`]
    /// with the default degeneracy tolerance.
    pub fn at(p: &ModelParams, t: Temperature) -> Result<Self> {
        if t.is_zero() {
            ground_state(p, default_degeneracy_tol(p))
        } else {
            gibbs_closed_form(p, t)
        }
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_of_square()
    }

    /// Largest entry outside the thermal sparsity pattern.
    pub fn off_support_max(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..9 {
            for j in i..9 {
                if !THERMAL_SUPPORT.contains(&(i, j)) {
                    worst = worst.max(self.rho.get(i, j).abs());
                }
            }
        }
        worst
    }
}

/// `1e-9 · j`.
pub fn default_degeneracy_tol(p: &ModelParams) -> f64 {
    1e-9 * p.j
}

/// Partition function evaluated term by term in hyperbolic form.
pub fn partition_function(p: &ModelParams, t: Temperature) -> Result<f64> {
    p.validate()?;
    let beta = t.beta()?;
    let ModelParams {
        j,
        delta,
        d_ani: d,
        h,
    } = *p;
    let a = delta - 2.0 * d;
    Ok((beta * a).exp()
        + 2.0 * (-beta * (delta + 2.0 * d)).exp() * (2.0 * beta * h).cosh()
        + 2.0 * (-beta * d).exp() * ((beta * (h + j)).cosh() + (beta * (h - j)).cosh())
        + 2.0 * (beta * a / 2.0).exp() * (beta * central_gap(p) / 2.0).cosh())
}

/// Closed-form matrix elements at temperature `t > 0`.
pub fn thermal_elements(p: &ModelParams, t: Temperature) -> Result<ThermalElements> {
    let beta = t.beta()?;
    let spec = analytic_spectrum(p)?;
    let shift = spec.min_energy();
    let w: Vec<f64> = spec
        .energies
        .iter()
        .map(|e| (-beta * (e - shift)).exp())
        .collect();
    let (lp, lm) = (spec.lambda_plus, spec.lambda_minus);
    let c5 = w[4] / (2.0 + lp * lp);
    let c6 = w[5] / (2.0 + lm * lm);

    // e^{-β(D∓h)} cosh(βJ) = (w₈ + w₉)/2 resp. (w₂ + w₃)/2, and
    // -e^{-β(D∓h)} sinh(βJ) = (w₈ - w₉)/2 resp. (w₂ - w₃)/2.
    Ok(ThermalElements {
        r00: w[0],
        r88: w[3],
        r11: 0.5 * (w[7] + w[8]),
        r13: 0.5 * (w[7] - w[8]),
        r55: 0.5 * (w[1] + w[2]),
        r57: 0.5 * (w[1] - w[2]),
        r22: c5 + c6 + 0.5 * w[6],
        r24: lp * c5 + lm * c6,
        r26: c5 + c6 - 0.5 * w[6],
        r44: lp * lp * c5 + lm * lm * c6,
        z: w.iter().sum(),
        shift,
    })
}

pub fn gibbs_closed_form(p: &ModelParams, t: Temperature) -> Result<ThermalState> {
    let el = thermal_elements(p, t)?;
    let beta = t.beta()?;
    Ok(ThermalState {
        rho: el.to_matrix(),
        z: Some(el.z * (-beta * el.shift).exp()),
        params: *p,
        t,
        elements: Some(el),
        ground_rank: None,
    })
}

/// `exp(-βĤ)/Z` from the numeric eigendecomposition of `Ĥ`.
pub fn gibbs_oracle(p: &ModelParams, t: Temperature) -> Result<ThermalState> {
    let beta = t.beta()?;
    let eig = symmetric_eig(&build_hamiltonian(p)?)?;
    let shift = eig.values[0];
    let weighted = eig.reconstruct_with(|l| (-beta * (l - shift)).exp());
    let trace = weighted.trace();
    Ok(ThermalState {
        rho: weighted.scaled(1.0 / trace),
        z: Some(trace * (-beta * shift).exp()),
        params: *p,
        t,
        elements: None,
        ground_rank: None,
    })
}

/// Uniform mixture over eigenvectors within `degeneracy_tol` of the minimum.
pub fn ground_state(p: &ModelParams, degeneracy_tol: f64) -> Result<ThermalState> {
    if !degeneracy_tol.is_finite() || degeneracy_tol <= 0.0 {
        return Err(Error::invalid(format!(
            "degeneracy tolerance must be positive, got {degeneracy_tol}"
        )));
    }
    let eig = symmetric_eig(&build_hamiltonian(p)?)?;
    let e0 = eig.values[0];
    let rank = eig
        .values
        .iter()
        .take_while(|&&e| e - e0 <= degeneracy_tol)
        .count();
    let ground = &eig.vectors[..rank];
    let w = 1.0 / rank as f64;
    let rho = SymMatrix::from_upper_fn(9, |i, j| {
        w * ground.iter().map(|v| v[i] * v[j]).sum::<f64>()
    });
    Ok(ThermalState {
        rho,
        z: None,
        params: *p,
        t: Temperature::ZERO,
        elements: None,
        ground_rank: Some(rank),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator_max_abs, spectral_map};
    use crate::model::basis_index;
    use proptest::prelude::*;

    fn temp(t: f64) -> Temperature {
        Temperature::new(t).unwrap()
    }

    fn singlet_projector() -> SymMatrix {
        let s = 1.0 / 3f64.sqrt();
        let mut psi = [0.0; 9];
        psi[basis_index(-1, 1)] = s;
        psi[basis_index(0, 0)] = -s;
        psi[basis_index(1, -1)] = s;
        SymMatrix::from_upper_fn(9, |i, j| psi[i] * psi[j])
    }

    fn draw() -> impl Strategy<Value = (ModelParams, Temperature)> {
        (-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0, 0.05f64..5.0)
            .prop_map(|(a, d, h, t)| (ModelParams::reduced(a, d, h).unwrap(), temp(t)))
    }

    #[test]
    fn temperature_validation() {
        assert!(Temperature::new(-0.1).is_err());
        assert!(Temperature::new(f64::INFINITY).is_err());
        assert!(matches!(
            Temperature::ZERO.beta(),
            Err(Error::Unsupported(_))
        ));
        let p = ModelParams::reduced(1.0, 0.0, 0.0).unwrap();
        assert!(partition_function(&p, Temperature::ZERO).is_err());
        assert!(gibbs_closed_form(&p, Temperature::ZERO).is_err());
    }

    #[test]
    fn partition_function_values() {
        let p = ModelParams::reduced(1.0, 0.0, 0.0).unwrap();
        // Frozen from Σ e^{-E} over the Jacobi spectrum {-2, -1×3, 1×5}.
        let oracle: f64 = symmetric_eig(&build_hamiltonian(&p).unwrap())
            .unwrap()
            .values
            .iter()
            .map(|e| (-e).exp())
            .sum();
        assert!((oracle - 17.383_298_790_165).abs() < 1e-11);
        let z = partition_function(&p, temp(1.0)).unwrap();
        assert!((z - oracle).abs() < 1e-12 * oracle);

        let hot = ModelParams::reduced(2.0, 0.5, 1.0).unwrap();
        assert!((partition_function(&hot, temp(1e9)).unwrap() - 9.0).abs() < 1e-7);
    }

    #[test]
    fn literal_hyperbolic_elements() {
        let p = ModelParams::new(1.0, 2.0, 0.5, 1.0).unwrap();
        let t = temp(0.7);
        let b = 1.0 / 0.7;
        let el = thermal_elements(&p, t).unwrap();
        let scale = (b * el.shift).exp();
        let r11 = (-b * (p.d_ani - p.h)).exp() * (b * p.j).cosh();
        let r13 = -(-b * (p.d_ani - p.h)).exp() * (b * p.j).sinh();
        let r55 = (-b * (p.d_ani + p.h)).exp() * (b * p.j).cosh();
        let r57 = -(-b * (p.d_ani + p.h)).exp() * (b * p.j).sinh();
        for (lit, got) in [(r11, el.r11), (r13, el.r13), (r55, el.r55), (r57, el.r57)] {
            assert!((lit - got / scale).abs() < 1e-12 * lit.abs().max(1.0));
        }
        assert!((el.z / scale - partition_function(&p, t).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let p = ModelParams::reduced(2.0, 0.5, 1.0).unwrap();
        let s = gibbs_closed_form(&p, temp(1e6)).unwrap();
        let mixed = SymMatrix::identity(9).scaled(1.0 / 9.0);
        assert!(s.rho.max_abs_diff(&mixed) < 1e-5);
    }

    #[test]
    fn cold_isotropic_state_is_singlet() {
        let p = ModelParams::reduced(1.0, 0.0, 0.0).unwrap();
        let s = gibbs_closed_form(&p, temp(0.05)).unwrap();
        // Three levels one J above: deviation ≈ 3e^{-20}.
        assert!(s.rho.max_abs_diff(&singlet_projector()) < 1e-8);
        assert!(s.z.unwrap().is_finite());
    }

    #[test]
    fn oracle_examples() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 5.0).unwrap();
        let s = gibbs_oracle(&p, temp(0.1)).unwrap();
        // E₁ = -7 is 2J below the next level.
        assert!(s.rho.get(0, 0) > 1.0 - 1e-6);
        for i in 0..9 {
            for j in (i + 1)..9 {
                assert!(s.rho.get(i, j).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn ground_state_examples() {
        let singlet = ground_state(&ModelParams::reduced(1.0, 0.0, 0.0).unwrap(), 1e-9).unwrap();
        assert_eq!(singlet.ground_rank, Some(1));
        assert!(singlet.rho.max_abs_diff(&singlet_projector()) < 1e-12);

        let polarized = ground_state(&ModelParams::reduced(2.0, 0.0, 10.0).unwrap(), 1e-9).unwrap();
        assert_eq!(polarized.ground_rank, Some(1));
        assert!((polarized.rho.get(0, 0) - 1.0).abs() < 1e-12);

        assert!(ground_state(&singlet.params, 0.0).is_err());
    }

    #[test]
    fn degenerate_ground_manifold_is_equal_mixture() {
        // Δ=1, D=0, h=1: E₆ = E₉ = -2.
        let p = ModelParams::reduced(1.0, 0.0, 1.0).unwrap();
        let s = ground_state(&p, 1e-9).unwrap();
        assert_eq!(s.ground_rank, Some(2));
        let eig = symmetric_eig(&s.rho).unwrap();
        assert!((eig.values[8] - 0.5).abs() < 1e-12);
        assert!((eig.values[7] - 0.5).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn closed_form_matches_oracle((p, t) in draw()) {
            let a = gibbs_closed_form(&p, t).unwrap();
            let b = gibbs_oracle(&p, t).unwrap();
            prop_assert!(a.rho.max_abs_diff(&b.rho) <= 1e-10);
            let z = partition_function(&p, t).unwrap();
            let analytic = analytic_spectrum(&p).unwrap().boltzmann_sum(1.0 / t.value());
            let numeric = spectral_map(&build_hamiltonian(&p).unwrap(), |l| (-l / t.value()).exp()).unwrap().trace();
            prop_assert!((z - analytic).abs() <= 1e-12 * z);
            prop_assert!((z - numeric).abs() <= 1e-12 * z);
            prop_assert!((a.z.unwrap() - z).abs() <= 1e-12 * z);
        }

        #[test]
        fn state_invariants((p, t) in draw()) {
            let s = gibbs_closed_form(&p, t).unwrap();
            prop_assert!((s.rho.trace() - 1.0).abs() < 1e-12);
            prop_assert!(symmetric_eig(&s.rho).unwrap().values[0] >= -1e-12);
            let hm = build_hamiltonian(&p).unwrap();
            prop_assert!(commutator_max_abs(&hm, &s.rho) <= 1e-10 * p.j);
            prop_assert!(s.off_support_max() <= 1e-12);
        }

        #[test]
        fn field_reversal_is_a_relabeling((p, t) in draw()) {
            let a = gibbs_closed_form(&p, t).unwrap();
            let b = gibbs_closed_form(&p.with_field_reversed(), t).unwrap();
            // |a,b⟩ → |-a,-b⟩ maps index k to 8 - k.
            for i in 0..9 {
                for j in 0..9 {
                    prop_assert!((a.rho.get(i, j) - b.rho.get(8 - i, 8 - j)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn purity_decreases_with_temperature(
            delta in -4.0f64..4.0, d in -4.0f64..4.0, h in -4.0f64..4.0,
        ) {
            let p = ModelParams::reduced(delta, d, h).unwrap();
            let mut last = f64::INFINITY;
            for k in 0..60 {
                let t = 0.05 + 0.1 * k as f64;
                let purity = gibbs_closed_form(&p, temp(t)).unwrap().purity();
                prop_assert!(purity <= last + 1e-12);
                last = purity;
            }
        }
    }
}
