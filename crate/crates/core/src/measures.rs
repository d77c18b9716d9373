//! Coherence and entanglement quantifiers.
//!
//! Coherence is measured in the computational product basis. Negativity is
//! always the eigenvalue trace norm of the partial transpose; the hyperbolic
//! "row norm" expression [`negativity_row_norm_form`] is kept for
//! comparison only because it does not equal the trace norm in general.
//!
//! Zero negativity does not certify separability here: 3⊗3 systems admit
//! PPT (bound) entangled states, which this crate does not try to detect.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_psd, entropy_terms, partial_transpose_a, symmetric_eig, trace_norm, SymMatrix,
};
use crate::steering::{steering_value, steering_value_thermal};
use crate::thermal::ThermalState;

/// Trace deviation accepted for a density matrix.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue accepted for a density matrix.
pub const DENSITY_PSD_TOL: f64 = 1e-9;
/// Default half-width of the bands used by [`classify_phase`].
pub const PHASE_TOL: f64 = 1e-6;

/// Checks that `rho` is a finite, unit-trace, positive semidefinite matrix.
pub fn validate_density(rho: &SymMatrix) -> Result<()> {
    if !rho.is_finite() {
        return Err(Error::invalid("density matrix has non-finite entries"));
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
        return Err(Error::invalid(format!("density matrix has trace {tr}")));
    }
    let min = symmetric_eig(rho)?.values[0];
    if min < -DENSITY_PSD_TOL {
        return Err(Error::invalid(format!(
            "density matrix has negative eigenvalue {min}"
        )));
    }
    Ok(())
}

/// `Σ_{i≠j} |ρᵢⱼ|`.
pub fn coherence_l1(rho: &SymMatrix) -> Result<f64> {
    validate_density(rho)?;
    Ok(l1_unchecked(rho))
}

fn l1_unchecked(rho: &SymMatrix) -> f64 {
    let n = rho.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += rho.get(i, j).abs();
            }
        }
    }
    s
}

/// `S(ρ_diag) - S(ρ)` in bits.
pub fn coherence_relative(rho: &SymMatrix) -> Result<f64> {
    validate_density(rho)?;
    relative_unchecked(rho)
}

fn relative_unchecked(rho: &SymMatrix) -> Result<f64> {
    let spectrum: Vec<f64> = symmetric_eig(rho)?
        .values
        .into_iter()
        .map(clamp_psd)
        .collect();
    let diag: Vec<f64> = rho.diagonal().into_iter().map(clamp_psd).collect();
    Ok((entropy_terms(&diag) - entropy_terms(&spectrum)).max(0.0))
}

/// `(‖ρ^{t_A}‖₁ - 1)/2` for a two-qutrit state.
pub fn negativity(rho: &SymMatrix) -> Result<f64> {
    validate_density(rho)?;
    negativity_unchecked(rho)
}

fn negativity_unchecked(rho: &SymMatrix) -> Result<f64> {
    let n = (trace_norm(&partial_transpose_a(rho, 3, 3)?)? - 1.0) / 2.0;
    Ok(if n > -1e-12 && n < 0.0 { 0.0 } else { n })
}

/// `(2|ρ₁,₃| + 4|ρ₂,₄| + 2|ρ₂,₆| + 2|ρ₅,₇|)` read from a state with the
/// thermal sparsity pattern (entries already normalized).
pub fn coherence_l1_thermal(rho: &SymMatrix) -> f64 {
    2.0 * rho.get(1, 3).abs()
        + 4.0 * rho.get(2, 4).abs()
        + 2.0 * rho.get(2, 6).abs()
        + 2.0 * rho.get(5, 7).abs()
}

/// Spectrum of a thermal-pattern state from its block structure:
/// three 2×2 blocks, two isolated diagonal entries and the symmetric 2×2
/// reduction of the central `|-1,1⟩, |0,0⟩, |1,-1⟩` block.
pub fn thermal_eigenvalues(rho: &SymMatrix) -> [f64; 9] {
    let (r11, r13) = (rho.get(1, 1), rho.get(1, 3));
    let (r55, r57) = (rho.get(5, 5), rho.get(5, 7));
    let (r22, r24, r26, r44) = (rho.get(2, 2), rho.get(2, 4), rho.get(2, 6), rho.get(4, 4));
    let sym = r22 + r26;
    let root = (8.0 * r24 * r24 + (sym - r44).powi(2)).sqrt();
    [
        r11 + r13,
        r11 - r13,
        r55 + r57,
        r55 - r57,
        rho.get(0, 0),
        r22 - r26,
        rho.get(8, 8),
        0.5 * (sym + r44 + root),
        0.5 * (sym + r44 - root),
    ]
}

/// Relative entropy of coherence from [`thermal_eigenvalues`].
pub fn coherence_relative_thermal(rho: &SymMatrix) -> f64 {
    let mu: Vec<f64> = thermal_eigenvalues(rho)
        .into_iter()
        .map(clamp_psd)
        .collect();
    let diag: Vec<f64> = rho.diagonal().into_iter().map(clamp_psd).collect();
    (entropy_terms(&diag) - entropy_terms(&mu)).max(0.0)
}

/// The published hyperbolic expression for the negativity of a thermal-pattern
/// state, evaluated literally (with `Z = 1` since `rho` is normalized):
///
/// `½[√(ρ₀₀²+ρ₁₃²+ρ₂₆²) + 2√(ρ₁₁²+ρ₂₄²) + 2√(ρ₂₄²+ρ₅₅²) + √(ρ₁₃²+ρ₄₄²+ρ₅₇²)
///   + 2|ρ₂₂| + √(ρ₂₆²+ρ₅₇²+ρ₈₈²) - 1]`.
///
/// This is a sum of row norms of the partially transposed blocks, not of
/// absolute eigenvalues, so it disagrees with [`negativity`] away from
/// special points.
pub fn negativity_row_norm_form(ts: &ThermalState) -> f64 {
    let r = &ts.rho;
    let g = |i: usize, j: usize| r.get(i, j);
    let hyp = |xs: &[f64]| xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    0.5 * (hyp(&[g(0, 0), g(1, 3), g(2, 6)])
        + 2.0 * hyp(&[g(1, 1), g(2, 4)])
        + 2.0 * hyp(&[g(2, 4), g(5, 5)])
        + hyp(&[g(1, 3), g(4, 4), g(5, 7)])
        + 2.0 * g(2, 2).abs()
        + hyp(&[g(2, 6), g(5, 7), g(8, 8)])
        - r.trace())
}

/// Zero-temperature entanglement plateaus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// Negativity 1: maximally entangled.
    RegionI,
    /// Negativity 1/2: partially entangled.
    RegionII,
    /// Negativity 0: separable (up to bound entanglement).
    RegionIII,
    Unclassified,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::RegionI => "RegionI",
            Phase::RegionII => "RegionII",
            Phase::RegionIII => "RegionIII",
            Phase::Unclassified => "Unclassified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "RegionI" => Some(Phase::RegionI),
            "RegionII" => Some(Phase::RegionII),
            "RegionIII" => Some(Phase::RegionIII),
            "Unclassified" => Some(Phase::Unclassified),
            _ => None,
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_phase(n: f64, tol: f64) -> Phase {
    if (n - 1.0).abs() <= tol {
        Phase::RegionI
    } else if (n - 0.5).abs() <= tol {
        Phase::RegionII
    } else if n <= tol {
        Phase::RegionIII
    } else {
        Phase::Unclassified
    }
}

/// All quantifiers at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub c_l1: f64,
    pub c_r: f64,
    pub negativity: f64,
    pub steering_s: f64,
    pub steerable: bool,
    /// Set only for zero-temperature states.
    pub phase: Option<Phase>,
}

impl ResourceReport {
    /// Every quantity through its generic definition.
    pub fn evaluate(ts: &ThermalState) -> Result<Self> {
        validate_density(&ts.rho)?;
        let negativity = negativity_unchecked(&ts.rho)?;
        let steering = steering_value(&ts.rho)?;
        Ok(ResourceReport {
            c_l1: l1_unchecked(&ts.rho),
            c_r: relative_unchecked(&ts.rho)?,
            negativity,
            steering_s: steering.s_value,
            steerable: steering.steerable,
            phase: ts
                .t
                .is_zero()
                .then(|| classify_phase(negativity, PHASE_TOL)),
        })
    }

    /// Coherences and steering from the block-structure closed forms;
    /// negativity still from the trace norm. Requires the thermal sparsity
    /// pattern (any Gibbs or ground state of the dimer has it).
    pub fn evaluate_thermal(ts: &ThermalState) -> Result<Self> {
        if !ts.rho.is_finite() {
            return Err(Error::numeric("thermal state has non-finite entries"));
        }
        let negativity = negativity_unchecked(&ts.rho)?;
        let steering = steering_value_thermal(&ts.rho);
        Ok(ResourceReport {
            c_l1: coherence_l1_thermal(&ts.rho),
            c_r: coherence_relative_thermal(&ts.rho),
            negativity,
            steering_s: steering.s_value,
            steerable: steering.steerable,
            phase: ts
                .t
                .is_zero()
                .then(|| classify_phase(negativity, PHASE_TOL)),
        })
    }

    /// Largest absolute difference over the four real-valued quantifiers.
    pub fn max_deviation(&self, other: &ResourceReport) -> f64 {
        [
            (self.c_l1 - other.c_l1).abs(),
            (self.c_r - other.c_r).abs(),
            (self.negativity - other.negativity).abs(),
            (self.steering_s - other.steering_s).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
