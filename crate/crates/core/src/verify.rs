//! Seeded cross-checks between every closed form and its numeric counterpart.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eig;
use crate::measures::{
    coherence_l1, coherence_l1_thermal, coherence_relative, coherence_relative_thermal, negativity,
    negativity_row_norm_form, ResourceReport,
};
use crate::model::{analytic_spectrum, build_hamiltonian, ModelParams};
use crate::steering::{
    joint_probabilities, joint_probabilities_thermal, marginals_thermal, steering_value,
    steering_value_thermal, Axis,
};
use crate::thermal::{gibbs_closed_form, gibbs_oracle, partition_function, Temperature};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 1000;

/// Parameter ranges of the random draws (units of `j = 1`).
pub const PARAM_RANGE: (f64, f64) = (-4.0, 4.0);
pub const T_RANGE: (f64, f64) = (0.05, 5.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Draw {
    pub delta: f64,
    pub d_ani: f64,
    pub h: f64,
    pub t: f64,
}

impl fmt::Display for Draw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "delta={:.17} d_ani={:.17} h={:.17} t={:.17}",
            self.delta, self.d_ani, self.h, self.t
        )
    }
}

pub fn draws(seed: u64, n: usize) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Draw {
            delta: rng.gen_range(PARAM_RANGE.0..=PARAM_RANGE.1),
            d_ani: rng.gen_range(PARAM_RANGE.0..=PARAM_RANGE.1),
            h: rng.gen_range(PARAM_RANGE.0..=PARAM_RANGE.1),
            t: rng.gen_range(T_RANGE.0..=T_RANGE.1),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_dev: f64,
    pub tol: f64,
    /// Informational checks are reported but never fail the run.
    pub hard: bool,
    pub worst: Option<Draw>,
}

impl CheckResult {
    fn new(name: &'static str, tol: f64, hard: bool) -> Self {
        CheckResult {
            name,
            max_dev: 0.0,
            tol,
            hard,
            worst: None,
        }
    }

    fn record(&mut self, dev: f64, draw: Draw) {
        // NaN is sticky and fails the check.
        if self.max_dev.is_nan() {
            return;
        }
        if dev.is_nan() || dev > self.max_dev || self.worst.is_none() {
            self.max_dev = if dev.is_nan() {
                dev
            } else {
                dev.max(self.max_dev)
            };
            self.worst = Some(draw);
        }
    }

    pub fn passed(&self) -> bool {
        !self.hard || self.max_dev <= self.tol
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if !self.hard {
            "INFO"
        } else if self.passed() {
            "PASS"
        } else {
            "FAIL"
        };
        write!(f, "{tag} {} max_dev={:.3e}", self.name, self.max_dev)?;
        if self.hard {
            write!(f, " tol={:.0e}", self.tol)?;
        }
        if !self.passed() || !self.hard {
            if let Some(d) = &self.worst {
                write!(f, " at {d}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify seed={} samples={}", self.seed, self.samples)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(
            f,
            "{} ({} hard checks, {failed} failed)",
            if failed == 0 { "OK" } else { "FAILED" },
            self.checks.iter().filter(|c| c.hard).count()
        )
    }
}

pub const CHECK_GIBBS: &str = "gibbs_closed_vs_oracle";
pub const CHECK_Z_TRACE: &str = "partition_function_vs_trace";
pub const CHECK_Z_SPECTRUM: &str = "partition_function_vs_spectrum";
pub const CHECK_SPECTRUM: &str = "spectrum_multiset";
pub const CHECK_RESIDUAL: &str = "eigenvector_residual";
pub const CHECK_ORTHONORMAL: &str = "eigenvector_orthonormality";
pub const CHECK_L1: &str = "c_l1_closed_vs_generic";
pub const CHECK_CR: &str = "c_r_closed_vs_generic";
pub const CHECK_JOINT: &str = "steering_joint_closed_vs_projector";
pub const CHECK_MARGINAL: &str = "steering_marginal_closed_vs_projector";
pub const CHECK_STEERING: &str = "steering_s_closed_vs_projector";
pub const CHECK_FIELD: &str = "field_reversal_symmetry";
pub const CHECK_NEG_ROWNORM: &str = "negativity_row_norm_form_vs_trace_norm";

/// Runs every check over `n` seeded draws. Errors only on invalid `n` or a
/// numerical failure; tolerance violations are reported in the result.
pub fn run_verification(seed: u64, n: usize) -> Result<VerifyReport> {
    if n == 0 {
        return Err(Error::invalid("verification needs at least one sample"));
    }
    let mut checks = vec![
        CheckResult::new(CHECK_GIBBS, 1e-10, true),
        CheckResult::new(CHECK_Z_TRACE, 1e-12, true),
        CheckResult::new(CHECK_Z_SPECTRUM, 1e-12, true),
        CheckResult::new(CHECK_SPECTRUM, 1e-10, true),
        CheckResult::new(CHECK_RESIDUAL, 1e-10, true),
        CheckResult::new(CHECK_ORTHONORMAL, 1e-12, true),
        CheckResult::new(CHECK_L1, 1e-12, true),
        CheckResult::new(CHECK_CR, 1e-10, true),
        CheckResult::new(CHECK_JOINT, 1e-10, true),
        CheckResult::new(CHECK_MARGINAL, 1e-10, true),
        CheckResult::new(CHECK_STEERING, 1e-10, true),
        CheckResult::new(CHECK_FIELD, 1e-9, true),
        CheckResult::new(CHECK_NEG_ROWNORM, f64::INFINITY, false),
    ];
    for draw in draws(seed, n) {
        let devs = check_draw(&draw)?;
        for (c, d) in checks.iter_mut().zip(devs) {
            c.record(d, draw);
        }
    }
    Ok(VerifyReport {
        seed,
        samples: n,
        checks,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Deviations in the order of the check list in [`run_verification`].
fn check_draw(draw: &Draw) -> Result<[f64; 13]> {
    let p = ModelParams::reduced(draw.delta, draw.d_ani, draw.h)?;
    let t = Temperature::new(draw.t)?;
    let beta = t.beta()?;

    let closed = gibbs_closed_form(&p, t)?;
    let oracle = gibbs_oracle(&p, t)?;
    let gibbs = closed.rho.max_abs_diff(&oracle.rho);

    let z_literal = partition_function(&p, t)?;
    let z_trace = rel(z_literal, oracle.z.unwrap_or(f64::NAN));
    let spec = analytic_spectrum(&p)?;
    let z_spectrum = rel(z_literal, spec.boltzmann_sum(beta));

    let h = build_hamiltonian(&p)?;
    let numeric = symmetric_eig(&h)?;
    let mut analytic = spec.energies;
    analytic.sort_by(f64::total_cmp);
    let spectrum = analytic
        .iter()
        .zip(&numeric.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / p.j;

    let e_scale = spec
        .energies
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()))
        .max(p.j);
    let mut residual: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for (i, psi) in spec.eigenvectors.iter().enumerate() {
        let hv = h.mat_vec(psi);
        let r = hv
            .iter()
            .zip(psi)
            .map(|(a, b)| (a - spec.energies[i] * b).powi(2))
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r / e_scale);
        for (k, other) in spec.eigenvectors.iter().enumerate() {
            let dot: f64 = psi.iter().zip(other).map(|(a, b)| a * b).sum();
            let expected = if i == k { 1.0 } else { 0.0 };
            ortho = ortho.max((dot - expected).abs());
        }
    }

    let rho = &closed.rho;
    let l1 = (coherence_l1_thermal(rho) - coherence_l1(rho)?).abs();
    let cr = (coherence_relative_thermal(rho) - coherence_relative(rho)?).abs();

    let mut joint: f64 = 0.0;
    let mut marginal: f64 = 0.0;
    for axis in Axis::ALL {
        let fast = joint_probabilities_thermal(rho, axis);
        let slow = joint_probabilities(rho, axis)?;
        for a in 0..3 {
            for b in 0..3 {
                joint = joint.max((fast[a][b] - slow[a][b]).abs());
            }
        }
        let m = marginals_thermal(rho, axis);
        for a in 0..3 {
            marginal = marginal.max((m[a] - slow[a].iter().sum::<f64>()).abs());
        }
    }
    let steering = (steering_value_thermal(rho).s_value - steering_value(rho)?.s_value).abs();

    let here = ResourceReport::evaluate_thermal(&closed)?;
    let mirrored =
        ResourceReport::evaluate_thermal(&gibbs_closed_form(&p.with_field_reversed(), t)?)?;
    let field = here.max_deviation(&mirrored);

    let rownorm = (negativity_row_norm_form(&closed) - negativity(rho)?).abs();

    Ok([
        gibbs, z_trace, z_spectrum, spectrum, residual, ortho, l1, cr, joint, marginal, steering,
        field, rownorm,
    ])
}
