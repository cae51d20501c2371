//! Cross-module invariant suite.
//!
//! Each check compares two independent routes to the same quantity and passes
//! when the largest deviation is within its tolerance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytics::{correlation_closed, ClosedFormSeries};
use crate::correlation::{correlation_numeric, operator_correlation_with_parity, parity_diagonal};
use crate::fock::{annihilation_expectation, make_coherent_state, DensityMatrix, TruncationConfig};
use crate::measurement::{
    apply_measurement, default_grid, kernel, nonselective_update, outcome_density, outcome_moments, Resolution,
};
use crate::quadrature::{trapezoid, trapezoid_weight};
use crate::{Amplitude, Result};

/// Seed for the random states of the ordering-identity check.
pub const RANDOM_STATE_SEED: u64 = 0x5EED_0016;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Flip the sign of the `n = 1` parity entry, for exercising the failure path.
    pub parity_fault: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub description: &'static str,
    /// Largest observed deviation.
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

impl CheckResult {
    fn from_deviation(name: &'static str, description: &'static str, tolerance: f64, deviation: Result<f64>) -> Self {
        match deviation {
            Ok(d) => Self {
                name,
                description,
                deviation: d,
                tolerance,
                passed: d <= tolerance,
                error: None,
            },
            Err(e) => Self {
                name,
                description,
                deviation: f64::NAN,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    }
}

fn amp(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

fn dual_path(coherence: bool) -> Result<f64> {
    let alpha = amp(3.0);
    let dn = Resolution::new(0.3)?;
    let rho = make_coherent_state(alpha, TruncationConfig::new(40)?)?;
    let series = ClosedFormSeries::with_terms(alpha, dn, 40)?;
    let grid = default_grid(&rho, dn, 1.0)?;
    let mut worst: f64 = 0.0;
    for nm in grid.points() {
        if coherence {
            let m = outcome_moments(&rho, dn, nm);
            if m.density > 1e-12 {
                let a = m.post_coherence().expect("density above floor");
                worst = worst.max((a - series.post_coherence(nm)).norm());
            }
        } else {
            worst = worst.max((outcome_density(&rho, dn, nm) - series.outcome_density(nm)).abs());
        }
    }
    Ok(worst)
}

fn povm_completeness() -> Result<f64> {
    let dn = Resolution::new(0.3)?;
    let rho = DensityMatrix::maximally_mixed(40)?;
    let grid = default_grid(&rho, dn, 1.0)?;
    Ok((0..40)
        .map(|n| (trapezoid(&grid, |x| kernel(dn, x, n).powi(2)) - 1.0).abs())
        .fold(0.0, f64::max))
}

fn normalization() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in [0.0, 1.0, 3.0] {
        let alpha = amp(a);
        let rho = make_coherent_state(alpha, TruncationConfig::for_amplitude(alpha)?)?;
        for d in [0.1, 0.3, 1.0] {
            let dn = Resolution::new(d)?;
            let grid = default_grid(&rho, dn, 1.0)?;
            worst = worst.max((trapezoid(&grid, |x| outcome_density(&rho, dn, x)) - 1.0).abs());
        }
    }
    Ok(worst)
}

fn random_states() -> Result<Vec<DensityMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_STATE_SEED);
    (0..100).map(|_| DensityMatrix::random(32, &mut rng)).collect()
}

fn parity(opts: &VerifyOptions, dim: usize) -> Vec<f64> {
    let mut p = parity_diagonal(dim);
    if opts.parity_fault && dim > 1 {
        p[1] = -p[1];
    }
    p
}

fn ordering_identity(opts: &VerifyOptions) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for rho in random_states()? {
        let c = operator_correlation_with_parity(&rho, &parity(opts, rho.dim()))?;
        worst = worst.max((c + annihilation_expectation(&rho) * 2.0).norm());
    }
    Ok(worst)
}

fn quantization_operator(opts: &VerifyOptions) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for rho in random_states()? {
        let p = parity(opts, rho.dim());
        let q: f64 = rho.populations().iter().zip(&p).map(|(x, s)| s * s * x).sum();
        worst = worst.max((q - 1.0).abs());
    }
    Ok(worst)
}

fn closed_form_correlation() -> Result<f64> {
    let alpha = amp(3.0);
    let rho = make_coherent_state(alpha, TruncationConfig::for_amplitude(alpha)?)?;
    let mut worst: f64 = 0.0;
    for d in [0.1, 0.2, 0.3, 0.5, 1.0] {
        let dn = Resolution::new(d)?;
        let report = correlation_numeric(&rho, dn, &default_grid(&rho, dn, 1.0)?)?;
        let closed = correlation_closed(alpha, dn);
        worst = worst.max((report.c - closed).norm() / closed.norm());
    }
    Ok(worst)
}

/// Largest elementwise gap between the trapezoid sum of `P(n_m) ρ_f(n_m)` and
/// the closed-form damped state, for `α = 2`, `δn = 0.3`, `D = 25`.
pub fn nonselective_quadrature_gap() -> Result<f64> {
    let alpha = amp(2.0);
    let dn = Resolution::new(0.3)?;
    // Poisson(4) mass beyond 25 is 1.6e-12
    let cfg = TruncationConfig::new(25)?.with_tail_tolerance(1e-11)?;
    let rho = make_coherent_state(alpha, cfg)?;
    let grid = default_grid(&rho, dn, 1.0)?;
    let mut acc = DMatrix::<Complex64>::zeros(rho.dim(), rho.dim());
    let len = grid.len();
    for (i, nm) in grid.points().enumerate() {
        let rec = apply_measurement(&rho, dn, nm)?;
        let w = trapezoid_weight(i, len, grid.step()) * rec.density;
        acc += rec.post_state.elements() * Complex64::from(w);
    }
    let closed = nonselective_update(&rho, dn);
    Ok((acc - closed.elements()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Runs every check in a fixed order.
pub fn run_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    vec![
        CheckResult::from_deviation(
            "dual-path-density",
            "operator P(n_m) vs closed-form series, alpha=3 dn=0.3 D=40",
            1e-9,
            dual_path(false),
        ),
        CheckResult::from_deviation(
            "dual-path-coherence",
            "operator <a>_f vs closed-form series where P > 1e-12",
            1e-9,
            dual_path(true),
        ),
        CheckResult::from_deviation(
            "povm-completeness",
            "trapezoid integral of g_n^2 for every n < 40, dn=0.3",
            1e-9,
            povm_completeness(),
        ),
        CheckResult::from_deviation(
            "normalization",
            "trapezoid integral of P for alpha in {0,1,3}, dn in {0.1,0.3,1}",
            1e-6,
            normalization(),
        ),
        CheckResult::from_deviation(
            "ordering-identity",
            "<Pi a Pi> - <Pi^2><a> + 2<a> on 100 random states, D=32",
            1e-12,
            ordering_identity(opts),
        ),
        CheckResult::from_deviation(
            "quantization-operator",
            "<(-1)^(2n)> - 1 on 100 random states, D=32",
            1e-12,
            quantization_operator(opts),
        ),
        CheckResult::from_deviation(
            "closed-form-correlation",
            "relative gap of quadrature C vs closed form, alpha=3",
            1e-6,
            closed_form_correlation(),
        ),
        CheckResult::from_deviation(
            "nonselective-quadrature",
            "quadrature of P rho_f vs Gaussian damping, alpha=2 dn=0.3 D=25",
            1e-8,
            nonselective_quadrature_gap(),
        ),
    ]
}

pub fn first_failure(results: &[CheckResult]) -> Option<&CheckResult> {
    results.iter().find(|r| !r.passed)
}
