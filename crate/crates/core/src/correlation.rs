//! Correlation between the quantization `Q = cos(2π n_m)` of a result and the
//! coherence `⟨â⟩_f(n_m)` left behind, plus the parity-ordering identity
//! `⟨Π â Π⟩ - ⟨Π²⟩⟨â⟩ = -2⟨â⟩` with `Π = (-1)^n̂`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{annihilation_expectation, make_coherent_state, DensityMatrix, TruncationConfig};
use crate::measurement::{grid_for_dimension, outcome_moments, OutcomeGrid, Resolution};
use crate::quadrature::{trapezoid_weight, CompensatedSum, ComplexSum};
use crate::{Amplitude, Error, Result};

/// Largest allowed deviation of `∫ P dn_m` from 1 on a correlation grid.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// `Q(n_m) = cos(2π n_m)`.
pub fn quantization(nm: f64) -> f64 {
    (2.0 * PI * nm).cos()
}

/// Outcome-weighted averages at one resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub dn: Resolution,
    /// `∫ Q P dn_m`.
    pub avg_q: f64,
    /// `∫ ⟨â⟩_f P dn_m`.
    pub avg_a: Amplitude,
    /// `∫ Q ⟨â⟩_f P dn_m`.
    pub avg_qa: Amplitude,
    /// `avg_qa - avg_q·avg_a`.
    pub c: Amplitude,
    /// `∫ P dn_m` on the grid used.
    pub norm: f64,
    pub grid: OutcomeGrid,
}

impl CorrelationReport {
    /// `|c - (avg_qa - avg_q·avg_a)|`; zero up to rounding by construction.
    pub fn consistency_error(&self) -> f64 {
        (self.c - (self.avg_qa - self.avg_a * self.avg_q)).norm()
    }
}

/// Trapezoid estimate of the correlation for an arbitrary state.
///
/// The integrands use `P·⟨â⟩_f = Tr{â P̂ρP̂}` directly, so outcomes where `P`
/// underflows contribute nothing instead of `0/0`.
pub fn correlation_numeric(rho: &DensityMatrix, dn: Resolution, grid: &OutcomeGrid) -> Result<CorrelationReport> {
    let len = grid.len();
    let mut norm = CompensatedSum::default();
    let mut avg_q = CompensatedSum::default();
    let mut avg_a = ComplexSum::default();
    let mut avg_qa = ComplexSum::default();
    for (i, nm) in grid.points().enumerate() {
        let w = trapezoid_weight(i, len, grid.step());
        let m = outcome_moments(rho, dn, nm);
        let q = quantization(nm);
        norm.add(w * m.density);
        avg_q.add(w * q * m.density);
        avg_a.add(m.weighted_coherence * w);
        avg_qa.add(m.weighted_coherence * (w * q));
    }
    let norm = norm.value();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::GridInsufficient { integral: norm });
    }
    let avg_q = avg_q.value();
    let avg_a = avg_a.value();
    let avg_qa = avg_qa.value();
    Ok(CorrelationReport {
        dn,
        avg_q,
        avg_a,
        avg_qa,
        c: avg_qa - avg_a * avg_q,
        norm,
        grid: *grid,
    })
}

/// Bare integrals `∫ Q dn_m`, `∫ ⟨â⟩_f dn_m`, `∫ Q ⟨â⟩_f dn_m` without the outcome weight.
///
/// These depend on the grid extent and are only reported for comparison with the
/// weighted averages. Outcomes with `P ≤ DENSITY_FLOOR` have no defined `⟨â⟩_f`
/// and are skipped; their count is returned in `skipped`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnweightedIntegrals {
    pub int_q: f64,
    pub int_a: Amplitude,
    pub int_qa: Amplitude,
    pub c: Amplitude,
    pub skipped: usize,
}

pub fn unweighted_integrals(rho: &DensityMatrix, dn: Resolution, grid: &OutcomeGrid) -> UnweightedIntegrals {
    let len = grid.len();
    let mut int_q = CompensatedSum::default();
    let mut int_a = ComplexSum::default();
    let mut int_qa = ComplexSum::default();
    let mut skipped = 0;
    for (i, nm) in grid.points().enumerate() {
        let w = trapezoid_weight(i, len, grid.step());
        let q = quantization(nm);
        int_q.add(w * q);
        match outcome_moments(rho, dn, nm).post_coherence() {
            Some(a) => {
                int_a.add(a * w);
                int_qa.add(a * (w * q));
            }
            None => skipped += 1,
        }
    }
    let (int_q, int_a, int_qa) = (int_q.value(), int_a.value(), int_qa.value());
    UnweightedIntegrals {
        int_q,
        int_a,
        int_qa,
        c: int_qa - int_a * int_q,
        skipped,
    }
}

/// What a resolution sweep measures.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSource {
    State(DensityMatrix),
    /// Coherent state at the default truncation for `α`.
    Coherent(Amplitude),
}

impl SweepSource {
    pub fn state(&self) -> Result<DensityMatrix> {
        match self {
            SweepSource::State(rho) => Ok(rho.clone()),
            SweepSource::Coherent(alpha) => make_coherent_state(*alpha, TruncationConfig::for_amplitude(*alpha)?),
        }
    }
}

/// One report per resolution, each on its default grid scaled by `refinement`.
///
/// Points are evaluated in parallel; the output order matches `dn_values`.
pub fn resolution_sweep(
    source: &SweepSource,
    dn_values: &[Resolution],
    refinement: f64,
) -> Result<Vec<CorrelationReport>> {
    if dn_values.is_empty() {
        return Err(Error::InvalidParameter(
            "resolution sweep needs at least one value".into(),
        ));
    }
    let rho = source.state()?;
    dn_values
        .par_iter()
        .map(|&dn| {
            grid_for_dimension(rho.dim(), dn, refinement)
                .and_then(|grid| correlation_numeric(&rho, dn, &grid))
                .map_err(|e| Error::AtResolution {
                    dn: dn.get(),
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Diagonal of `(-1)^n̂`.
pub fn parity_diagonal(dim: usize) -> Vec<f64> {
    (0..dim).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

/// `⟨Π â Π⟩ - ⟨Π²⟩⟨â⟩` for an explicit parity diagonal `Π`.
pub fn operator_correlation_with_parity(rho: &DensityMatrix, parity: &[f64]) -> Result<Amplitude> {
    let dim = rho.dim();
    if parity.len() != dim {
        return Err(Error::DimensionMismatch(parity.len(), dim));
    }
    // (Π â Π)_{n,n+1} = Π_n sqrt(n+1) Π_{n+1}; Tr{M ρ} = Σ M_{n,n+1} ρ_{n+1,n}
    let sandwiched: Complex64 = (0..dim.saturating_sub(1))
        .map(|n| rho.get(n + 1, n) * (parity[n] * ((n + 1) as f64).sqrt() * parity[n + 1]))
        .sum();
    let q = quantization_expectation_with_parity(rho, parity);
    Ok(sandwiched - annihilation_expectation(rho) * q)
}

fn quantization_expectation_with_parity(rho: &DensityMatrix, parity: &[f64]) -> f64 {
    rho.populations().iter().zip(parity).map(|(p, s)| s * s * p).sum()
}

/// `⟨(-1)^n̂ â (-1)^n̂⟩ - ⟨(-1)^{2n̂}⟩⟨â⟩`, which equals `-2⟨â⟩` for every state.
pub fn operator_correlation(rho: &DensityMatrix) -> Amplitude {
    operator_correlation_with_parity(rho, &parity_diagonal(rho.dim())).expect("parity matches dimension")
}

/// `⟨(-1)^{2n̂}⟩`, computed as `⟨Π Π⟩` from the parity diagonal.
pub fn quantization_operator_expectation(rho: &DensityMatrix) -> f64 {
    quantization_expectation_with_parity(rho, &parity_diagonal(rho.dim()))
}
