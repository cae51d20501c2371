//! Closed-form statistics of a coherent state under the Gaussian number measurement.
//!
//! With Poisson weights `w_n = |α|^{2n} / n!`:
//!
//! ```text
//! P(n_m)     = e^{-|α|²} (2π δn²)^{-1/2} Σ_n w_n exp(-(n - n_m)² / (2 δn²))
//! ⟨â⟩_f(n_m) = α e^{-1/(8 δn²)} Σ_n w_n exp(-(n + ½ - n_m)² / (2 δn²))
//!                               / Σ_n w_n exp(-(n - n_m)² / (2 δn²))
//! ```
//!
//! Outcome averages are taken with weight `P(n_m) dn_m`:
//! `⟨Q⟩ = e^{-2π² δn²}`, `⟨⟨â⟩_f⟩ = α e^{-1/(8 δn²)}`, `⟨Q ⟨â⟩_f⟩ = -⟨Q⟩⟨⟨â⟩_f⟩`.

use std::f64::consts::PI;

use crate::fock::{check_amplitude, default_dimension};
use crate::measurement::Resolution;
use crate::{Amplitude, Error, Result};

/// Truncated Gaussian-sum series for one `(α, δn)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSeries {
    alpha: Amplitude,
    dn: Resolution,
    /// `ln(e^{-|α|²} w_n)` for `n < terms`.
    log_weights: Vec<f64>,
}

impl ClosedFormSeries {
    /// Series cut off at the default truncation dimension for `α`.
    pub fn new(alpha: Amplitude, dn: Resolution) -> Result<Self> {
        check_amplitude(alpha)?;
        Self::with_terms(alpha, dn, default_dimension(alpha.norm_sqr()))
    }

    /// Series over `n < terms`; use the state's dimension to mirror a truncated state exactly.
    pub fn with_terms(alpha: Amplitude, dn: Resolution, terms: usize) -> Result<Self> {
        check_amplitude(alpha)?;
        if terms == 0 {
            return Err(Error::InvalidTruncation("series needs at least one term".into()));
        }
        let mean = alpha.norm_sqr();
        let mut log_weights = Vec::with_capacity(terms);
        let mut lw = -mean;
        for n in 0..terms {
            log_weights.push(lw);
            lw += if mean > 0.0 {
                mean.ln() - ((n + 1) as f64).ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        Ok(Self { alpha, dn, log_weights })
    }

    pub fn alpha(&self) -> Amplitude {
        self.alpha
    }

    pub fn resolution(&self) -> Resolution {
        self.dn
    }

    pub fn terms(&self) -> usize {
        self.log_weights.len()
    }

    fn exponent(&self, n: usize, offset: f64, nm: f64) -> f64 {
        let d = self.dn.get();
        let x = n as f64 + offset - nm;
        self.log_weights[n] - x * x / (2.0 * d * d)
    }

    /// `P(n_m)`.
    pub fn outcome_density(&self, nm: f64) -> f64 {
        let d = self.dn.get();
        let sum: f64 = (0..self.terms()).map(|n| self.exponent(n, 0.0, nm).exp()).sum();
        sum / (2.0 * PI * d * d).sqrt()
    }

    /// `⟨â⟩_f(n_m)`. The coherence term pairs `|n⟩` with `|n+1⟩`, so it runs over `n + 1 < terms`.
    pub fn post_coherence(&self, nm: f64) -> Amplitude {
        let d = self.dn.get();
        let num: Vec<f64> = (0..self.terms() - 1).map(|n| self.exponent(n, 0.5, nm)).collect();
        let den: Vec<f64> = (0..self.terms()).map(|n| self.exponent(n, 0.0, nm)).collect();
        let shift = den.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return Amplitude::new(0.0, 0.0);
        }
        let num: f64 = num.iter().map(|e| (e - shift).exp()).sum();
        let den: f64 = den.iter().map(|e| (e - shift).exp()).sum();
        self.alpha * ((-1.0 / (8.0 * d * d)).exp() * num / den)
    }
}

pub fn coherent_outcome_density(alpha: Amplitude, dn: Resolution, nm: f64) -> Result<f64> {
    Ok(ClosedFormSeries::new(alpha, dn)?.outcome_density(nm))
}

pub fn coherent_post_coherence(alpha: Amplitude, dn: Resolution, nm: f64) -> Result<Amplitude> {
    Ok(ClosedFormSeries::new(alpha, dn)?.post_coherence(nm))
}

/// `⟨cos(2π n_m)⟩ = exp(-2π² δn²)`.
pub fn avg_quantization(dn: Resolution) -> f64 {
    let d = dn.get();
    (-2.0 * PI * PI * d * d).exp()
}

/// `⟨⟨â⟩_f⟩ = α exp(-1/(8 δn²))`.
pub fn avg_coherence(alpha: Amplitude, dn: Resolution) -> Amplitude {
    let d = dn.get();
    alpha * (-1.0 / (8.0 * d * d)).exp()
}

/// `⟨Q ⟨â⟩_f⟩ = -⟨Q⟩ ⟨⟨â⟩_f⟩`.
pub fn avg_product(alpha: Amplitude, dn: Resolution) -> Amplitude {
    -(avg_coherence(alpha, dn) * avg_quantization(dn))
}

/// `C(Q, ⟨â⟩_f) = ⟨Q⟨â⟩_f⟩ - ⟨Q⟩⟨⟨â⟩_f⟩ = -2 ⟨Q⟩ ⟨⟨â⟩_f⟩`.
pub fn correlation_closed(alpha: Amplitude, dn: Resolution) -> Amplitude {
    avg_product(alpha, dn) - avg_coherence(alpha, dn) * avg_quantization(dn)
}

/// Maximizer of `-C/α = 2 exp(-2π² δn² - 1/(8 δn²))` and the peak value.
///
/// Setting the derivative of the exponent to zero gives `δn⁴ = 1/(16π²)`, so
/// `δn* = (4π)^{-1/2}` and the exponent there is `-π`.
pub fn optimal_resolution() -> (f64, f64) {
    ((4.0 * PI).sqrt().recip(), 2.0 * (-PI).exp())
}
