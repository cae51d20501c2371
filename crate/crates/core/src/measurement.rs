//! Finite-resolution photon-number measurement.
//!
//! The measurement operator is a Gaussian function of `n̂`, so it is stored as
//! its diagonal `g_n(n_m) = (2π δn²)^(-1/4) exp(-(n_m - n)² / (4 δn²))`. The
//! selective update multiplies `ρ_nm` by `g_n g_m / P(n_m)`; averaging over all
//! outcomes gives the closed-form damping `exp(-(n - m)² / (8 δn²))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fock::{annihilation_expectation, DensityMatrix};
use crate::{Amplitude, Error, Result};

/// Outcomes with `P(n_m)` at or below this value cannot be conditioned on.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Kernel offsets `|n_m - n|` beyond this many `δn` give `g_n = 0` exactly in f64
/// (`exp(-55²/4)` underflows), so those terms are skipped.
const KERNEL_CUTOFF: f64 = 55.0;

/// Measurement resolution `δn > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Resolution(f64);

impl Resolution {
    pub fn new(dn: f64) -> Result<Self> {
        if dn > 0.0 && dn.is_finite() {
            Ok(Self(dn))
        } else {
            Err(Error::InvalidResolution(dn))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Range of number states whose kernel value at `nm` is nonzero in f64.
    fn support(self, nm: f64, dim: usize) -> std::ops::Range<usize> {
        let reach = KERNEL_CUTOFF * self.0;
        let lo = (nm - reach).ceil().max(0.0);
        let hi = (nm + reach).floor() + 1.0;
        if hi <= 0.0 || lo >= dim as f64 {
            return 0..0;
        }
        lo as usize..(hi.min(dim as f64) as usize)
    }
}

/// `g_n(n_m)`, the diagonal of the measurement operator.
pub fn kernel(dn: Resolution, nm: f64, n: usize) -> f64 {
    let d = dn.get();
    let x = nm - n as f64;
    (2.0 * PI * d * d).powf(-0.25) * (-x * x / (4.0 * d * d)).exp()
}

/// Diagonal measurement operator for one outcome `n_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    resolution: Resolution,
    nm: f64,
    diag: Vec<f64>,
}

impl MeasurementOperator {
    pub fn new(dn: Resolution, nm: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTruncation("dimension must be at least 1".into()));
        }
        if !nm.is_finite() {
            return Err(Error::InvalidParameter(format!("outcome n_m = {nm} is not finite")));
        }
        let diag = (0..dim).map(|n| kernel(dn, nm, n)).collect();
        Ok(Self {
            resolution: dn,
            nm,
            diag,
        })
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn outcome(&self) -> f64 {
        self.nm
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

pub fn make_measurement_operator(dn: Resolution, nm: f64, dim: usize) -> Result<MeasurementOperator> {
    MeasurementOperator::new(dn, nm, dim)
}

/// One measurement outcome with its density and conditional state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub nm: f64,
    /// `P(n_m)`, per unit `n_m`.
    pub density: f64,
    pub post_state: DensityMatrix,
    /// `⟨â⟩_f(n_m)`.
    pub post_coherence: Amplitude,
}

/// `P(n_m) = Tr{P̂ ρ P̂} = Σ_n g_n ρ_nn g_n`.
pub fn outcome_density(rho: &DensityMatrix, dn: Resolution, nm: f64) -> f64 {
    dn.support(nm, rho.dim())
        .map(|n| {
            let g = kernel(dn, nm, n);
            g * rho.get(n, n).re * g
        })
        .sum()
}

/// `P(n_m)` together with `Tr{â P̂ ρ P̂} = P(n_m)·⟨â⟩_f(n_m)`, in O(D).
///
/// The second value stays finite where `P(n_m)` underflows, so it is the one
/// to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeMoments {
    pub density: f64,
    pub weighted_coherence: Amplitude,
}

impl OutcomeMoments {
    pub fn post_coherence(&self) -> Option<Amplitude> {
        (self.density > DENSITY_FLOOR).then(|| self.weighted_coherence / self.density)
    }
}

pub fn outcome_moments(rho: &DensityMatrix, dn: Resolution, nm: f64) -> OutcomeMoments {
    let range = dn.support(nm, rho.dim());
    let mut density = 0.0;
    let mut weighted = Complex64::new(0.0, 0.0);
    let mut prev: Option<f64> = None;
    for n in range {
        let g = kernel(dn, nm, n);
        density += g * rho.get(n, n).re * g;
        if let Some(g_prev) = prev {
            // ρ_{n,n-1} couples to â through sqrt(n)
            weighted += rho.get(n, n - 1) * (g * g_prev * (n as f64).sqrt());
        }
        prev = Some(g);
    }
    OutcomeMoments {
        density,
        weighted_coherence: weighted,
    }
}

/// Selective update `ρ_f = P̂ ρ P̂ / P(n_m)`.
pub fn apply_measurement(rho: &DensityMatrix, dn: Resolution, nm: f64) -> Result<MeasurementRecord> {
    let op = MeasurementOperator::new(dn, nm, rho.dim())?;
    let g = op.diagonal();
    let density: f64 = (0..rho.dim()).map(|n| g[n] * rho.get(n, n).re * g[n]).sum();
    if density.is_nan() || density <= DENSITY_FLOOR {
        return Err(Error::NegligibleOutcome { nm, density });
    }
    let elements = DensityMatrix::from_upper_fn(rho.dim(), |n, m| rho.get(n, m) * (g[n] * g[m] / density));
    let post_state = DensityMatrix::from_normalized_unchecked(elements);
    let post_coherence = annihilation_expectation(&post_state);
    Ok(MeasurementRecord {
        nm,
        density,
        post_state,
        post_coherence,
    })
}

/// Outcome-averaged state `∫ P̂ ρ P̂ dn_m`: `ρ_nm · exp(-(n - m)² / (8 δn²))`.
pub fn nonselective_update(rho: &DensityMatrix, dn: Resolution) -> DensityMatrix {
    let d = dn.get();
    let elements = DensityMatrix::from_upper_fn(rho.dim(), |n, m| {
        let k = n as f64 - m as f64;
        rho.get(n, m) * (-k * k / (8.0 * d * d)).exp()
    });
    DensityMatrix::from_normalized_unchecked(elements)
}

/// Uniform grid `lo, lo + step, …, hi` over outcomes `n_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeGrid {
    lo: f64,
    hi: f64,
    step: f64,
    intervals: usize,
}

impl OutcomeGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidGrid(format!("lo = {lo} must be below hi = {hi}")));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step = {step} must be positive")));
        }
        let ratio = (hi - lo) / step;
        let intervals = ratio.round();
        if (ratio - intervals).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!(
                "span {} is not a whole number of steps {step}",
                hi - lo
            )));
        }
        Ok(Self {
            lo,
            hi,
            step,
            intervals: intervals as usize,
        })
    }

    /// Grid on `[lo, hi]` with the largest step not above `min(δn / (30·refinement), 0.05)`
    /// that divides the span.
    pub fn fitted(lo: f64, hi: f64, dn: Resolution, refinement: f64) -> Result<Self> {
        if !refinement.is_finite() || refinement < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "refinement {refinement} must be at least 1"
            )));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidGrid(format!(
                "bounds [{lo}, {hi}] must be finite and increasing"
            )));
        }
        let max_step = (dn.get() / (30.0 * refinement)).min(0.05);
        let intervals = ((hi - lo) / max_step - 1e-9).ceil().max(1.0);
        Self::new(lo, hi, (hi - lo) / intervals)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// Grid covering `[-8 δn, D - 1 + 8 δn]` with spacing at most `min(δn / (30·refinement), 0.05)`.
///
/// The spacing is shrunk, if needed, so that the span is a whole number of steps.
pub fn default_grid(rho: &DensityMatrix, dn: Resolution, refinement: f64) -> Result<OutcomeGrid> {
    grid_for_dimension(rho.dim(), dn, refinement)
}

pub fn grid_for_dimension(dim: usize, dn: Resolution, refinement: f64) -> Result<OutcomeGrid> {
    let d = dn.get();
    OutcomeGrid::fitted(-8.0 * d, (dim as f64 - 1.0) + 8.0 * d, dn, refinement)
}
