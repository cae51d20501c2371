//! Finite-resolution photon-number measurements on truncated Fock-space states.
//!
//! The crate models a single optical mode in a truncated number basis and
//! applies a Gaussian measurement of the photon number with resolution `δn`:
//!
//! ```text
//! P̂(n_m) = (2π δn²)^(-1/4) exp(-(n_m - n̂)² / (4 δn²))
//! P(n_m)  = Tr{ P̂ ρ P̂ }
//! ρ_f     = P̂ ρ P̂ / P(n_m)
//! ```
//!
//! Modules:
//!
//! - [`fock`]: density matrices, coherent and number states, expectation values.
//! - [`measurement`]: measurement operators, outcome densities, state updates, outcome grids.
//! - [`analytics`]: closed-form coherent-state statistics and correlation.
//! - [`correlation`]: quantization/coherence correlation by quadrature, sweeps, and the
//!   parity-ordering identity.
//! - [`trajectory`]: seeded Monte-Carlo sequences of repeated measurements.
//! - [`verify`]: the cross-module invariant suite behind `fockpovm verify`.

#![forbid(unsafe_code)]

pub mod analytics;
pub mod correlation;
mod error;
pub mod fock;
pub mod measurement;
pub mod quadrature;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, TruncationConfig};
pub use measurement::{MeasurementOperator, MeasurementRecord, OutcomeGrid, Resolution};

/// Complex amplitudes (`α`, `⟨â⟩`) are plain `Complex64` values.
pub type Amplitude = num_complex::Complex64;
