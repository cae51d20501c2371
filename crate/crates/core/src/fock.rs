//! Truncated Fock-space states.
//!
//! A [`DensityMatrix`] holds `ρ_nm = ⟨n|ρ|m⟩` for `n, m < D`. Every constructor
//! returns an exactly Hermitian matrix with unit trace; positive
//! semidefiniteness is checked on demand through [`DensityMatrix::min_eigenvalue`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::factorial::ln_factorial;

use crate::{Amplitude, Error, Result};

/// Absolute tolerance for the Hermiticity and unit-trace checks.
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Default bound on the Poisson tail mass discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Truncation of the number basis to `|0⟩ … |D-1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    dim: usize,
    tail_tolerance: f64,
}

impl TruncationConfig {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTruncation("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    /// Dimension from the default rule `D = ceil(|α|² + 10·sqrt(|α|² + 1) + 20)`.
    pub fn for_amplitude(alpha: Amplitude) -> Result<Self> {
        check_amplitude(alpha)?;
        Self::new(default_dimension(alpha.norm_sqr()))
    }

    pub fn with_tail_tolerance(mut self, tail_tolerance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tail_tolerance) {
            return Err(Error::InvalidTruncation(format!(
                "tail tolerance {tail_tolerance} outside [0, 1)"
            )));
        }
        self.tail_tolerance = tail_tolerance;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }
}

/// Truncation dimension for a coherent state of mean photon number `mean`.
pub fn default_dimension(mean: f64) -> usize {
    (mean + 10.0 * (mean + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Poisson probability mass `Σ_{n ≥ dim} e^{-μ} μⁿ / n!`, summed in log space.
pub fn poisson_tail_mass(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return if dim == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = mean.ln();
    let mut n = dim;
    let mut term = (-mean + n as f64 * ln_mean - ln_factorial(n as u64)).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if n as f64 > mean && term <= sum * 1e-18 {
            break;
        }
    }
    sum
}

pub(crate) fn check_amplitude(alpha: Amplitude) -> Result<()> {
    if alpha.re.is_finite() && alpha.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAmplitude(alpha))
    }
}

/// A truncated density matrix in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates a matrix as a state: square, finite, Hermitian and unit trace
    /// within [`STATE_TOLERANCE`]. The stored matrix is made exactly Hermitian.
    pub fn new(elements: DMatrix<Complex64>) -> Result<Self> {
        let elements = hermitian_part(elements)?;
        let trace = real_trace(&elements);
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidTrace(trace));
        }
        Ok(Self { elements })
    }

    /// Like [`DensityMatrix::new`] but divides by the trace instead of requiring it to be 1.
    pub fn from_unnormalized(elements: DMatrix<Complex64>) -> Result<Self> {
        let mut elements = hermitian_part(elements)?;
        let trace = real_trace(&elements);
        if !trace.is_finite() || trace <= 0.0 {
            return Err(Error::InvalidTrace(trace));
        }
        elements /= Complex64::from(trace);
        Ok(Self { elements })
    }

    /// Wraps a matrix already known to be Hermitian with unit trace.
    pub(crate) fn from_normalized_unchecked(elements: DMatrix<Complex64>) -> Self {
        Self { elements }
    }

    /// Builds `ρ` from its upper triangle; `f(n, m)` is called for `n ≤ m`.
    pub(crate) fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 0..dim {
            m[(n, n)] = Complex64::new(f(n, n).re, 0.0);
            for k in n + 1..dim {
                let v = f(n, k);
                m[(n, k)] = v;
                m[(k, n)] = v.conj();
            }
        }
        m
    }

    /// `diag(1/D, …, 1/D)`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        TruncationConfig::new(dim)?;
        let p = Complex64::from(1.0 / dim as f64);
        Self::from_unnormalized(DMatrix::from_diagonal_element(dim, dim, p))
    }

    /// Random full-rank state `G G† / Tr(G G†)` with `G` a complex Ginibre matrix.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        TruncationConfig::new(dim)?;
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::from_unnormalized(&g * g.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<Complex64> {
        self.elements
    }

    /// Element `ρ_nm`.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.elements[(n, m)]
    }

    /// Number-state populations `ρ_nn`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.elements[(n, n)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.elements)
    }

    /// Smallest eigenvalue; O(D³), meant for validation paths.
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation `|ρ_nm - conj(ρ_mn)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.elements;
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for n in 0..d {
            for k in n..d {
                worst = worst.max((m[(n, k)] - m[(k, n)].conj()).norm());
            }
        }
        worst
    }
}

fn real_trace(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows()).map(|n| m[(n, n)].re).sum()
}

fn hermitian_part(mut m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::NotSquare(r, c));
    }
    if r == 0 {
        return Err(Error::InvalidTruncation("dimension must be at least 1".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut worst: f64 = 0.0;
    for n in 0..r {
        worst = worst.max(m[(n, n)].im.abs());
        for k in n + 1..r {
            worst = worst.max((m[(n, k)] - m[(k, n)].conj()).norm());
        }
    }
    let scale = (0..r).map(|n| m[(n, n)].re.abs()).sum::<f64>().max(1.0);
    if worst > STATE_TOLERANCE * scale {
        return Err(Error::NotHermitian(worst));
    }
    for n in 0..r {
        m[(n, n)].im = 0.0;
        for k in n + 1..r {
            let avg = (m[(n, k)] + m[(k, n)].conj()) * 0.5;
            m[(n, k)] = avg;
            m[(k, n)] = avg.conj();
        }
    }
    Ok(m)
}

/// Coherent state `|α⟩⟨α|` truncated to `cfg.dim()` and renormalized.
///
/// Amplitudes follow `c_0 = e^{-|α|²/2}`, `c_{n+1} = c_n α / sqrt(n+1)`, so no
/// factorial is ever formed.
pub fn make_coherent_state(alpha: Amplitude, cfg: TruncationConfig) -> Result<DensityMatrix> {
    check_amplitude(alpha)?;
    let dim = cfg.dim();
    let tail_mass = poisson_tail_mass(alpha.norm_sqr(), dim);
    if tail_mass > cfg.tail_tolerance() {
        return Err(Error::TruncationTooSmall {
            dim,
            tail_mass,
            tolerance: cfg.tail_tolerance(),
        });
    }
    let amps = coherent_amplitudes(alpha, dim);
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let amps: Vec<Complex64> = amps.iter().map(|c| c / norm.sqrt()).collect();
    let elements = DensityMatrix::from_upper_fn(dim, |n, m| amps[n] * amps[m].conj());
    Ok(DensityMatrix { elements })
}

/// Unnormalized number-basis amplitudes `⟨n|α⟩` for `n < dim`.
pub fn coherent_amplitudes(alpha: Amplitude, dim: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(dim);
    let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..dim {
        amps.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

/// Number state `|n⟩⟨n|`.
pub fn make_fock_state(n: usize, cfg: TruncationConfig) -> Result<DensityMatrix> {
    let dim = cfg.dim();
    if n >= dim {
        return Err(Error::IndexOutOfRange { index: n, dim });
    }
    let mut elements = DMatrix::zeros(dim, dim);
    elements[(n, n)] = Complex64::new(1.0, 0.0);
    Ok(DensityMatrix { elements })
}

/// `⟨â⟩ = Σ_n sqrt(n+1) ρ_{n+1,n}`.
pub fn annihilation_expectation(rho: &DensityMatrix) -> Amplitude {
    (0..rho.dim().saturating_sub(1))
        .map(|n| rho.get(n + 1, n) * ((n + 1) as f64).sqrt())
        .sum()
}

/// `⟨n̂⟩ = Σ_n n ρ_nn`.
pub fn number_expectation(rho: &DensityMatrix) -> f64 {
    rho.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}

/// `Tr(ρ²)`, evaluated as `Σ |ρ_nm|²` (valid for Hermitian `ρ`).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.elements().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(dim: usize) -> TruncationConfig {
        TruncationConfig::new(dim).unwrap()
    }

    #[test]
    fn vacuum_is_coherent_state_at_zero() {
        let rho = make_coherent_state(Complex64::new(0.0, 0.0), cfg(4)).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                let expect = if n == 0 && m == 0 { 1.0 } else { 0.0 };
                assert_eq!(rho.get(n, m), Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn coherent_three_moments() {
        let rho = make_coherent_state(Complex64::new(3.0, 0.0), cfg(40)).unwrap();
        assert_abs_diff_eq!(number_expectation(&rho), 9.0, epsilon = 1e-9);
        let a = annihilation_expectation(&rho);
        assert_abs_diff_eq!(a.re, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&rho), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn coherent_one_vacuum_population() {
        let rho = make_coherent_state(Complex64::new(1.0, 0.0), cfg(20)).unwrap();
        assert_abs_diff_eq!(rho.get(0, 0).re, (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.3678794, epsilon = 1e-7);
    }

    #[test]
    fn coherent_diagonal_is_poisson() {
        let alpha = Complex64::new(1.2, -2.1);
        let mean = alpha.norm_sqr();
        let rho = make_coherent_state(alpha, TruncationConfig::for_amplitude(alpha).unwrap()).unwrap();
        for (n, p) in rho.populations().iter().enumerate() {
            let poisson = (-mean + n as f64 * mean.ln() - ln_factorial(n as u64)).exp();
            assert_abs_diff_eq!(*p, poisson, epsilon = 1e-12);
        }
        let a = annihilation_expectation(&rho);
        assert_abs_diff_eq!(a.re, alpha.re, epsilon = 1e-11);
        assert_abs_diff_eq!(a.im, alpha.im, epsilon = 1e-11);
    }

    #[test]
    fn truncation_too_small_reports_tail() {
        match make_coherent_state(Complex64::new(3.0, 0.0), cfg(10)) {
            Err(Error::TruncationTooSmall { tail_mass, dim, .. }) => {
                assert_eq!(dim, 10);
                // P(N ≥ 10) for Poisson(9)
                assert_abs_diff_eq!(tail_mass, 0.41259, epsilon = 1e-4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn large_amplitude_no_overflow() {
        let alpha = Complex64::new(10.0, 0.0);
        let rho = make_coherent_state(alpha, cfg(200)).unwrap();
        assert!(rho.elements().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert_abs_diff_eq!(number_expectation(&rho), 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(annihilation_expectation(&rho).re, 10.0, epsilon = 1e-9);

        let c = TruncationConfig::for_amplitude(alpha).unwrap();
        assert_eq!(c.dim(), 221);
        assert!(poisson_tail_mass(100.0, c.dim()) < 1e-12);
        assert!(make_coherent_state(alpha, c).is_ok());
    }

    #[test]
    fn default_rule_values() {
        assert_eq!(default_dimension(9.0), 61);
        assert_eq!(default_dimension(1.0), 36);
        assert_eq!(default_dimension(0.0), 30);
    }

    #[test]
    fn fock_states() {
        let rho = make_fock_state(0, cfg(3)).unwrap();
        assert_eq!(rho.populations(), vec![1.0, 0.0, 0.0]);
        let rho = make_fock_state(2, cfg(5)).unwrap();
        assert_eq!(rho.populations(), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(annihilation_expectation(&rho), Complex64::new(0.0, 0.0));
        assert_eq!(purity(&rho), 1.0);
        assert!(matches!(
            make_fock_state(5, cfg(4)),
            Err(Error::IndexOutOfRange { index: 5, dim: 4 })
        ));
        let rho = make_fock_state(5, cfg(8)).unwrap();
        assert_eq!(number_expectation(&rho), 5.0);
    }

    #[test]
    fn two_level_superposition_coherence() {
        let h = Complex64::new(0.5, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[h, h, h, h]);
        let rho = DensityMatrix::new(m).unwrap();
        assert_abs_diff_eq!(annihilation_expectation(&rho).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mixed_purity() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(purity(&rho), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            DensityMatrix::new(DMatrix::from_row_slice(1, 2, &[one, z])),
            Err(Error::NotSquare(1, 2))
        ));
        assert!(matches!(
            DensityMatrix::new(DMatrix::from_row_slice(2, 2, &[one, z, z, one])),
            Err(Error::InvalidTrace(_))
        ));
        let off = Complex64::new(0.0, 0.3);
        let half = Complex64::new(0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(DMatrix::from_row_slice(2, 2, &[half, off, off, half])),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::new(DMatrix::from_row_slice(1, 1, &[Complex64::new(f64::NAN, 0.0)])),
            Err(Error::NonFinite)
        ));
        assert!(TruncationConfig::new(0).is_err());
        assert!(cfg(3).with_tail_tolerance(1.0).is_err());
        assert!(make_coherent_state(Complex64::new(f64::INFINITY, 0.0), cfg(3)).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let rho = DensityMatrix::random(12, &mut rng).unwrap();
            assert_eq!(rho.hermiticity_error(), 0.0);
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            assert!(rho.min_eigenvalue() >= -1e-10);
            let p = purity(&rho);
            assert!((1.0 / 12.0 - 1e-10..=1.0 + 1e-10).contains(&p));
        }
    }

    #[test]
    fn coherent_state_is_psd_and_exactly_hermitian() {
        let alpha = Complex64::new(-1.5, 2.0);
        let rho = make_coherent_state(alpha, TruncationConfig::for_amplitude(alpha).unwrap()).unwrap();
        assert_eq!(rho.hermiticity_error(), 0.0);
        assert!(rho.min_eigenvalue() >= -1e-10);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    }
}
