//! Repeated finite-resolution number measurements on a single system.
//!
//! Outcomes are drawn from `P(n_m) = Σ_n ρ_nn N(n_m; n, δn²)` by first picking
//! `n` with probability `ρ_nn` and then adding Gaussian noise of width `δn`.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Shot `i` of an ensemble uses [`shot_seed`]`(seed, i)`:
//! the seed XORed with the SplitMix64 finalizer of `i · 0x9E3779B97F4A7C15`
//! (golden-ratio increments). Shot 0 therefore reuses the configured seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::fock::{number_expectation, purity, DensityMatrix};
use crate::measurement::{apply_measurement, Resolution};
use crate::quadrature::{CompensatedSum, ComplexSum};
use crate::{Amplitude, Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The generator every trajectory uses.
pub type TrajectoryRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub dn: Resolution,
    pub steps: usize,
    pub seed: u64,
    /// Keep every post-measurement state in the output.
    pub record_states: bool,
}

impl TrajectoryConfig {
    pub fn new(dn: Resolution, steps: usize, seed: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("a trajectory needs at least one step".into()));
        }
        Ok(Self {
            dn,
            steps,
            seed,
            record_states: false,
        })
    }

    pub fn recording_states(mut self) -> Self {
        self.record_states = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    /// 1-based measurement index.
    pub index: usize,
    pub nm: f64,
    pub post_number: f64,
    pub post_coherence: Amplitude,
    pub post_purity: f64,
    pub state: Option<DensityMatrix>,
}

fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for shot `index` of an ensemble started from `seed`.
pub fn shot_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64_finalize(index.wrapping_mul(GOLDEN_GAMMA))
}

/// One draw from the outcome density of `rho`.
pub fn sample_outcome<R: Rng + ?Sized>(rho: &DensityMatrix, dn: Resolution, rng: &mut R) -> f64 {
    let populations = rho.populations();
    let total: f64 = populations.iter().map(|p| p.max(0.0)).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = populations.len() - 1;
    for (n, p) in populations.iter().enumerate() {
        acc += p.max(0.0);
        if u < acc {
            pick = n;
            break;
        }
    }
    let z: f64 = rng.sample(StandardNormal);
    pick as f64 + dn.get() * z
}

pub fn run_trajectory(rho0: &DensityMatrix, cfg: &TrajectoryConfig) -> Result<Vec<TrajectoryStep>> {
    let mut rng = TrajectoryRng::seed_from_u64(cfg.seed);
    let mut rho = rho0.clone();
    let mut out = Vec::with_capacity(cfg.steps);
    for index in 1..=cfg.steps {
        let nm = sample_outcome(&rho, cfg.dn, &mut rng);
        let rec = apply_measurement(&rho, cfg.dn, nm).map_err(|e| Error::AtStep {
            step: index,
            source: Box::new(e),
        })?;
        rho = rec.post_state;
        out.push(TrajectoryStep {
            index,
            nm,
            post_number: number_expectation(&rho),
            post_coherence: rec.post_coherence,
            post_purity: purity(&rho),
            state: cfg.record_states.then(|| rho.clone()),
        });
    }
    Ok(out)
}

/// Shot averages at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStep {
    pub index: usize,
    pub mean_number: f64,
    pub mean_coherence: Amplitude,
    pub mean_purity: f64,
    /// Standard error of `mean_coherence`, per component.
    pub coherence_std_error: Amplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub steps: Vec<EnsembleStep>,
    /// `⟨n̂⟩` after the last step, by shot index.
    pub final_numbers: Vec<f64>,
    /// Purity after the last step, by shot index.
    pub final_purities: Vec<f64>,
}

impl EnsembleStats {
    pub fn median_final_purity(&self) -> f64 {
        median(&self.final_purities)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Runs `shots` independent trajectories and averages them step by step.
///
/// Shots run in parallel; reductions run serially in shot order, so the result
/// does not depend on scheduling.
pub fn ensemble_stats(rho0: &DensityMatrix, cfg: &TrajectoryConfig, shots: usize) -> Result<EnsembleStats> {
    if shots == 0 {
        return Err(Error::InvalidParameter("an ensemble needs at least one shot".into()));
    }
    let runs: Vec<Vec<TrajectoryStep>> = (0..shots as u64)
        .into_par_iter()
        .map(|i| {
            let shot_cfg = TrajectoryConfig {
                seed: shot_seed(cfg.seed, i),
                record_states: false,
                ..*cfg
            };
            run_trajectory(rho0, &shot_cfg)
        })
        .collect::<Result<_>>()?;

    let n = shots as f64;
    let steps = (0..cfg.steps)
        .map(|k| {
            let mut number = CompensatedSum::default();
            let mut purity = CompensatedSum::default();
            let mut coherence = ComplexSum::default();
            for run in &runs {
                number.add(run[k].post_number);
                purity.add(run[k].post_purity);
                coherence.add(run[k].post_coherence);
            }
            let mean_coherence = coherence.value() / n;
            let mut spread = ComplexSum::default();
            for run in &runs {
                let d = run[k].post_coherence - mean_coherence;
                spread.add(Complex64::new(d.re * d.re, d.im * d.im));
            }
            let coherence_std_error = if shots > 1 {
                let var = spread.value() / (n - 1.0);
                Complex64::new((var.re / n).sqrt(), (var.im / n).sqrt())
            } else {
                Complex64::new(0.0, 0.0)
            };
            EnsembleStep {
                index: k + 1,
                mean_number: number.value() / n,
                mean_coherence,
                mean_purity: purity.value() / n,
                coherence_std_error,
            }
        })
        .collect();
    let last = cfg.steps - 1;
    Ok(EnsembleStats {
        steps,
        final_numbers: runs.iter().map(|r| r[last].post_number).collect(),
        final_purities: runs.iter().map(|r| r[last].post_purity).collect(),
    })
}

/// Pearson chi-square comparison of observed counts against expected probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    /// `(first bin, last bin)` of each pooled class, after merging sparse bins.
    pub classes: Vec<(usize, usize)>,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pools adjacent bins, from the top down, until every class expects at least
/// `min_expected` counts; then computes the statistic with `classes - 1` degrees of freedom.
pub fn chi_square_test(counts: &[u64], probabilities: &[f64], min_expected: f64) -> Result<ChiSquareTest> {
    if counts.len() != probabilities.len() || counts.is_empty() {
        return Err(Error::DimensionMismatch(counts.len(), probabilities.len()));
    }
    let total: u64 = counts.iter().sum();
    let prob_sum: f64 = probabilities.iter().sum();
    let mut classes: Vec<(usize, usize)> = Vec::new();
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let (mut start, mut obs, mut exp) = (0, 0u64, 0.0);
    for (i, (&c, &p)) in counts.iter().zip(probabilities).enumerate() {
        obs += c;
        exp += total as f64 * p / prob_sum;
        if exp >= min_expected {
            classes.push((start, i));
            observed.push(obs);
            expected.push(exp);
            start = i + 1;
            obs = 0;
            exp = 0.0;
        }
    }
    if start < counts.len() {
        // leftover tail joins the last full class
        match classes.last_mut() {
            Some(last) => {
                last.1 = counts.len() - 1;
                *observed.last_mut().unwrap() += obs;
                *expected.last_mut().unwrap() += exp;
            }
            None => {
                classes.push((0, counts.len() - 1));
                observed.push(obs);
                expected.push(exp);
            }
        }
    }
    let statistic = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = classes.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        1.0 - dist.cdf(statistic)
    };
    Ok(ChiSquareTest {
        classes,
        observed,
        expected,
        statistic,
        dof,
        p_value,
    })
}

/// Histogram of `round(⟨n̂⟩)` over `bins` number states; values beyond the range land in the last bin.
pub fn rounded_histogram(values: &[f64], bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for v in values {
        let k = (v.round().max(0.0) as usize).min(bins - 1);
        h[k] += 1;
    }
    h
}
