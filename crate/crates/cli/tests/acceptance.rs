//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use statrs::function::erf::erfc;

use fockpovm_core::analytics::{correlation_closed, optimal_resolution, ClosedFormSeries};
use fockpovm_core::correlation::{
    correlation_numeric, operator_correlation, quantization_operator_expectation, resolution_sweep, SweepSource,
};
use fockpovm_core::fock::{annihilation_expectation, make_coherent_state};
use fockpovm_core::measurement::{default_grid, outcome_density, outcome_moments};
use fockpovm_core::trajectory::{
    chi_square_test, ensemble_stats, rounded_histogram, sample_outcome, TrajectoryConfig, TrajectoryRng,
};
use fockpovm_core::verify::nonselective_quadrature_gap;
use fockpovm_core::{Amplitude, DensityMatrix, Resolution, TruncationConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn verdict(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn amp(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

fn res(dn: f64) -> Resolution {
    Resolution::new(dn).unwrap()
}

fn coherent(alpha: f64) -> DensityMatrix {
    let a = amp(alpha);
    make_coherent_state(a, TruncationConfig::for_amplitude(a).unwrap()).unwrap()
}

fn within_time(elapsed: Duration, limit: f64) -> (bool, String) {
    let secs = elapsed.as_secs_f64();
    (secs <= limit, format!("{secs:.2} s (limit {limit} s)"))
}

fn dual_path() -> Outcome {
    let start = Instant::now();
    let (alpha, dn) = (amp(3.0), res(0.3));
    let rho = make_coherent_state(alpha, TruncationConfig::new(40).unwrap()).unwrap();
    let series = ClosedFormSeries::with_terms(alpha, dn, 40).unwrap();
    let grid = default_grid(&rho, dn, 1.0).unwrap();
    let (mut dp, mut da): (f64, f64) = (0.0, 0.0);
    for nm in grid.points() {
        let m = outcome_moments(&rho, dn, nm);
        dp = dp.max((m.density - series.outcome_density(nm)).abs());
        if m.density > 1e-12 {
            da = da.max((m.post_coherence().unwrap() - series.post_coherence(nm)).norm());
        }
    }
    let (fast, time) = within_time(start.elapsed(), 5.0);
    verdict(
        dp <= 1e-9 && da <= 1e-9 && fast,
        format!(
            "max |dP| = {dp:.2e}, max |d<a>_f| = {da:.2e} over {} points, {time}",
            grid.len()
        ),
    )
}

fn normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 1.0, 3.0] {
        let rho = coherent(alpha);
        for d in [0.1, 0.3, 1.0] {
            let dn = res(d);
            let grid = default_grid(&rho, dn, 1.0).unwrap();
            let len = grid.len();
            let integral: f64 = grid
                .points()
                .enumerate()
                .map(|(i, nm)| {
                    let w = if i == 0 || i + 1 == len { 0.5 } else { 1.0 };
                    w * grid.step() * outcome_density(&rho, dn, nm)
                })
                .sum();
            worst = worst.max((integral - 1.0).abs());
        }
    }
    verdict(worst <= 1e-6, format!("max |integral - 1| = {worst:.2e}"))
}

fn closed_correlation() -> Outcome {
    let rho = coherent(3.0);
    let mut worst: f64 = 0.0;
    for d in [0.1, 0.2, 0.3, 0.5, 1.0] {
        let dn = res(d);
        let report = correlation_numeric(&rho, dn, &default_grid(&rho, dn, 1.0).unwrap()).unwrap();
        let closed = correlation_closed(amp(3.0), dn);
        worst = worst.max((report.c - closed).norm() / closed.norm());
    }
    verdict(worst <= 1e-6, format!("max relative error = {worst:.2e}"))
}

fn correlation_peak() -> Outcome {
    let dns: Vec<Resolution> = (0..=190).map(|i| res(0.05 + 0.005 * i as f64)).collect();
    let reports = resolution_sweep(&SweepSource::Coherent(amp(3.0)), &dns, 1.0).unwrap();
    let (dn, value) = reports
        .iter()
        .map(|r| (r.dn.get(), -(r.c / amp(3.0)).re))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let (dn_star, peak) = optimal_resolution();
    verdict(
        (dn - 0.2821).abs() <= 0.005 && (value - 0.08643).abs() <= 1e-4,
        format!("peak -C/alpha = {value:.6} at dn = {dn:.3} (analytic {peak:.6} at {dn_star:.5})"),
    )
}

fn ordering_identity() -> Outcome {
    let mut rng = TrajectoryRng::seed_from_u64(20_160_101);
    let (mut worst_c, mut worst_q): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let rho = DensityMatrix::random(32, &mut rng).unwrap();
        worst_c = worst_c.max((operator_correlation(&rho) + annihilation_expectation(&rho) * 2.0).norm());
        worst_q = worst_q.max((quantization_operator_expectation(&rho) - 1.0).abs());
    }
    verdict(
        worst_c <= 1e-12 && worst_q <= 1e-12,
        format!("max |C_op + 2<a>| = {worst_c:.2e}, max |<Q> - 1| = {worst_q:.2e}"),
    )
}

fn nonselective() -> Outcome {
    let gap = nonselective_quadrature_gap().map_err(|e| e.to_string())?;
    verdict(gap <= 1e-8, format!("max element error = {gap:.2e}"))
}

fn cli_csv(args: &[&str]) -> Vec<Vec<f64>> {
    let out = Command::new(env!("CARGO_BIN_EXE_fockpovm"))
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// Abscissae of interior local maxima of `y` with `x` in `[lo, hi]`.
fn local_maxima(rows: &[Vec<f64>], y: impl Fn(&[f64]) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    rows.windows(3)
        .filter(|w| w[1][0] >= lo && w[1][0] <= hi && y(&w[1]) > y(&w[0]) && y(&w[1]) >= y(&w[2]))
        .map(|w| w[1][0])
        .collect()
}

fn comb_structure() -> Outcome {
    let rows = cli_csv(&["coherence", "--alpha", "3", "--dn", "0.3"]);
    let modulus = |r: &[f64]| r[2].hypot(r[3]);
    let coh_max = local_maxima(&rows, modulus, 4.0, 14.0);
    let p_max = local_maxima(&rows, |r| r[1], 4.0, 14.0);
    let half_offset = |x: f64| (x - (x - 0.5).round() - 0.5).abs();
    let int_offset = |x: f64| (x - x.round()).abs();
    let worst_coh = coh_max.iter().map(|&x| half_offset(x)).fold(0.0, f64::max);
    let worst_p = p_max.iter().map(|&x| int_offset(x)).fold(0.0, f64::max);
    let worst_at = coh_max
        .iter()
        .copied()
        .max_by(|a, b| half_offset(*a).total_cmp(&half_offset(*b)));

    let detail = cli_csv(&[
        "coherence",
        "--alpha",
        "3",
        "--dn",
        "0.3",
        "--normalize-at",
        "9.25",
        "--lo",
        "8.5",
        "--hi",
        "9.5",
    ]);
    let argmin_p = detail.iter().min_by(|a, b| a[4].total_cmp(&b[4])).unwrap()[0];
    let argmax_a = detail.iter().max_by(|a, b| a[5].total_cmp(&b[5])).unwrap()[0];
    let argmax_p = detail.iter().max_by(|a, b| a[4].total_cmp(&b[4])).unwrap()[0];
    let argmin_a = detail.iter().min_by(|a, b| a[5].total_cmp(&b[5])).unwrap()[0];
    let at_edge = |x: f64| (x - 8.5).abs() <= 0.02 || (x - 9.5).abs() <= 0.02;
    let anti_phase =
        at_edge(argmin_p) && at_edge(argmax_a) && (argmax_p - 9.0).abs() <= 0.02 && (argmin_a - 9.0).abs() <= 0.02;

    verdict(
        worst_coh <= 0.02 && worst_p <= 0.02 && !coh_max.is_empty() && !p_max.is_empty() && anti_phase,
        format!(
            "|<a>_f| maxima: {} found, worst offset from half-integer {worst_coh:.3} at n_m = {:.2}; \
             P maxima: {} found, worst offset from integer {worst_p:.3}; \
             detail [8.5, 9.5]: P min at {argmin_p}, |<a>_f| max at {argmax_a}, P max at {argmax_p}, |<a>_f| min at {argmin_a}",
            coh_max.len(),
            worst_at.unwrap_or(f64::NAN),
            p_max.len()
        ),
    )
}

fn sampling() -> Outcome {
    let start = Instant::now();
    let dn = res(0.3);
    let rho = coherent(3.0);
    let mut rng = TrajectoryRng::seed_from_u64(8);
    let n = 1_000_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sample_outcome(&rho, dn, &mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let pops = rho.populations();
    let cdf = |x: f64| -> f64 {
        pops.iter()
            .enumerate()
            .map(|(k, p)| p * 0.5 * erfc(-(x - k as f64) / (0.3 * std::f64::consts::SQRT_2)))
            .sum()
    };
    let mut ks: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max((i + 1) as f64 / n as f64 - f).max(f - i as f64 / n as f64);
    }
    let (fast, time) = within_time(start.elapsed(), 30.0);
    verdict(
        ks <= 0.002 && fast,
        format!("KS distance = {ks:.2e} over {n} samples, {time}"),
    )
}

fn collapse() -> Outcome {
    let start = Instant::now();
    let rho = coherent(1.0);
    let cfg = TrajectoryConfig::new(res(0.3), 50, 42).unwrap();
    let stats = ensemble_stats(&rho, &cfg, 2000).unwrap();
    let median = stats.median_final_purity();
    let pops = rho.populations();
    let counts = rounded_histogram(&stats.final_numbers, pops.len());
    let chi = chi_square_test(&counts, &pops, 5.0).unwrap();
    let (fast, time) = within_time(start.elapsed(), 60.0);
    verdict(
        median >= 0.99 && chi.p_value >= 0.01 && fast,
        format!(
            "median final purity = {median:.6}, chi-square = {:.3} (dof {}), p = {:.3}, {time}",
            chi.statistic, chi.dof, chi.p_value
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("dual-path equivalence", dual_path),
        ("normalization", normalization),
        ("closed-form correlation", closed_correlation),
        ("correlation peak", correlation_peak),
        ("parity ordering identity", ordering_identity),
        ("non-selective map", nonselective),
        ("distribution and coherence structure", comb_structure),
        ("sampling correctness", sampling),
        ("collapse statistics", collapse),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {} ({name}): {detail}", i + 1);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
