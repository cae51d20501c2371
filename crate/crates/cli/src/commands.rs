use std::fmt::Write as _;
use std::io::{ErrorKind, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use serde::Serialize;

use fockpovm_core::analytics::{correlation_closed, ClosedFormSeries};
use fockpovm_core::correlation::{resolution_sweep, unweighted_integrals, SweepSource};
use fockpovm_core::fock::{make_coherent_state, TruncationConfig};
use fockpovm_core::measurement::{grid_for_dimension, outcome_moments, DENSITY_FLOOR};
use fockpovm_core::trajectory::{chi_square_test, ensemble_stats, rounded_histogram, TrajectoryConfig};
use fockpovm_core::verify::{first_failure, run_suite, CheckResult, VerifyOptions};
use fockpovm_core::{Amplitude, DensityMatrix, OutcomeGrid, Resolution};

use crate::config::ConfigFile;
use crate::format::{g15, round15};

/// Exit-code class of a failed command.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or output path.
    Usage(anyhow::Error),
    /// The computation itself failed.
    Numerical(anyhow::Error),
}

type CmdResult<T = ()> = Result<T, Failure>;

trait Classify<T> {
    fn usage(self) -> CmdResult<T>;
    fn numerical(self) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn numerical(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Numerical(e.into()))
    }
}

fn missing(key: &str) -> Failure {
    Failure::Usage(anyhow!("missing required parameter --{key} (flag or config key)"))
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Real part of the coherent amplitude alpha.
    #[arg(long, visible_alias = "alpha-re", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Imaginary part of alpha.
    #[arg(long, allow_negative_numbers = true)]
    alpha_im: Option<f64>,
    /// Fock-space dimension [default: ceil(|alpha|^2 + 10 sqrt(|alpha|^2 + 1) + 20)].
    #[arg(long)]
    dim: Option<usize>,
}

const STATE_KEYS: [&str; 4] = ["alpha", "alpha-re", "alpha-im", "dim"];

struct StateSpec {
    alpha: Amplitude,
    dim: usize,
}

impl StateSpec {
    fn resolve(args: &StateArgs, cfg: &ConfigFile) -> CmdResult<Self> {
        let from_cfg = match (cfg.f64("alpha").usage()?, cfg.f64("alpha-re").usage()?) {
            (Some(_), Some(_)) => return Err(Failure::Usage(anyhow!("config gives both alpha and alpha-re"))),
            (a, b) => a.or(b),
        };
        let re = args.alpha.or(from_cfg).ok_or_else(|| missing("alpha"))?;
        let im = args.alpha_im.or(cfg.f64("alpha-im").usage()?).unwrap_or(0.0);
        let alpha = Amplitude::new(re, im);
        let default_dim = TruncationConfig::for_amplitude(alpha).usage()?.dim();
        let dim = args.dim.or(cfg.usize("dim").usage()?).unwrap_or(default_dim);
        TruncationConfig::new(dim).usage()?;
        Ok(Self { alpha, dim })
    }

    fn state(&self) -> CmdResult<DensityMatrix> {
        make_coherent_state(self.alpha, TruncationConfig::new(self.dim).usage()?).numerical()
    }

    fn echo(&self) -> (f64, f64) {
        (self.alpha.re, self.alpha.im)
    }
}

fn resolution(flag: Option<f64>, cfg: &ConfigFile, key: &str) -> CmdResult<Resolution> {
    let dn = flag.or(cfg.f64(key).usage()?).ok_or_else(|| missing(key))?;
    Resolution::new(dn).usage()
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Lowest outcome on the grid [default: -8 dn].
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    /// Highest outcome on the grid [default: dim - 1 + 8 dn].
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
    /// Grid spacing; must divide hi - lo [default: largest step <= min(dn / (30 refinement), 0.05)].
    #[arg(long)]
    step: Option<f64>,
    /// Grid refinement factor (>= 1) for the default spacing.
    #[arg(long)]
    refinement: Option<f64>,
}

const GRID_KEYS: [&str; 4] = ["lo", "hi", "step", "refinement"];

fn resolve_grid(args: &GridArgs, cfg: &ConfigFile, dim: usize, dn: Resolution) -> CmdResult<OutcomeGrid> {
    let refinement = args.refinement.or(cfg.f64("refinement").usage()?).unwrap_or(1.0);
    let default = grid_for_dimension(dim, dn, refinement).usage()?;
    let lo = args.lo.or(cfg.f64("lo").usage()?).unwrap_or(default.lo());
    let hi = args.hi.or(cfg.f64("hi").usage()?).unwrap_or(default.hi());
    match args.step.or(cfg.f64("step").usage()?) {
        Some(step) => OutcomeGrid::new(lo, hi, step).usage(),
        None => OutcomeGrid::fitted(lo, hi, dn, refinement).usage(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Trace formulas on the truncated density matrix.
    Operator,
    /// Coherent-state series, truncated at the same dimension.
    Closed,
}

fn resolve_method(flag: Option<Method>, cfg: &ConfigFile) -> CmdResult<Method> {
    if let Some(m) = flag {
        return Ok(m);
    }
    match cfg.string("method").usage()? {
        Some(s) => Method::from_str(&s, true).map_err(|e| Failure::Usage(anyhow!("config key `method`: {e}"))),
        None => Ok(Method::Closed),
    }
}

fn output_path(flag: Option<PathBuf>, cfg: &ConfigFile, key: &str) -> CmdResult<Option<PathBuf>> {
    Ok(flag.or(cfg.string(key).usage()?.map(PathBuf::from)))
}

/// Writes `text` to `path`, or to standard output when there is no path.
fn emit(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .usage(),
        None => to_stdout(text),
    }
}

/// Writes to standard output; a closed pipe ends output quietly.
fn to_stdout(text: &str) -> CmdResult {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Failure::Usage(anyhow!("writing standard output: {e}"))),
        _ => Ok(()),
    }
}

fn csv_row(out: &mut String, fields: &[f64]) {
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&g15(*x));
    }
    out.push('\n');
}

enum Evaluator {
    Operator { rho: DensityMatrix, dn: Resolution },
    Closed(ClosedFormSeries),
}

impl Evaluator {
    fn new(method: Method, spec: &StateSpec, dn: Resolution) -> CmdResult<Self> {
        // both paths validate the truncation the same way
        let rho = spec.state()?;
        Ok(match method {
            Method::Operator => Self::Operator { rho, dn },
            Method::Closed => Self::Closed(ClosedFormSeries::with_terms(spec.alpha, dn, spec.dim).numerical()?),
        })
    }

    fn density(&self, nm: f64) -> f64 {
        match self {
            Self::Operator { rho, dn } => outcome_moments(rho, *dn, nm).density,
            Self::Closed(series) => series.outcome_density(nm),
        }
    }

    /// `(P, ⟨â⟩_f)`; the coherence is NaN where the density underflows.
    fn density_and_coherence(&self, nm: f64) -> (f64, Amplitude) {
        let nan = Amplitude::new(f64::NAN, f64::NAN);
        match self {
            Self::Operator { rho, dn } => {
                let m = outcome_moments(rho, *dn, nm);
                (m.density, m.post_coherence().unwrap_or(nan))
            }
            Self::Closed(series) => {
                let p = series.outcome_density(nm);
                let a = if p > DENSITY_FLOOR {
                    series.post_coherence(nm)
                } else {
                    nan
                };
                (p, a)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement resolution delta n.
    #[arg(long)]
    dn: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluation path [default: closed].
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Output CSV file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file with flat keys named like the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn dist(args: DistArgs) -> CmdResult {
    let keys: Vec<&str> = [&STATE_KEYS[..], &GRID_KEYS[..], &["dn", "method", "out"]].concat();
    let cfg = ConfigFile::load(args.config.as_deref(), &keys).usage()?;
    let spec = StateSpec::resolve(&args.state, &cfg)?;
    let dn = resolution(args.dn, &cfg, "dn")?;
    let grid = resolve_grid(&args.grid, &cfg, spec.dim, dn)?;
    let method = resolve_method(args.method, &cfg)?;
    let out = output_path(args.out, &cfg, "out")?;

    let eval = Evaluator::new(method, &spec, dn)?;
    let mut csv = String::from("n_m,P\n");
    for nm in grid.points() {
        csv_row(&mut csv, &[nm, eval.density(nm)]);
    }
    emit(out.as_deref(), &csv)?;
    if let Some(p) = &out {
        to_stdout(&format!("dist: {} rows written to {}\n", grid.len(), p.display()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement resolution delta n.
    #[arg(long)]
    dn: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluation path [default: closed].
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Add P and |<a>_f| columns divided by their values at this outcome.
    #[arg(long, allow_negative_numbers = true)]
    normalize_at: Option<f64>,
    /// Output CSV file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file with flat keys named like the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn coherence(args: CoherenceArgs) -> CmdResult {
    let keys: Vec<&str> = [
        &STATE_KEYS[..],
        &GRID_KEYS[..],
        &["dn", "method", "normalize-at", "out"],
    ]
    .concat();
    let cfg = ConfigFile::load(args.config.as_deref(), &keys).usage()?;
    let spec = StateSpec::resolve(&args.state, &cfg)?;
    let dn = resolution(args.dn, &cfg, "dn")?;
    let grid = resolve_grid(&args.grid, &cfg, spec.dim, dn)?;
    let method = resolve_method(args.method, &cfg)?;
    let normalize_at = args.normalize_at.or(cfg.f64("normalize-at").usage()?);
    if normalize_at.is_some_and(|x| !x.is_finite()) {
        return Err(Failure::Usage(anyhow!("--normalize-at must be finite")));
    }
    let out = output_path(args.out, &cfg, "out")?;

    let eval = Evaluator::new(method, &spec, dn)?;
    let reference = match normalize_at {
        Some(at) => {
            let (p, a) = eval.density_and_coherence(at);
            if p.is_nan() || p <= DENSITY_FLOOR {
                return Err(Failure::Numerical(anyhow!(
                    "density at --normalize-at {at} is {p:e}, below the floor {DENSITY_FLOOR:e}"
                )));
            }
            if a.norm().is_nan() || a.norm() == 0.0 {
                return Err(Failure::Numerical(anyhow!("coherence at --normalize-at {at} is zero")));
            }
            Some((p, a.norm()))
        }
        None => None,
    };

    let mut csv = String::from("n_m,P,re_a_f,im_a_f");
    if reference.is_some() {
        csv.push_str(",P_norm,a_f_norm");
    }
    csv.push('\n');
    for nm in grid.points() {
        let (p, a) = eval.density_and_coherence(nm);
        match reference {
            Some((p0, a0)) => csv_row(&mut csv, &[nm, p, a.re, a.im, p / p0, a.norm() / a0]),
            None => csv_row(&mut csv, &[nm, p, a.re, a.im]),
        }
    }
    emit(out.as_deref(), &csv)?;
    if let Some(p) = &out {
        to_stdout(&format!("coherence: {} rows written to {}\n", grid.len(), p.display()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct CorrelationArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Smallest resolution of the sweep.
    #[arg(long)]
    dn_min: Option<f64>,
    /// Largest resolution of the sweep.
    #[arg(long)]
    dn_max: Option<f64>,
    /// Number of equally spaced resolutions, endpoints included (>= 2) [default: 96].
    #[arg(long)]
    steps: Option<usize>,
    /// Grid refinement factor (>= 1).
    #[arg(long)]
    refinement: Option<f64>,
    /// Also print the integrals without the probability weight.
    #[arg(long)]
    unweighted: bool,
    /// Output CSV file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file with flat keys named like the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn correlation(args: CorrelationArgs) -> CmdResult {
    let keys: Vec<&str> = [
        &STATE_KEYS[..],
        &["dn-min", "dn-max", "steps", "refinement", "unweighted", "out"],
    ]
    .concat();
    let cfg = ConfigFile::load(args.config.as_deref(), &keys).usage()?;
    let spec = StateSpec::resolve(&args.state, &cfg)?;
    if spec.alpha.norm() == 0.0 {
        return Err(Failure::Usage(anyhow!("-C/alpha needs a nonzero --alpha")));
    }
    let dn_min = args.dn_min.or(cfg.f64("dn-min").usage()?).unwrap_or(0.05);
    let dn_max = args.dn_max.or(cfg.f64("dn-max").usage()?).unwrap_or(1.0);
    let steps = args.steps.or(cfg.usize("steps").usage()?).unwrap_or(96);
    let refinement = args.refinement.or(cfg.f64("refinement").usage()?).unwrap_or(1.0);
    let unweighted = args.unweighted || cfg.bool("unweighted").usage()?.unwrap_or(false);
    let out = output_path(args.out, &cfg, "out")?;
    if !(dn_min > 0.0 && dn_min < dn_max && dn_max.is_finite()) {
        return Err(Failure::Usage(anyhow!(
            "need 0 < --dn-min < --dn-max, got {dn_min} and {dn_max}"
        )));
    }
    if steps < 2 {
        return Err(Failure::Usage(anyhow!("--steps must be at least 2")));
    }
    let dns: Vec<Resolution> = (0..steps)
        .map(|i| {
            let dn = if i + 1 == steps {
                dn_max
            } else {
                dn_min + (dn_max - dn_min) * i as f64 / (steps - 1) as f64
            };
            Resolution::new(dn)
        })
        .collect::<Result<_, _>>()
        .usage()?;
    grid_for_dimension(spec.dim, dns[0], refinement).usage()?;

    let rho = spec.state()?;
    let reports = resolution_sweep(&SweepSource::State(rho.clone()), &dns, refinement).numerical()?;

    let mut csv = String::from("dn,avg_q,re_avg_a,neg_c_over_alpha_numeric,neg_c_over_alpha_closed");
    if unweighted {
        csv.push_str(",unweighted_int_q,unweighted_re_int_a,unweighted_neg_c_over_alpha");
    }
    csv.push('\n');
    let mut peak = (f64::NAN, f64::NEG_INFINITY);
    for r in &reports {
        let numeric = -(r.c / spec.alpha).re;
        let closed = -(correlation_closed(spec.alpha, r.dn) / spec.alpha).re;
        if numeric > peak.1 {
            peak = (r.dn.get(), numeric);
        }
        let mut row = vec![r.dn.get(), r.avg_q, r.avg_a.re, numeric, closed];
        if unweighted {
            let u = unweighted_integrals(&rho, r.dn, &r.grid);
            row.extend([u.int_q, u.int_a.re, -(u.c / spec.alpha).re]);
        }
        csv_row(&mut csv, &row);
    }
    emit(out.as_deref(), &csv)?;
    if let Some(p) = &out {
        to_stdout(&format!(
            "correlation: {} rows written to {}; largest -C/alpha = {} at dn = {}\n",
            reports.len(),
            p.display(),
            g15(peak.1),
            g15(peak.0)
        ))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement resolution delta n.
    #[arg(long)]
    dn: Option<f64>,
    /// Measurements per trajectory [default: 50].
    #[arg(long)]
    steps: Option<usize>,
    /// Number of independent trajectories [default: 1000].
    #[arg(long)]
    shots: Option<usize>,
    /// Base seed; shot i uses seed ^ splitmix64(i * 0x9E3779B97F4A7C15) [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Per-step CSV file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary file [default: the --out path with extension .json; none without --out].
    #[arg(long)]
    summary: Option<PathBuf>,
    /// JSON config file with flat keys named like the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Serialize)]
struct TrajectoryEcho {
    alpha_re: f64,
    alpha_im: f64,
    dim: usize,
    dn: f64,
    steps: usize,
    shots: usize,
    seed: u64,
    rng: &'static str,
    shot_seed: &'static str,
}

#[derive(Serialize)]
struct HistogramBin {
    n: usize,
    observed: u64,
    expected: f64,
}

#[derive(Serialize)]
struct ChiSquareSummary {
    statistic: f64,
    dof: usize,
    p_value: f64,
    min_expected: f64,
    classes: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct TrajectorySummary {
    config: TrajectoryEcho,
    final_number_histogram: Vec<HistogramBin>,
    chi_square: ChiSquareSummary,
    median_final_purity: f64,
    mean_final_purity: f64,
}

const MIN_EXPECTED: f64 = 5.0;

pub fn trajectory(args: TrajectoryArgs) -> CmdResult {
    let keys: Vec<&str> = [&STATE_KEYS[..], &["dn", "steps", "shots", "seed", "out", "summary"]].concat();
    let cfg = ConfigFile::load(args.config.as_deref(), &keys).usage()?;
    let spec = StateSpec::resolve(&args.state, &cfg)?;
    let dn = resolution(args.dn, &cfg, "dn")?;
    let steps = args.steps.or(cfg.usize("steps").usage()?).unwrap_or(50);
    let shots = args.shots.or(cfg.usize("shots").usage()?).unwrap_or(1000);
    let seed = args.seed.or(cfg.u64("seed").usage()?).unwrap_or(0);
    let out = output_path(args.out, &cfg, "out")?;
    let summary_path =
        output_path(args.summary, &cfg, "summary")?.or_else(|| out.as_ref().map(|p| p.with_extension("json")));
    if shots == 0 {
        return Err(Failure::Usage(anyhow!("--shots must be at least 1")));
    }
    if summary_path.is_some() && summary_path == out {
        return Err(Failure::Usage(anyhow!("--summary and --out name the same file")));
    }
    let traj_cfg = TrajectoryConfig::new(dn, steps, seed).usage()?;

    let rho = spec.state()?;
    let stats = ensemble_stats(&rho, &traj_cfg, shots).numerical()?;

    let mut csv = String::from("step,mean_n,re_mean_a,im_mean_a,mean_purity\n");
    for s in &stats.steps {
        csv_row(
            &mut csv,
            &[
                s.index as f64,
                s.mean_number,
                s.mean_coherence.re,
                s.mean_coherence.im,
                s.mean_purity,
            ],
        );
    }

    let populations = rho.populations();
    let counts = rounded_histogram(&stats.final_numbers, populations.len());
    let chi = chi_square_test(&counts, &populations, MIN_EXPECTED).numerical()?;
    let total: f64 = populations.iter().sum();
    let mean_final_purity = stats.final_purities.iter().sum::<f64>() / shots as f64;
    let (alpha_re, alpha_im) = spec.echo();
    let summary = TrajectorySummary {
        config: TrajectoryEcho {
            alpha_re,
            alpha_im,
            dim: spec.dim,
            dn: dn.get(),
            steps,
            shots,
            seed,
            rng: "ChaCha8",
            shot_seed: "seed ^ splitmix64(i * 0x9E3779B97F4A7C15)",
        },
        final_number_histogram: counts
            .iter()
            .zip(&populations)
            .enumerate()
            .map(|(n, (&observed, &p))| HistogramBin {
                n,
                observed,
                expected: round15(shots as f64 * p / total),
            })
            .collect(),
        chi_square: ChiSquareSummary {
            statistic: round15(chi.statistic),
            dof: chi.dof,
            p_value: round15(chi.p_value),
            min_expected: MIN_EXPECTED,
            classes: chi.classes.clone(),
        },
        median_final_purity: round15(stats.median_final_purity()),
        mean_final_purity: round15(mean_final_purity),
    };
    let mut json = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Numerical(e.into()))?;
    json.push('\n');

    emit(out.as_deref(), &csv)?;
    if let Some(p) = &summary_path {
        emit(Some(p), &json)?;
    }
    if let Some(p) = &out {
        to_stdout(&format!(
            "trajectory: {shots} shots x {steps} steps written to {}; median final purity {}; chi-square {} (dof {}), p = {}\n",
            p.display(),
            g15(summary.median_final_purity),
            g15(chi.statistic),
            chi.dof,
            g15(chi.p_value)
        ))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Print a JSON report instead of a table.
    #[arg(long)]
    json: bool,
    /// Flip one parity sign to exercise the failure path.
    #[arg(long, hide = true)]
    inject_parity_fault: bool,
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    description: &'a str,
    deviation: Option<f64>,
    tolerance: f64,
    passed: bool,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    first_failure: Option<&'a str>,
    checks: Vec<CheckRecord<'a>>,
}

fn table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
    let mut s = format!(
        "{:<width$}  {:>10}  {:>10}  result\n",
        "check", "deviation", "tolerance"
    );
    for r in results {
        let dev = if r.deviation.is_nan() {
            "-".to_string()
        } else {
            format!("{:.3e}", r.deviation)
        };
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let _ = write!(s, "{:<width$}  {:>10}  {:>10.0e}  {verdict}", r.name, dev, r.tolerance);
        if let Some(e) = &r.error {
            let _ = write!(s, "  ({e})");
        }
        s.push('\n');
    }
    s
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let results = run_suite(&VerifyOptions {
        parity_fault: args.inject_parity_fault,
    });
    let failed = first_failure(&results);
    if args.json {
        let report = VerifyReport {
            passed: failed.is_none(),
            first_failure: failed.map(|r| r.name),
            checks: results
                .iter()
                .map(|r| CheckRecord {
                    name: r.name,
                    description: r.description,
                    deviation: r.deviation.is_finite().then(|| round15(r.deviation)),
                    tolerance: r.tolerance,
                    passed: r.passed,
                    error: r.error.as_deref(),
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Numerical(e.into()))?;
        to_stdout(&format!("{json}\n"))?;
    } else {
        to_stdout(&table(&results))?;
    }
    match failed {
        None => Ok(()),
        Some(r) => Err(Failure::Numerical(match &r.error {
            Some(e) => anyhow!("verification failed: check `{}` could not run: {e}", r.name),
            None => anyhow!(
                "verification failed: check `{}` deviation {:e} exceeds tolerance {:e}",
                r.name,
                r.deviation,
                r.tolerance
            ),
        })),
    }
}
