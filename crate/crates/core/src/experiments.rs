//! Search runs, sweeps and power-law fits behind the command-line runner.
//!
//! Nothing here draws random numbers; parallel work is collected in input
//! order, so a configuration always produces the same bytes. Wall-clock
//! timings are the one exception and are written as zero unless requested.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, AsymptoticsRecord, SecularTable};
use crate::emit::{write_records, Field, Format, Record, SpectrumRow};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scalar::Real;
use crate::spectral::{self, enumerate_spectrum};
use crate::walk::{initial_state, Ordering, Walk, WalkConfig};

/// First local maximum of a probability series: the first `t` with
/// `p(t+1) < p(t)` once `p` has exceeded twice `p(0)`.
pub fn first_maximum<T: Real>(p: &[T]) -> Option<usize> {
    let threshold = p.first().copied()? * T::lit(2.0);
    let mut risen = false;
    for t in 0..p.len().saturating_sub(1) {
        if p[t] > threshold {
            risen = true;
        }
        if risen && p[t + 1] < p[t] {
            return Some(t);
        }
    }
    None
}

/// `⌈10·√(N ln N)⌉`.
pub fn default_max_steps(n: usize) -> usize {
    let big_n = (4 * n * n) as f64;
    (10.0 * (big_n * big_n.ln()).sqrt()).ceil() as usize
}

/// One search run: where the marked-vertex probability first peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub t_opt: usize,
    pub p_max: f64,
    /// Smallest positive eigenphase of `U₀` from the secular equation; NaN
    /// when the equation has no positive root (e.g. `θ = π/2`).
    pub lambda: f64,
    pub phi_min: f64,
    #[serde(rename = "wall_time_s")]
    pub wall_time_seconds: f64,
}

impl Record for RunRecord {
    const HEADER: &'static [&'static str] = &["n", "N", "t_opt", "p_max", "lambda", "phi_min", "wall_time_s"];

    fn fields(&self) -> Vec<Field> {
        vec![
            self.n.into(),
            self.big_n.into(),
            self.t_opt.into(),
            self.p_max.into(),
            self.lambda.into(),
            self.phi_min.into(),
            self.wall_time_seconds.into(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Defaults to [`default_max_steps`].
    pub max_steps: Option<usize>,
    /// Fill in `λ` and `φ_min`.
    pub eigenphases: bool,
    pub record_time: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_steps: None, eigenphases: true, record_time: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRun {
    /// On failure, `t_opt`/`p_max` hold the best step seen before the cap.
    pub record: RunRecord,
    /// Whether a first maximum was detected before the step cap.
    pub found: bool,
    pub steps_run: usize,
    /// Largest `|Σ_xy p_xy − 1|` over the sampled checkpoints.
    pub max_norm_drift: f64,
    /// `p(t)` at the marked vertex for every step run.
    pub probabilities: Vec<f64>,
}

/// `(λ, φ_min)` for a configuration; closed form when available.
pub fn eigenphase_pair(lattice: LatticeSpec, config: &WalkConfig<f64>) -> Result<(f64, f64)> {
    if spectral::is_closed_form(config) && config.marked == Some(crate::lattice::Vertex::ORIGIN) {
        let lambda = asymptotics::lambda_root::<f64>(lattice.n())?;
        return Ok((lambda, spectral::phi_min(lattice, config)?));
    }
    let table = SecularTable::numerical(lattice, config)?;
    let floor = spectral::zero_phase_floor::<f64>();
    let phi_min = table.terms.iter().map(|t| t.phase).filter(|&p| p > floor).fold(f64::NAN, f64::min);
    let lambda = asymptotics::smallest_positive_root(&table).unwrap_or(f64::NAN);
    Ok((lambda, phi_min))
}

/// Evolves `|ψ₀⟩` under `U₀` until the first maximum of the marked-vertex
/// probability or `max_steps`.
pub fn run_search(n: usize, theta: f64, ordering: Ordering, options: &SearchOptions) -> Result<SearchRun> {
    let lattice = LatticeSpec::new(n)?;
    let config = WalkConfig::default().with_theta(theta).with_ordering(ordering);
    let max_steps = options.max_steps.unwrap_or_else(|| default_max_steps(n));
    if max_steps == 0 {
        return Err(Error::Config("max_steps must be at least 1".into()));
    }
    let start = Instant::now();
    let walk = Walk::new(lattice, config)?;
    let mut state = initial_state::<f64>(lattice);
    let target = 0;
    let checkpoint = (max_steps / 16).max(1);

    let mut probabilities = vec![state.amplitudes()[target].norm_sqr()];
    let threshold = 2.0 * probabilities[0];
    let mut risen = false;
    let mut found = None;
    let mut drift: f64 = (state.norm_sqr() - 1.0).abs();
    for t in 1..=max_steps {
        walk.apply_in_place(state.amplitudes_mut());
        let p = state.amplitudes()[target].norm_sqr();
        probabilities.push(p);
        if t % checkpoint == 0 {
            drift = drift.max((state.norm_sqr() - 1.0).abs());
        }
        let prev = probabilities[t - 1];
        if prev > threshold {
            risen = true;
        }
        if risen && p < prev {
            found = Some(t - 1);
            break;
        }
    }
    drift = drift.max((state.norm_sqr() - 1.0).abs());
    let steps_run = probabilities.len() - 1;
    let (t_opt, p_max) = match found {
        Some(t) => (t, probabilities[t]),
        None => probabilities
            .iter()
            .copied()
            .enumerate()
            .skip(1)
            .fold((1, f64::MIN), |best, (t, p)| if p > best.1 { (t, p) } else { best }),
    };
    let (lambda, phi_min) =
        if options.eigenphases { eigenphase_pair(lattice, &config)? } else { (f64::NAN, f64::NAN) };
    let wall = if options.record_time { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(SearchRun {
        record: RunRecord {
            n,
            big_n: lattice.num_vertices(),
            t_opt,
            p_max,
            lambda,
            phi_min,
            wall_time_seconds: wall,
        },
        found: found.is_some(),
        steps_run,
        max_norm_drift: drift,
        probabilities,
    })
}

/// Least-squares line through `(ln x, ln y)`: `y ≈ coefficient · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Config(format!("fit needs equal-length inputs, got {} and {}", xs.len(), ys.len())));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite abscissae"));
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateFit(distinct.len()));
    }
    if xs.iter().chain(ys).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::Config("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mean_x = lx.iter().sum::<f64>() / m;
    let mean_y = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = ly.iter().map(|y| (y - mean_y).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(FitResult { exponent, coefficient: intercept.exp(), r_squared })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub runs: Vec<SearchRun>,
    /// `t_opt` against `N`.
    pub time_fit: FitResult,
    /// `1/p_max` against `N`.
    pub inverse_probability_fit: FitResult,
}

impl ScalingReport {
    pub fn records(&self) -> Vec<RunRecord> {
        self.runs.iter().map(|r| r.record).collect()
    }
}

/// Runs [`run_search`] for each `n` (in parallel) and fits both scaling laws.
pub fn scaling_sweep(n_values: &[usize], theta: f64, ordering: Ordering, options: &SearchOptions) -> Result<ScalingReport> {
    let mut distinct = n_values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::Config(format!("scaling sweep needs at least 4 distinct n, got {}", distinct.len())));
    }
    let runs: Vec<SearchRun> =
        n_values.par_iter().map(|&n| run_search(n, theta, ordering, options)).collect::<Result<_>>()?;
    let big_n: Vec<f64> = runs.iter().map(|r| r.record.big_n as f64).collect();
    let times: Vec<f64> = runs.iter().map(|r| r.record.t_opt as f64).collect();
    let inv_p: Vec<f64> = runs.iter().map(|r| 1.0 / r.record.p_max).collect();
    Ok(ScalingReport {
        time_fit: fit_power_law(&big_n, &times)?,
        inverse_probability_fit: fit_power_law(&big_n, &inv_p)?,
        runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenTrendRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub theta: f64,
    pub lambda: f64,
    pub phi_min: f64,
}

impl Record for EigenTrendRow {
    const HEADER: &'static [&'static str] = &["n", "N", "theta", "lambda", "phi_min"];

    fn fields(&self) -> Vec<Field> {
        vec![self.n.into(), self.big_n.into(), self.theta.into(), self.lambda.into(), self.phi_min.into()]
    }
}

/// `λ` and `φ_min` per `n`, both from the numerically projected blocks.
pub fn eigen_trend(theta: f64, n_values: &[usize], ordering: Ordering) -> Result<Vec<EigenTrendRow>> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return Err(Error::Config(format!("eigen-trend needs θ in (0, π/2], got {theta}")));
    }
    let config = WalkConfig::default().with_theta(theta).with_ordering(ordering);
    n_values
        .iter()
        .map(|&n| {
            let lattice = LatticeSpec::new(n)?;
            let table = SecularTable::numerical(lattice, &config)?;
            let floor = spectral::zero_phase_floor::<f64>();
            let phi_min = table.terms.iter().map(|t| t.phase).filter(|&p| p > floor).fold(f64::NAN, f64::min);
            Ok(EigenTrendRow {
                n,
                big_n: lattice.num_vertices(),
                theta,
                lambda: asymptotics::smallest_positive_root(&table)?,
                phi_min,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaScanRow {
    pub theta: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub found: bool,
    pub t_opt: usize,
    pub p_max: f64,
    /// `p_max / p(0)`; close to 1 when the walk does not amplify.
    pub gain: f64,
    pub lambda: f64,
    pub phi_min: f64,
    #[serde(rename = "wall_time_s")]
    pub wall_time_seconds: f64,
}

impl Record for ThetaScanRow {
    const HEADER: &'static [&'static str] =
        &["theta", "n", "N", "found", "t_opt", "p_max", "gain", "lambda", "phi_min", "wall_time_s"];

    fn fields(&self) -> Vec<Field> {
        vec![
            self.theta.into(),
            self.n.into(),
            self.big_n.into(),
            self.found.into(),
            self.t_opt.into(),
            self.p_max.into(),
            self.gain.into(),
            self.lambda.into(),
            self.phi_min.into(),
            self.wall_time_seconds.into(),
        ]
    }
}

/// [`run_search`] at fixed `n` for each angle.
pub fn theta_scan(n: usize, thetas: &[f64], ordering: Ordering, options: &SearchOptions) -> Result<Vec<ThetaScanRow>> {
    let runs: Vec<SearchRun> =
        thetas.par_iter().map(|&theta| run_search(n, theta, ordering, options)).collect::<Result<_>>()?;
    Ok(thetas
        .iter()
        .zip(runs)
        .map(|(&theta, run)| ThetaScanRow {
            theta,
            n: run.record.n,
            big_n: run.record.big_n,
            found: run.found,
            t_opt: run.record.t_opt,
            p_max: run.record.p_max,
            gain: run.record.p_max / run.probabilities[0],
            lambda: run.record.lambda,
            phi_min: run.record.phi_min,
            wall_time_seconds: run.record.wall_time_seconds,
        })
        .collect())
}

/// Closed-form eigenbasis rows for one `n`.
pub fn spectrum_rows(n: usize) -> Result<Vec<SpectrumRow>> {
    Ok(enumerate_spectrum::<f64>(n)?.iter().map(SpectrumRow::from).collect())
}

pub fn appendix_rows(n_values: &[usize]) -> Result<Vec<AsymptoticsRecord>> {
    n_values.par_iter().map(|&n| AsymptoticsRecord::compute(n)).collect()
}

/// Parses `0.785`, `pi`, `pi/4`, `3pi/8`, `3*pi/8`, `-pi/3`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let bad = || Error::BadAngle(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b.parse::<f64>().map_err(|_| bad())?)),
        None => (s.as_str(), None),
    };
    let value = if let Some(prefix) = num.strip_suffix("pi") {
        let coeff = match prefix.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        coeff * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let value = match den {
        Some(d) if d != 0.0 => value / d,
        Some(_) => return Err(bad()),
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Search,
    Scaling,
    ThetaScan,
    EigenTrend,
    Spectrum,
    Appendix,
}

/// Everything one CLI invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n_values: Vec<usize>,
    pub theta: f64,
    /// Angles for [`Mode::ThetaScan`].
    pub thetas: Vec<f64>,
    pub ordering: Ordering,
    pub max_steps: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub record_time: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n_values: Vec<usize>) -> Self {
        use std::f64::consts::PI;
        Self {
            mode,
            n_values,
            theta: PI / 4.0,
            thetas: vec![PI / 8.0, PI / 6.0, PI / 4.0, PI / 3.0, 3.0 * PI / 8.0],
            ordering: Ordering::DEFAULT,
            max_steps: None,
            output: None,
            format: Format::Csv,
            record_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("no n values given".into()));
        }
        if let Some(&bad) = self.n_values.iter().find(|&&n| n <= 1) {
            return Err(Error::DegenerateLattice(bad));
        }
        if self.max_steps == Some(0) {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if self.mode == Mode::ThetaScan && self.thetas.is_empty() {
            return Err(Error::Config("theta scan needs at least one angle".into()));
        }
        Ok(())
    }

    fn options(&self) -> SearchOptions {
        SearchOptions { max_steps: self.max_steps, eigenphases: true, record_time: self.record_time }
    }
}

/// Output of one experiment: the record file contents plus human-readable
/// summary lines (fits, failures) for the terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: Vec<u8>,
    pub notes: Vec<String>,
}

pub fn execute(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let mut body = Vec::new();
    let mut notes = Vec::new();
    let options = config.options();
    match config.mode {
        Mode::Search => {
            let runs: Vec<SearchRun> = config
                .n_values
                .par_iter()
                .map(|&n| run_search(n, config.theta, config.ordering, &options))
                .collect::<Result<_>>()?;
            for r in runs.iter().filter(|r| !r.found) {
                notes.push(format!("n={}: no maximum within {} steps (failure to amplify)", r.record.n, r.steps_run));
            }
            let records: Vec<RunRecord> = runs.iter().map(|r| r.record).collect();
            write_records(&records, config.format, &mut body)?;
        }
        Mode::Scaling => {
            let report = scaling_sweep(&config.n_values, config.theta, config.ordering, &options)?;
            for (name, fit) in [("t_opt", report.time_fit), ("1/p_max", report.inverse_probability_fit)] {
                notes.push(format!(
                    "{name} ≈ {:.6} · N^{:.6}  (r² = {:.6})",
                    fit.coefficient, fit.exponent, fit.r_squared
                ));
            }
            for r in report.runs.iter().filter(|r| !r.found) {
                notes.push(format!("n={}: no maximum within {} steps", r.record.n, r.steps_run));
            }
            write_records(&report.records(), config.format, &mut body)?;
        }
        Mode::ThetaScan => {
            let n = config.n_values[0];
            let rows = theta_scan(n, &config.thetas, config.ordering, &options)?;
            write_records(&rows, config.format, &mut body)?;
        }
        Mode::EigenTrend => {
            let rows = eigen_trend(config.theta, &config.n_values, config.ordering)?;
            write_records(&rows, config.format, &mut body)?;
        }
        Mode::Spectrum => {
            let mut rows = Vec::new();
            for &n in &config.n_values {
                rows.extend(spectrum_rows(n)?);
            }
            write_records(&rows, config.format, &mut body)?;
        }
        Mode::Appendix => {
            let rows = appendix_rows(&config.n_values)?;
            write_records(&rows, config.format, &mut body)?;
        }
    }
    Ok(Report { body, notes })
}
