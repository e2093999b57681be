//! Reproducible Monte Carlo experiments, figure data and solver cross-checks.
//!
//! Trial `i` of every experiment draws from substream `(master_seed, i)`.
//! Per-trial results are collected into a trial-indexed vector before any
//! reduction, so output files are identical for serial and parallel runs and
//! for any thread count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics;
use crate::classical::{self, BoundaryGaps, ROD_LENGTH};
use crate::error::{Error, Result};
use crate::ghost::{self, Geometry, GhostMode};
use crate::packing2d::{self, Geometry2D};
use crate::recurrence;
use crate::rng::RngStream;
use crate::stats::{self, LinearFit, TrialSummary};

pub const SCHEMA_VERSION: u32 = 1;

/// Reference points per trial for the pair-correlation estimator.
const PAIR_REFERENCE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    Classical,
    GhostInterval,
    GhostCircle,
    #[serde(rename = "2d-classical")]
    Classical2d,
    #[serde(rename = "2d-ghost")]
    Ghost2d,
    #[serde(rename = "2d-ghost-then-classical")]
    GhostThenClassical2d,
}

impl Process {
    fn is_2d(self) -> bool {
        matches!(
            self,
            Process::Classical2d | Process::Ghost2d | Process::GhostThenClassical2d
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalMode {
    #[default]
    Split,
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    RodCount,
    MaxGap,
    Density,
    GapCountAt(f64),
    OccupancyHistogram(usize),
    PairCorrelation(usize),
}

/// A single length or a list of lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    One(f64),
    Many(Vec<f64>),
}

impl Lengths {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Lengths::One(l) => vec![*l],
            Lengths::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    E,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(Error::config("log-base", format!("expected `e` or `2`, got `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub process: Process,
    #[serde(rename = "L", alias = "length")]
    pub lengths: Lengths,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub classical_mode: ClassicalMode,
    #[serde(default)]
    pub ghost_mode: GhostMode,
    #[serde(default)]
    pub geometry_2d: Geometry2D,
    pub statistics: Vec<Statistic>,
    /// Summary CSV.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Per-trial JSON lines.
    #[serde(default)]
    pub raw_output: Option<PathBuf>,
    #[serde(default)]
    pub parallel: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct ConfigOverrides {
    pub lengths: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub master_seed: Option<u64>,
    pub mode: Option<String>,
    pub output: Option<PathBuf>,
    pub parallel: Option<bool>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Parse without validating, so overrides can be applied first.
    pub fn parse_unchecked(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn apply_overrides(&mut self, o: &ConfigOverrides) -> Result<()> {
        if let Some(l) = &o.lengths {
            self.lengths = Lengths::Many(l.clone());
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        if let Some(s) = o.master_seed {
            self.master_seed = s;
        }
        if let Some(m) = &o.mode {
            match (self.process, m.as_str()) {
                (Process::Classical, "split") => self.classical_mode = ClassicalMode::Split,
                (Process::Classical, "naive") => self.classical_mode = ClassicalMode::Naive,
                (Process::GhostInterval, "naive") => self.ghost_mode = GhostMode::Naive,
                (Process::GhostInterval, "accelerated") => self.ghost_mode = GhostMode::Accelerated,
                (p, "boxed") if p.is_2d() => self.geometry_2d = Geometry2D::Boxed,
                (p, "torus") if p.is_2d() => self.geometry_2d = Geometry2D::Torus,
                (p, other) => {
                    return Err(Error::config(
                        "mode",
                        format!("`{other}` is not a mode of {p:?}"),
                    ))
                }
            }
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
        if let Some(p) = o.parallel {
            self.parallel = p;
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.trials < 1 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        let lengths = self.lengths.to_vec();
        if lengths.is_empty() {
            return Err(Error::config("L", "no lengths given"));
        }
        for &l in &lengths {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::config("L", format!("lengths must be finite and >= 0, got {l}")));
            }
            let floor = match self.process {
                Process::GhostCircle => 4.0,
                p if p.is_2d() => 2.0,
                _ => 0.0,
            };
            let ok = if self.process == Process::GhostCircle { l > floor } else { l >= floor };
            if !ok {
                return Err(Error::config("L", format!("{l} is too small for {:?}", self.process)));
            }
            if self.process == Process::GhostInterval && l <= 0.0 {
                return Err(Error::config("L", "ghost interval needs L > 0"));
            }
        }
        if self.statistics.is_empty() {
            return Err(Error::config("statistics", "at least one statistic is required"));
        }
        for s in &self.statistics {
            match *s {
                Statistic::GapCountAt(r) if !(r > 0.0) => {
                    return Err(Error::config("statistics", format!("gap_count_at needs r > 0, got {r}")))
                }
                Statistic::OccupancyHistogram(0) | Statistic::PairCorrelation(0) => {
                    return Err(Error::config("statistics", "histograms need at least one bin"))
                }
                Statistic::MaxGap | Statistic::GapCountAt(_) | Statistic::OccupancyHistogram(_)
                    if self.process.is_2d() =>
                {
                    return Err(Error::config("statistics", format!("{s:?} is only defined in 1D")))
                }
                Statistic::PairCorrelation(_) if self.process != Process::GhostCircle => {
                    return Err(Error::config(
                        "statistics",
                        "pair_correlation is only estimated on the ghost circle",
                    ))
                }
                _ => {}
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }
}

/// One line of the raw output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    #[serde(rename = "L")]
    pub length: f64,
    pub rod_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<(f64, f64)>>,
}

/// Outcome of one simulated packing, independent of the process.
enum Sample {
    Line {
        length: f64,
        rods: Vec<f64>,
        gaps: Vec<f64>,
        max_gap: f64,
        /// Interval geometry: rods cover `[c - 1, c + 1]` (centres); circle: wrapped.
        circle: bool,
    },
    Plane(packing2d::Packing2DState),
}

impl Sample {
    fn covers(&self, x: f64) -> bool {
        match self {
            Sample::Line {
                length,
                rods,
                circle,
                ..
            } => rods.iter().any(|&c| {
                let d = if *circle {
                    ghost::circle_distance(x, c, *length)
                } else {
                    (x - c).abs()
                };
                d < 1.0
            }),
            Sample::Plane(_) => false,
        }
    }
}

fn simulate(cfg: &ExperimentConfig, length: f64, trial: u64) -> Result<Sample> {
    let mut rng = RngStream::new(cfg.master_seed, trial);
    Ok(match cfg.process {
        Process::Classical => {
            let s = match cfg.classical_mode {
                ClassicalMode::Split => classical::saturate_split(length, &mut rng),
                ClassicalMode::Naive => classical::saturate_naive(length, &mut rng)?,
            };
            Sample::Line {
                length,
                rods: s.rods.iter().map(|p| p + 0.5 * ROD_LENGTH).collect(),
                gaps: s.gaps().iter().map(|g| g.length).collect(),
                max_gap: s.max_gap(BoundaryGaps::Include),
                circle: false,
            }
        }
        Process::GhostInterval | Process::GhostCircle => {
            let s = if cfg.process == Process::GhostCircle {
                ghost::run_ghost_circle(length, &mut rng)?
            } else {
                ghost::run_ghost_interval(length, &mut rng, cfg.ghost_mode)?
            };
            Sample::Line {
                length,
                gaps: s.gaps().iter().map(|g| g.length).collect(),
                max_gap: s.max_gap(),
                circle: s.geometry == Geometry::Circle,
                rods: s.rods,
            }
        }
        Process::Classical2d => Sample::Plane(packing2d::saturate_classical_2d_in(length, cfg.geometry_2d, &mut rng)?),
        Process::Ghost2d => Sample::Plane(packing2d::run_ghost_2d(length, &mut rng, cfg.geometry_2d)?),
        Process::GhostThenClassical2d => Sample::Plane(packing2d::ghost_then_classical(length, &mut rng)?),
    })
}

/// Column names produced by a statistic at length `length`.
fn columns(stat: &Statistic, length: f64) -> Vec<String> {
    match *stat {
        Statistic::RodCount => vec!["rod_count".into()],
        Statistic::MaxGap => vec!["max_gap".into()],
        Statistic::Density => vec!["density".into()],
        Statistic::GapCountAt(r) => vec![format!("gap_count_at[r={r}]")],
        Statistic::OccupancyHistogram(bins) => bin_centres(0.0, length, bins)
            .iter()
            .map(|x| format!("occupancy[x={x}]"))
            .collect(),
        Statistic::PairCorrelation(bins) => bin_centres(0.0, 0.5 * length, bins)
            .iter()
            .map(|x| format!("pair_correlation[x={x}]"))
            .collect(),
    }
}

fn bin_centres(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let w = (hi - lo) / bins as f64;
    (0..bins).map(|k| lo + (k as f64 + 0.5) * w).collect()
}

fn evaluate(stat: &Statistic, sample: &Sample, length: f64) -> Vec<f64> {
    let (count, area) = match sample {
        Sample::Line { rods, .. } => (rods.len(), length),
        Sample::Plane(s) => (s.count(), length * length),
    };
    let cell = match sample {
        Sample::Line { .. } => ROD_LENGTH,
        Sample::Plane(_) => ROD_LENGTH * ROD_LENGTH,
    };
    match *stat {
        Statistic::RodCount => vec![count as f64],
        Statistic::Density => vec![if area > 0.0 { cell * count as f64 / area } else { 0.0 }],
        Statistic::MaxGap => match sample {
            Sample::Line { max_gap, .. } => vec![*max_gap],
            Sample::Plane(_) => vec![f64::NAN],
        },
        Statistic::GapCountAt(r) => match sample {
            Sample::Line { gaps, .. } => vec![gaps.iter().filter(|&&g| g >= r).count() as f64],
            Sample::Plane(_) => vec![f64::NAN],
        },
        Statistic::OccupancyHistogram(bins) => bin_centres(0.0, length, bins)
            .iter()
            .map(|&x| sample.covers(x) as u8 as f64)
            .collect(),
        Statistic::PairCorrelation(bins) => {
            let refs: Vec<f64> = (0..PAIR_REFERENCE_POINTS)
                .map(|j| j as f64 * length / PAIR_REFERENCE_POINTS as f64)
                .collect();
            let covered: Vec<bool> = refs.iter().map(|&u| sample.covers(u)).collect();
            bin_centres(0.0, 0.5 * length, bins)
                .iter()
                .map(|&x| {
                    let hits = refs
                        .iter()
                        .zip(&covered)
                        .filter(|&(&u, &cu)| cu && sample.covers((u + x).rem_euclid(length)))
                        .count();
                    hits as f64 / PAIR_REFERENCE_POINTS as f64
                })
                .collect()
        }
    }
}

struct TrialOutput {
    record: TrialRecord,
    values: Vec<f64>,
}

fn run_trial(cfg: &ExperimentConfig, length: f64, trial: u64) -> Result<TrialOutput> {
    let sample = simulate(cfg, length, trial)?;
    let values = cfg
        .statistics
        .iter()
        .flat_map(|s| evaluate(s, &sample, length))
        .collect();
    let record = match &sample {
        Sample::Line { rods, gaps, .. } => TrialRecord {
            trial,
            length,
            rod_count: rods.len(),
            gaps: Some(gaps.clone()),
            centers: None,
        },
        Sample::Plane(s) => TrialRecord {
            trial,
            length,
            rod_count: s.count(),
            gaps: None,
            centers: Some(s.centers.clone()),
        },
    };
    Ok(TrialOutput { record, values })
}

/// Runs `f(i)` for `i in 0..n`, in parallel when asked, and returns results in
/// index order.
pub fn map_trials<T, F>(n: u64, parallel: bool, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if !parallel {
        return (0..n).map(f).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub summaries: Vec<TrialSummary>,
    pub records: Vec<TrialRecord>,
}

/// Runs every trial at every length and writes the configured output files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut summaries = Vec::new();
    let mut records = Vec::new();
    for length in cfg.lengths.to_vec() {
        let outs = map_trials(cfg.trials, cfg.parallel, cfg.threads, |t| run_trial(cfg, length, t))?;
        let names: Vec<String> = cfg.statistics.iter().flat_map(|s| columns(s, length)).collect();
        for (k, name) in names.iter().enumerate() {
            let column: Vec<f64> = outs.iter().map(|o| o.values[k]).collect();
            summaries.push(TrialSummary::from_samples(name, length, cfg.master_seed, &column));
        }
        records.extend(outs.into_iter().map(|o| o.record));
    }
    if let Some(path) = &cfg.output {
        write_summaries(path, &summaries)?;
    }
    if let Some(path) = &cfg.raw_output {
        write_records(path, &records)?;
    }
    Ok(ExperimentOutput { summaries, records })
}

pub fn write_summaries(path: &Path, rows: &[TrialSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record([
        "statistic",
        "L",
        "mean",
        "variance",
        "ci95_half_width",
        "trials",
        "master_seed",
    ])?;
    for s in rows {
        w.write_record([
            s.statistic.clone(),
            s.length.to_string(),
            s.mean.to_string(),
            s.variance.to_string(),
            s.ci95_half_width.to_string(),
            s.trials.to_string(),
            s.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig4,
    Fig5,
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            other => Err(Error::config("figure", format!("unknown figure `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FigureParams {
    pub trials: Option<u64>,
    pub master_seed: u64,
    pub lengths: Option<Vec<f64>>,
    /// Number of x samples for fig4/fig5.
    pub points: Option<usize>,
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct FigureData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fit: Option<LinearFit>,
}

impl FigureData {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mean_over_trials<F>(trials: u64, parallel: bool, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    map_trials(trials, parallel, None, f)
}

pub fn figure_data(figure: Figure, p: &FigureParams) -> Result<FigureData> {
    match figure {
        Figure::Fig1 => {
            let alpha = recurrence::renyi_alpha(1e-8)?.value;
            let lengths = p.lengths.clone().unwrap_or_else(|| vec![50.0, 100.0, 200.0, 500.0, 1000.0]);
            let trials = p.trials.unwrap_or(1000);
            let mut rows = Vec::new();
            for l in lengths {
                let n = mean_over_trials(trials, p.parallel, |t| {
                    Ok(classical::saturate_split(l, &mut RngStream::new(p.master_seed, t)).rod_count() as f64)
                })?;
                let density = 2.0 * stats::mean(&n) / l;
                let dr = 2.0 * (alpha * l / 2.0 + alpha - 1.0) / l;
                rows.push(vec![l, density, alpha, dr]);
            }
            Ok(FigureData {
                columns: cols(&["L", "empirical_density", "alpha", "dr_approx"]),
                rows,
                fit: None,
            })
        }
        Figure::Fig2 => {
            let lengths = p
                .lengths
                .clone()
                .unwrap_or_else(|| (1..=20).map(|k| 50.0 * k as f64).collect());
            let trials = p.trials.unwrap_or(200);
            let mut means = Vec::new();
            for &l in &lengths {
                let g = mean_over_trials(trials, p.parallel, |t| {
                    let mut rng = RngStream::new(p.master_seed, t);
                    Ok(ghost::run_ghost_interval(l, &mut rng, GhostMode::Accelerated)?.max_gap())
                })?;
                means.push(stats::mean(&g));
            }
            let logs: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
            let fit = stats::linear_fit(&logs, &means);
            let rows = lengths
                .iter()
                .zip(&means)
                .zip(&logs)
                .map(|((&l, &m), &ll)| vec![l, m, ll, fit.slope, fit.intercept, fit.r_squared])
                .collect();
            Ok(FigureData {
                columns: cols(&["L", "mean_max_gap", "ln_L", "fit_slope", "fit_intercept", "r_squared"]),
                rows,
                fit: Some(fit),
            })
        }
        Figure::Fig4 => {
            let l = p.lengths.as_ref().and_then(|v| v.first().copied()).unwrap_or(20.0);
            let points = p.points.unwrap_or(81);
            let trials = p.trials.unwrap_or(10_000);
            let xs: Vec<f64> = (0..points).map(|k| l * k as f64 / (points - 1).max(1) as f64).collect();
            let hits = map_trials(trials, p.parallel, None, |t| {
                let s = ghost::run_ghost_interval(l, &mut RngStream::new(p.master_seed, t), GhostMode::Accelerated)?;
                Ok(xs.iter().map(|&x| s.covers(x)).collect::<Vec<bool>>())
            })?;
            let mut rows = Vec::new();
            for (k, &x) in xs.iter().enumerate() {
                let emp = hits.iter().filter(|h| h[k]).count() as f64 / trials as f64;
                rows.push(vec![x, analytics::occupancy(x, l)?, emp]);
            }
            Ok(FigureData {
                columns: cols(&["x", "formula_value", "empirical_value"]),
                rows,
                fit: None,
            })
        }
        Figure::Fig5 => {
            let l = p.lengths.as_ref().and_then(|v| v.first().copied()).unwrap_or(40.0);
            let points = p.points.unwrap_or(80);
            let trials = p.trials.unwrap_or(10_000);
            let xs: Vec<f64> = (1..=points).map(|k| 0.5 * l * k as f64 / points as f64).collect();
            let vals = map_trials(trials, p.parallel, None, |t| {
                let s = ghost::run_ghost_circle(l, &mut RngStream::new(p.master_seed, t))?;
                let refs: Vec<f64> = (0..PAIR_REFERENCE_POINTS)
                    .map(|j| j as f64 * l / PAIR_REFERENCE_POINTS as f64)
                    .collect();
                Ok(xs
                    .iter()
                    .map(|&x| {
                        refs.iter()
                            .filter(|&&u| s.covers(u) && s.covers((u + x).rem_euclid(l)))
                            .count() as f64
                            / PAIR_REFERENCE_POINTS as f64
                    })
                    .collect::<Vec<f64>>())
            })?;
            let mut rows = Vec::new();
            for (k, &x) in xs.iter().enumerate() {
                let col: Vec<f64> = vals.iter().map(|v| v[k]).collect();
                rows.push(vec![x, analytics::pair_correlation_circle(x)?, stats::mean(&col)]);
            }
            Ok(FigureData {
                columns: cols(&["x", "formula_value", "empirical_value"]),
                rows,
                fit: None,
            })
        }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrossValidation {
    pub r: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub solver_value: f64,
    pub mc_mean: f64,
    pub standard_error: f64,
    pub z_score: f64,
    pub pass: bool,
}

/// Solved `f_r(L)` against the Monte Carlo mean of `G(L, r)`; passes iff `|z| <= 3`.
pub fn cross_validate(r: f64, length: f64, trials: u64, master_seed: u64, parallel: bool) -> Result<CrossValidation> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::precondition(format!("r must lie in (0, 2), got {r}")));
    }
    if trials < 1 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let table = recurrence::solve_gap_expectation(r, length.max(4.0).ceil(), recurrence::DEFAULT_STEP)?;
    let solver_value = table
        .value_at(length)
        .ok_or_else(|| Error::precondition("length outside solved table"))?;
    let counts = map_trials(trials, parallel, None, |t| {
        let s = classical::saturate_split(length, &mut RngStream::new(master_seed, t));
        Ok(s.count_gaps_at_least(r) as f64)
    })?;
    let summary = TrialSummary::from_samples("gap_count_at", length, master_seed, &counts);
    let z = summary.z_score(solver_value);
    Ok(CrossValidation {
        r,
        length,
        solver_value,
        mc_mean: summary.mean,
        standard_error: summary.standard_error(),
        z_score: z,
        pass: z.abs() <= 3.0,
    })
}

/// Fraction of trials whose largest classical gap (boundary gaps included)
/// is at least each threshold.
pub fn classical_gap_exceedance(length: f64, thresholds: &[f64], trials: u64, master_seed: u64, parallel: bool) -> Result<Vec<f64>> {
    let gaps = map_trials(trials, parallel, None, |t| {
        Ok(classical::saturate_split(length, &mut RngStream::new(master_seed, t)).max_gap(BoundaryGaps::Include))
    })?;
    Ok(thresholds
        .iter()
        .map(|&th| gaps.iter().filter(|&&g| g >= th).count() as f64 / trials as f64)
        .collect())
}

/// Fraction of ghost-interval trials whose largest gap is at least
/// `factor * log(L)`.
pub fn ghost_gap_exceedance(length: f64, factor: f64, base: LogBase, trials: u64, master_seed: u64, parallel: bool) -> Result<f64> {
    let threshold = factor * base.log(length);
    let hits = map_trials(trials, parallel, None, |t| {
        let s = ghost::run_ghost_interval(length, &mut RngStream::new(master_seed, t), GhostMode::Accelerated)?;
        Ok(s.max_gap() >= threshold)
    })?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / trials as f64)
}
