use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hardcore_rsa::analytics;
use hardcore_rsa::error::{Error, Result};
use hardcore_rsa::ghost::{self, Geometry, GhostMode};
use hardcore_rsa::harness::{
    self, ClassicalMode, ConfigOverrides, ExperimentConfig, Figure, FigureParams, Lengths, LogBase, Process,
    Statistic, SCHEMA_VERSION,
};
use hardcore_rsa::packing2d::{self, Geometry2D};
use hardcore_rsa::recurrence::{self, LimitParams};
use hardcore_rsa::rng::RngStream;
use hardcore_rsa::stats::TrialSummary;

#[derive(Parser)]
#[command(name = "hcrsa", version, about = "Classical and ghost random sequential addition of hard rods")]
struct Cli {
    /// Logarithm base for ln(L)-scaled gap thresholds.
    #[arg(long, global = true, default_value = "e", value_parser = ["e", "2"])]
    log_base: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// One or more lengths (comma separated or repeated).
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    length: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Summary CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial JSON lines.
    #[arg(long)]
    raw: Option<PathBuf>,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    Interval,
    Circle,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwoDProcess {
    Classical,
    Ghost,
    GhostThenClassical,
}

#[derive(Subcommand)]
enum Command {
    /// Saturated classical packings.
    Classical {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "split", value_parser = ["split", "naive"])]
        mode: String,
        /// Also count gaps of length at least r.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Ghost packings on an interval or circle.
    Ghost {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "accelerated", value_parser = ["naive", "accelerated"])]
        mode: String,
        #[arg(long, value_enum, default_value = "interval")]
        geometry: GeometryArg,
        /// Report the frequency of a max gap of at least k·log(L).
        #[arg(long)]
        gap_factor: Option<f64>,
    },
    /// Numerical solutions of the integral recurrences.
    Solve {
        #[command(subcommand)]
        what: Solve,
    },
    /// Closed-form ghost-model quantities.
    Analytic {
        #[command(subcommand)]
        what: Analytic,
    },
    /// Square packings in an L×L box or torus.
    Twod {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "boxed", value_parser = ["boxed", "torus"])]
        mode: String,
        #[arg(long, value_enum, default_value = "classical")]
        process: TwoDProcess,
        /// Also report the largest empty square at this grid resolution.
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Data behind the figures.
    Figure {
        #[arg(value_parser = ["fig1", "fig2", "fig4", "fig5"])]
        figure: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        length: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Run an experiment described by a TOML config; flags override the file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        length: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare the solved f_r(L) with the Monte Carlo mean of G(L, r).
    CrossValidate {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Subcommand)]
enum Solve {
    /// Rényi's parking constant.
    Alpha {
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Expected rod count E[N(L)].
    Density {
        #[arg(long, default_value_t = 100.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected number of gaps of length at least r.
    Gaps {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 200.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// h_r(L) and its growth rate λ_r.
    HLambda {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 200.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper bound on the second moment of the gap count.
    SecondMoment {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 50.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ghost-model gap retention probability.
    Retention {
        #[arg(long, default_value_t = 12.0)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Analytic {
    /// Probability that candidate t is accepted.
    SuccessProb {
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 20)]
        t_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected number of ghost rods.
    GhostDensity {
        #[arg(long)]
        length: f64,
        #[arg(long, value_enum, default_value = "interval")]
        geometry: GeometryArg,
    },
    /// Occupancy probability curve on [0, L].
    Occupancy {
        #[arg(long, default_value_t = 20.0)]
        length: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Circle pair-correlation curve on (0, x_max].
    Paircorr {
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows(out: &Option<PathBuf>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn write_summaries(out: &Option<PathBuf>, rows: &[TrialSummary]) -> Result<()> {
    match out {
        Some(p) => harness::write_summaries(p, rows),
        None => {
            let mut w = io::stdout().lock();
            writeln!(w, "statistic,L,mean,variance,ci95_half_width,trials,master_seed")?;
            for s in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    s.statistic, s.length, s.mean, s.variance, s.ci95_half_width, s.trials, s.master_seed
                )?;
            }
            Ok(())
        }
    }
}

fn config_for(process: Process, run: &RunArgs, statistics: Vec<Statistic>) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        process,
        lengths: Lengths::Many(run.length.clone()),
        trials: run.trials,
        master_seed: run.seed,
        classical_mode: ClassicalMode::default(),
        ghost_mode: GhostMode::default(),
        geometry_2d: Geometry2D::default(),
        statistics,
        output: None,
        raw_output: run.raw.clone(),
        parallel: run.parallel,
        threads: run.threads,
    }
}

fn write_table(table: &recurrence::RecurrenceTable, out: &Option<PathBuf>) -> Result<()> {
    table.write_csv(sink(out)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let log_base: LogBase = cli.log_base.parse()?;
    match cli.command {
        Command::Classical { run, mode, r } => {
            let mut stats = vec![Statistic::RodCount, Statistic::Density, Statistic::MaxGap];
            stats.extend(r.map(Statistic::GapCountAt));
            let mut cfg = config_for(Process::Classical, &run, stats);
            cfg.classical_mode = if mode == "naive" { ClassicalMode::Naive } else { ClassicalMode::Split };
            let out = harness::run_experiment(&cfg)?;
            write_summaries(&run.out, &out.summaries)?;
        }
        Command::Ghost {
            run,
            mode,
            geometry,
            gap_factor,
        } => {
            let process = match geometry {
                GeometryArg::Interval => Process::GhostInterval,
                GeometryArg::Circle => Process::GhostCircle,
            };
            let mut cfg = config_for(process, &run, vec![Statistic::RodCount, Statistic::Density, Statistic::MaxGap]);
            cfg.ghost_mode = if mode == "naive" { GhostMode::Naive } else { GhostMode::Accelerated };
            let mut summaries = harness::run_experiment(&cfg)?.summaries;
            if let Some(k) = gap_factor {
                for &l in &run.length {
                    let threshold = k * log_base.log(l);
                    let hits = harness::map_trials(run.trials, run.parallel, run.threads, |t| {
                        let mut rng = RngStream::new(run.seed, t);
                        let s = match geometry {
                            GeometryArg::Interval => ghost::run_ghost_interval(l, &mut rng, cfg.ghost_mode)?,
                            GeometryArg::Circle => ghost::run_ghost_circle(l, &mut rng)?,
                        };
                        Ok((s.max_gap() >= threshold) as u8 as f64)
                    })?;
                    summaries.push(TrialSummary::from_samples(
                        &format!("max_gap_at_least[{k}*log(L)]"),
                        l,
                        run.seed,
                        &hits,
                    ));
                }
            }
            write_summaries(&run.out, &summaries)?;
        }
        Command::Solve { what } => solve(what)?,
        Command::Analytic { what } => analytic(what)?,
        Command::Twod {
            run,
            mode,
            process,
            resolution,
        } => {
            let p = match process {
                TwoDProcess::Classical => Process::Classical2d,
                TwoDProcess::Ghost => Process::Ghost2d,
                TwoDProcess::GhostThenClassical => Process::GhostThenClassical2d,
            };
            let mut cfg = config_for(p, &run, vec![Statistic::RodCount, Statistic::Density]);
            cfg.geometry_2d = if mode == "torus" { Geometry2D::Torus } else { Geometry2D::Boxed };
            if cfg.geometry_2d == Geometry2D::Torus && p == Process::GhostThenClassical2d {
                return Err(Error::InvalidConfig {
                    field: "mode".into(),
                    reason: "ghost-then-classical runs in the box only".into(),
                });
            }
            let mut summaries = harness::run_experiment(&cfg)?.summaries;
            if let Some(res) = resolution {
                for &l in &run.length {
                    let sides = harness::map_trials(run.trials, run.parallel, run.threads, |t| {
                        let mut rng = RngStream::new(run.seed, t);
                        let s = match p {
                            Process::Classical2d => packing2d::saturate_classical_2d_in(l, cfg.geometry_2d, &mut rng)?,
                            Process::Ghost2d => packing2d::run_ghost_2d(l, &mut rng, cfg.geometry_2d)?,
                            _ => packing2d::ghost_then_classical(l, &mut rng)?,
                        };
                        packing2d::largest_empty_square(&s, res)
                    })?;
                    summaries.push(TrialSummary::from_samples("largest_empty_square", l, run.seed, &sides));
                }
            }
            write_summaries(&run.out, &summaries)?;
        }
        Command::Figure {
            figure,
            trials,
            seed,
            length,
            points,
            out,
            parallel,
        } => {
            let fig: Figure = figure.parse()?;
            let data = harness::figure_data(
                fig,
                &FigureParams {
                    trials,
                    master_seed: seed,
                    lengths: length,
                    points,
                    parallel,
                },
            )?;
            data.write_csv(sink(&out)?)?;
        }
        Command::Experiment {
            config,
            length,
            trials,
            seed,
            mode,
            out,
            parallel,
            threads,
        } => {
            let mut cfg = ExperimentConfig::parse_unchecked(&std::fs::read_to_string(&config)?)?;
            cfg.apply_overrides(&ConfigOverrides {
                lengths: length,
                trials,
                master_seed: seed,
                mode,
                output: out,
                parallel: parallel.then_some(true),
                threads,
            })?;
            let result = harness::run_experiment(&cfg)?;
            if cfg.output.is_none() {
                write_summaries(&None, &result.summaries)?;
            }
        }
        Command::CrossValidate {
            r,
            length,
            trials,
            seed,
            parallel,
        } => {
            let report = harness::cross_validate(r, length, trials, seed, parallel)?;
            println!("{}", serde_json::to_string(&report)?);
            println!("{}", if report.pass { "PASS" } else { "FAIL" });
            if !report.pass {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(what: Solve) -> Result<()> {
    match what {
        Solve::Alpha { tolerance } => {
            let a = recurrence::renyi_alpha(tolerance)?;
            println!("alpha,residual");
            println!("{},{}", a.value, a.residual);
        }
        Solve::Density { length, step, out } => {
            write_table(&recurrence::solve_density(length, step)?, &out)?;
        }
        Solve::Gaps { r, length, step, out } => {
            let t = recurrence::solve_gap_expectation(r, length, step)?;
            write_table(&t, &out)?;
            let c = recurrence::limit_coefficient_c(r, LimitParams { l_big: length, step })?;
            eprintln!("c_{r} ~ {} (residual {}, at L = {})", c.value, c.residual, c.at_arg);
        }
        Solve::HLambda { r, length, step, out } => {
            let (t, lambda) = recurrence::solve_h_and_lambda(r, LimitParams { l_big: length, step })?;
            write_table(&t, &out)?;
            eprintln!("lambda_{r} ~ {} (residual {}, at L = {})", lambda.value, lambda.residual, lambda.at_arg);
        }
        Solve::SecondMoment { r, length, step, out } => {
            write_table(&recurrence::solve_second_moment_bound(r, length, step)?, &out)?;
        }
        Solve::Retention { length, step, out } => {
            let t = recurrence::solve_retention(length, step)?;
            write_table(&t, &out)?;
            let b = recurrence::retention_bounds(&t, (2.0, 4.0), length);
            eprintln!(
                "lower bound holds: {}; C fitted on [2,4] = {}; upper bound holds: {} (worst ratio {})",
                b.lower_holds, b.c_hat, b.upper_holds, b.worst_upper_ratio
            );
        }
    }
    Ok(())
}

fn analytic(what: Analytic) -> Result<()> {
    match what {
        Analytic::SuccessProb { length, t_max, out } => {
            let rows = (1..=t_max)
                .map(|t| Ok(vec![t as f64, analytics::success_prob(t, length)?]))
                .collect::<Result<Vec<_>>>()?;
            write_rows(&out, &["t", "value"], &rows)?;
        }
        Analytic::GhostDensity { length, geometry } => {
            let g = match geometry {
                GeometryArg::Interval => Geometry::Interval,
                GeometryArg::Circle => Geometry::Circle,
            };
            let e = analytics::expected_rods_ghost(length, g)?;
            write_rows(&None, &["L", "expected_rods", "density"], &[vec![length, e, 2.0 * e / length]])?;
        }
        Analytic::Occupancy { length, points, out } => {
            let rows = (0..points)
                .map(|k| {
                    let x = length * k as f64 / (points - 1).max(1) as f64;
                    Ok(vec![x, analytics::occupancy(x, length)?])
                })
                .collect::<Result<Vec<_>>>()?;
            write_rows(&out, &["x", "value"], &rows)?;
        }
        Analytic::Paircorr { x_max, points, out } => {
            let rows = (1..=points)
                .map(|k| {
                    let x = x_max * k as f64 / points as f64;
                    Ok(vec![x, analytics::pair_correlation_circle(x)?])
                })
                .collect::<Result<Vec<_>>>()?;
            write_rows(&out, &["x", "value"], &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
