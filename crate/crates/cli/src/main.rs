//! `ffrx`: channel matrices, parameter sweeps and Monte-Carlo runs for the
//! feedforward displacement receiver.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ffrx::receiver::appendix::{audit, Variant};
use ffrx::receiver::{build_decision_tree, exact_channel_matrix};
use ffrx::simulator::{compare_to_exact, estimate_channel_matrix, SimulationSpec};
use ffrx::sweep::{format_float, run_sweep, to_csv, to_json, Grid, Objective, Scheme, SweepConfig};
use ffrx::{Error, ReceiverConfig};

const DEFAULT_ALPHA_SQ: f64 = 1.0;
const DEFAULT_TRIALS: u64 = 100_000;
const SIGMA_THRESHOLD: f64 = 4.0;

#[derive(Parser, Debug)]
#[command(name = "ffrx", version, about = "Feedforward displacement receiver for 3-/4-PSK")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Exact channel matrix and the audit of the printed appendix table.
    Matrix,
    /// Metric curves over a grid of mean photon numbers.
    Sweep,
    /// Monte-Carlo estimate of the channel matrix.
    Simulate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(clap::Args, Debug, Default)]
struct Flags {
    /// Number of PSK symbols.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(3..=4))]
    m: Option<u8>,
    /// Mean photon number for `matrix`/`simulate`; a one-point grid for `sweep`.
    #[arg(long, global = true)]
    alpha_sq: Option<f64>,
    #[arg(long, global = true)]
    alpha_sq_min: Option<f64>,
    #[arg(long, global = true)]
    alpha_sq_max: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    grid: Option<GridArg>,
    /// Detector efficiency.
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Dark-count parameter.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    r1: Option<f64>,
    #[arg(long, global = true)]
    r2: Option<f64>,
    #[arg(long, global = true, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Comma-separated subset of displacement_optimized, displacement_equal, heterodyne, helstrom.
    #[arg(long, global = true, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    #[arg(long, global = true)]
    target_error: Option<f64>,
    /// Trials per input symbol for `simulate`.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON sweep config; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum GridArg {
    Linear,
    Log,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ObjectiveArg {
    Mi,
    Cutoff,
}

/// Failure classes that map to distinct exit codes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::UnsupportedSymbolCount(_) | Error::DimensionMismatch { .. } => {
                Failure::Usage(e.into())
            }
            _ => Failure::Numerical(e.into()),
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn merged_config(flags: &Flags) -> Result<SweepConfig, Failure> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(usage)?
        }
        None => SweepConfig::default(),
    };
    if let Some(m) = flags.m {
        cfg.m = m as usize;
    }
    if let Some(a) = flags.alpha_sq {
        cfg.alpha_sq_min = a;
        cfg.alpha_sq_max = a;
        cfg.steps = 1;
    }
    if let Some(a) = flags.alpha_sq_min {
        cfg.alpha_sq_min = a;
    }
    if let Some(a) = flags.alpha_sq_max {
        cfg.alpha_sq_max = a;
    }
    if let Some(n) = flags.steps {
        cfg.steps = n;
    }
    if let Some(g) = flags.grid {
        cfg.grid = match g {
            GridArg::Linear => Grid::Linear,
            GridArg::Log => Grid::Log,
        };
    }
    if let Some(x) = flags.eta {
        cfg.eta = x;
    }
    if let Some(x) = flags.gamma {
        cfg.gamma = x;
    }
    if let Some(x) = flags.r1 {
        cfg.r1 = x;
    }
    if let Some(x) = flags.r2 {
        cfg.r2 = x;
    }
    if let Some(o) = flags.objective {
        cfg.objective = match o {
            ObjectiveArg::Mi => Objective::Mi,
            ObjectiveArg::Cutoff => Objective::Cutoff,
        };
    }
    if let Some(list) = &flags.schemes {
        cfg.schemes = list.iter().map(|s| s.trim().parse::<Scheme>()).collect::<Result<_, _>>()?;
    }
    if let Some(t) = flags.target_error {
        cfg.target_error = t;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if !(3..=4).contains(&cfg.m) {
        return Err(Error::UnsupportedSymbolCount(cfg.m).into());
    }
    Ok(cfg)
}

/// Single operating point for `matrix` and `simulate`.
fn point_config(flags: &Flags, cfg: &SweepConfig) -> Result<ReceiverConfig, Failure> {
    let alpha_sq = flags.alpha_sq.unwrap_or(if flags.config.is_some() { cfg.alpha_sq_min } else { DEFAULT_ALPHA_SQ });
    let rc = cfg.receiver(alpha_sq);
    rc.validate()?;
    Ok(rc)
}

fn write_matrix(out: &mut String, title: &str, rows: &[Vec<f64>]) {
    let _ = writeln!(out, "{title}");
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>24.16e}")).collect();
        let _ = writeln!(out, "  P(.|{i}) {}", cells.join(" "));
    }
}

fn cmd_matrix(flags: &Flags, cfg: &SweepConfig) -> Result<String, Failure> {
    let rc = point_config(flags, cfg)?;
    let report = audit(&rc, Variant::for_symbols(rc.m)?)?;
    match flags.format.unwrap_or(Format::Text) {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                config: &'a ReceiverConfig,
                #[serde(flatten)]
                audit: &'a ffrx::receiver::appendix::AppendixAudit,
                printed_row_sums: Vec<f64>,
            }
            let out = Out { config: &rc, audit: &report, printed_row_sums: report.printed_row_sums() };
            Ok(serde_json::to_string_pretty(&out).map_err(|e| Failure::Numerical(e.into()))? + "\n")
        }
        Format::Csv => {
            let mut out = String::from("input,output,exact,printed,diff\n");
            for i in 0..rc.m {
                for j in 0..rc.m {
                    let _ = writeln!(
                        out,
                        "{i},{j},{},{},{}",
                        format_float(report.exact.get(i, j)),
                        format_float(report.printed[i][j]),
                        format_float(report.diff[i][j])
                    );
                }
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "M={} alpha_sq={} eta={} gamma={} r1={} r2={}\n",
                rc.m, rc.alpha_sq, rc.eta, rc.gamma, rc.r1, rc.r2
            );
            write_matrix(&mut out, "exact (decision tree)", report.exact.rows());
            write_matrix(&mut out, "printed appendix table", &report.printed);
            write_matrix(&mut out, "printed - exact", &report.diff);
            let sums: Vec<String> = report.printed_row_sums().iter().map(|s| format!("{s:.16e}")).collect();
            let _ = writeln!(out, "printed row sums: {}", sums.join(", "));
            let _ = writeln!(out, "term discrepancies:");
            for d in &report.discrepancies {
                let _ = writeln!(out, "  {d}");
            }
            Ok(out)
        }
    }
}

fn cmd_sweep(flags: &Flags, cfg: &SweepConfig) -> Result<String, Failure> {
    cfg.validate()?;
    let rows = run_sweep(cfg)?;
    match flags.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(to_csv(&rows)),
        Format::Json => Ok(to_json(cfg, &rows)),
        Format::Text => Err(usage(anyhow::anyhow!("sweep supports --format csv or json"))),
    }
}

#[derive(Serialize)]
struct SimulateOut<'a> {
    config: &'a ReceiverConfig,
    trials_per_input: u64,
    seed: u64,
    counts: &'a [Vec<u64>],
    empirical: &'a [Vec<f64>],
    exact: &'a [Vec<f64>],
    max_deviation: ffrx::simulator::Deviation,
    sigma_threshold: f64,
}

fn cmd_simulate(flags: &Flags, cfg: &SweepConfig) -> Result<String, Failure> {
    let rc = point_config(flags, cfg)?;
    let trials = flags.trials.unwrap_or(DEFAULT_TRIALS);
    let tree = build_decision_tree(rc.m)?;
    let exact = exact_channel_matrix(&rc, &tree)?;
    let report = estimate_channel_matrix(&SimulationSpec { config: rc, trials_per_input: trials, seed: cfg.seed }, &tree)?;
    let dev = compare_to_exact(&report, &exact, trials, SIGMA_THRESHOLD)?;
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => {
            let out = SimulateOut {
                config: &rc,
                trials_per_input: trials,
                seed: cfg.seed,
                counts: &report.counts,
                empirical: &report.empirical,
                exact: exact.rows(),
                max_deviation: dev,
                sigma_threshold: SIGMA_THRESHOLD,
            };
            Ok(serde_json::to_string_pretty(&out).map_err(|e| Failure::Numerical(e.into()))? + "\n")
        }
        Format::Csv => {
            let mut out = String::from("input,output,count,empirical,exact\n");
            for i in 0..rc.m {
                for j in 0..rc.m {
                    let _ = writeln!(
                        out,
                        "{i},{j},{},{},{}",
                        report.counts[i][j],
                        format_float(report.empirical[i][j]),
                        format_float(exact.get(i, j))
                    );
                }
            }
            Ok(out)
        }
        Format::Text => Err(usage(anyhow::anyhow!("simulate supports --format csv or json"))),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = merged_config(&cli.flags)?;
    let text = match cli.command {
        Command::Matrix => cmd_matrix(&cli.flags, &cfg)?,
        Command::Sweep => cmd_sweep(&cli.flags, &cfg)?,
        Command::Simulate => cmd_simulate(&cli.flags, &cfg)?,
    };
    match &cli.flags.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::Numerical(e.into()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
