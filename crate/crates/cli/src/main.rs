use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deqmi::deq::SolverOptions;
use deqmi_cli::checks;
use deqmi_cli::config::{value_to_window, ModelConfig, SweepConfig, SweepVariable};
use deqmi_cli::output::{emit, write_per_trial};
use deqmi_cli::run::{self, McPlan};
use deqmi_cli::CliError;

/// Deterministic-equivalent mutual information of Ricean MIMO channels with
/// time correlation and frequency selectivity.
#[derive(Parser)]
#[command(name = "deqmi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// CSV destination; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for all Monte Carlo randomness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve at z = -1 and report the mutual information.
    Solve {
        /// Model description (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// One row per value of a swept parameter.
    Sweep {
        /// Model description (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's sweep variable.
        #[arg(long, value_enum)]
        variable: Option<SweepVariable>,
        /// Comma-separated values; overrides the config's sweep values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
        /// Trials per point of an M sweep.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Monte Carlo estimate over simulated windows.
    Montecarlo {
        /// Model description (JSON).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        mc: McArgs,
        /// Also write every trial's value to this CSV.
        #[arg(long)]
        per_trial: Option<PathBuf>,
    },
    /// Compare the deterministic equivalent with Monte Carlo.
    Validate {
        /// Model description (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated odd window sizes; defaults to the config's M.
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<usize>>,
        /// Trials per window; defaults to the config's trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Largest accepted relative gap (strict).
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        /// Report gaps without failing the exit status.
        #[arg(long)]
        informational: bool,
    },
    /// Run the oracle and reproduction checks.
    Selftest {
        /// Restrict to these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Args)]
struct McArgs {
    /// Window size M = 2n + 1; defaults to the config's M.
    #[arg(long)]
    window: Option<usize>,
    /// Number of trials; defaults to the config's trials.
    #[arg(long)]
    trials: Option<usize>,
}

fn mc_plan(cfg: &ModelConfig, window: Option<usize>, trials: Option<usize>, seed: u64) -> Result<McPlan, CliError> {
    let section = cfg.montecarlo;
    let window = window
        .or(section.map(|s| s.window))
        .ok_or_else(|| CliError::Config("no window: pass --window or set montecarlo.M".into()))?;
    let trials = trials
        .or(section.map(|s| s.trials))
        .ok_or_else(|| CliError::Config("no trial count: pass --trials or set montecarlo.trials".into()))?;
    if trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    value_to_window(window as f64)?;
    Ok(McPlan { window, trials, seed })
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let opts = SolverOptions::default();
    let common = &cli.common;
    let Format::Csv = common.format;
    match cli.command {
        Command::Solve { config } => {
            let cfg = ModelConfig::load(&config)?;
            let row = run::solve(&cfg, &opts)?;
            emit(common.out.as_deref(), &[row])?;
            Ok(true)
        }
        Command::Sweep { config, variable, values, trials } => {
            let cfg = ModelConfig::load(&config)?;
            let spec = match (variable, values, &cfg.sweep) {
                (Some(variable), Some(values), _) => SweepConfig { variable, values },
                (v, vals, Some(s)) => SweepConfig {
                    variable: v.unwrap_or(s.variable),
                    values: vals.unwrap_or_else(|| s.values.clone()),
                },
                _ => {
                    return Err(CliError::Config(
                        "no sweep: pass --variable and --values or add a sweep section".into(),
                    ))
                }
            };
            let plan = if spec.variable == SweepVariable::M {
                // the window comes from each sweep value
                Some(mc_plan(&cfg, Some(1), trials, common.seed)?)
            } else {
                None
            };
            let rows = run::sweep(&cfg, &spec, &opts, plan)?;
            emit(common.out.as_deref(), &rows)?;
            Ok(rows.iter().all(|r| r.status == "ok"))
        }
        Command::Montecarlo { config, mc, per_trial } => {
            let cfg = ModelConfig::load(&config)?;
            let plan = mc_plan(&cfg, mc.window, mc.trials, common.seed)?;
            let (row, estimate) = run::montecarlo(&cfg, plan)?;
            emit(common.out.as_deref(), &[row])?;
            if let (Some(path), Some(samples)) = (per_trial, &estimate.per_trial) {
                write_per_trial(&path, samples)?;
            }
            Ok(true)
        }
        Command::Validate { config, windows, trials, tolerance, informational } => {
            let cfg = ModelConfig::load(&config)?;
            let plan = mc_plan(&cfg, windows.as_ref().and_then(|w| w.first().copied()), trials, common.seed)?;
            let windows = windows.unwrap_or_else(|| vec![plan.window]);
            let results = run::validate(&cfg, &windows, plan.trials, plan.seed, tolerance, &opts)?;
            let rows: Vec<_> = results.iter().map(|v| v.row.clone()).collect();
            emit(common.out.as_deref(), &rows)?;
            for v in &results {
                eprintln!(
                    "M={}: deq {:.6} mc {:.6} +- {:.6} rel gap {:.3}% -> {}",
                    v.row.mc_window.unwrap_or(0),
                    v.row.mi_nats.unwrap_or(f64::NAN),
                    v.row.mc_mean_nats.unwrap_or(f64::NAN),
                    v.row.mc_stderr_nats.unwrap_or(f64::NAN),
                    100.0 * v.row.rel_gap.unwrap_or(f64::NAN),
                    v.row.status
                );
            }
            let all = results.iter().all(|v| v.passed);
            if !all && !informational {
                return Err(CliError::ValidationFailed(format!(
                    "relative gap not below {tolerance}"
                )));
            }
            Ok(true)
        }
        Command::Selftest { only } => {
            let results = checks::run_all(&only);
            if results.is_empty() {
                return Err(CliError::Config(format!("no check named {only:?}")));
            }
            for r in &results {
                println!("{}", r.line());
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.common.threads;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
