use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_eq_sim::config::{ConfigError, ExperimentConfig, SweepAxis, SweepSpec};
use ris_eq_sim::gradcheck::gradcheck;
use ris_eq_sim::oracle::{run_oracle, OracleSettings};
use ris_eq_sim::output::{emit, summary_table, OutputFormat};
use ris_eq_sim::runner::run_monte_carlo;

/// Spatial-equalizer ISI benchmark runner.
#[derive(Parser)]
#[command(name = "ris-eq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRunArgs {
    /// JSON experiment config; omitted or empty means all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overridden by RIS_EQ_OUT_DIR when set).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's Monte Carlo run count.
    #[arg(long)]
    runs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo benchmark at the configured operating point.
    Run(CommonRunArgs),
    /// Monte Carlo sweep along one axis.
    Sweep {
        #[command(flatten)]
        common: CommonRunArgs,
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values, e.g. `20,60,100`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Compare the analytic phase gradient against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the optimizer against an exhaustive 2-element grid search.
    Oracle {
        /// Mesh spacing in radians.
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Allowed optimality gap per draw.
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

fn load_config(common: &CommonRunArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(runs) = common.runs {
        cfg.runs = runs;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn out_dir(common: &CommonRunArgs) -> PathBuf {
    match std::env::var_os("RIS_EQ_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => common.out.clone(),
    }
}

fn execute(cfg: &ExperimentConfig, common: &CommonRunArgs) -> ExitCode {
    let output = match run_monte_carlo(cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let dir = out_dir(common);
    match emit(cfg, &output, common.format, &dir) {
        Ok(path) => {
            print!("{}", summary_table(&output.summaries));
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(common) => match load_config(&common) {
            Ok(cfg) => execute(&cfg, &common),
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let cfg = load_config(&common).map(|mut cfg| {
                cfg.sweep = Some(SweepSpec { axis, values });
                cfg.validate().map(|()| cfg)
            });
            match cfg {
                Ok(Ok(cfg)) => execute(&cfg, &common),
                Ok(Err(e)) | Err(e) => {
                    eprintln!("config error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
        Command::Gradcheck { trials, seed } => {
            if trials == 0 {
                eprintln!("config error: --trials must be at least 1");
                return ExitCode::from(EXIT_CONFIG);
            }
            let report = gradcheck(trials, seed);
            for t in &report.trials {
                println!(
                    "trial {:>4}: K={} N={} worst (k={}, n={}) analytic {:+.6e} fd {:+.6e} rel {:.3e}",
                    t.trial,
                    t.num_users,
                    t.num_elements,
                    t.worst_user,
                    t.worst_element,
                    t.analytic,
                    t.finite_difference,
                    t.rel_error
                );
            }
            println!(
                "gradcheck: {} trials, max rel error {:.3e} ({})",
                report.trials.len(),
                report.max_rel_error,
                if report.pass { "PASS" } else { "FAIL" }
            );
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Command::Oracle {
            grid_step,
            draws,
            restarts,
            tolerance,
            seed,
        } => {
            if grid_step <= 0.0 || tolerance <= 0.0 || draws == 0 {
                eprintln!("config error: grid step, tolerance and draws must be positive");
                return ExitCode::from(EXIT_CONFIG);
            }
            let report = run_oracle(&OracleSettings {
                grid_step,
                draws,
                restarts,
                tolerance,
                seed,
            });
            for d in &report.draws {
                println!(
                    "draw {:>3}: grid {:.6e} optimizer {:.6e} gap {:+.3e} {}",
                    d.draw,
                    d.grid_eta,
                    d.optimizer_eta,
                    d.gap,
                    if d.hit { "hit" } else { "miss" }
                );
            }
            println!(
                "oracle: {}/{} hits (need {}) ({})",
                report.hits,
                report.draws.len(),
                report.required_hits,
                if report.pass { "PASS" } else { "FAIL" }
            );
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
    }
}
