//! `rho-maximal`: command-line front end for the maximal-operator library.
//!
//! Exit codes: 0 on success, 2 on configuration or I/O errors, 3 when a
//! check or experiment ends with a FAIL verdict.

mod commands;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rho_maximal::harness::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "rho-maximal", version, about = "Critical-radius maximal operators: checks and experiments")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "RHO_MAXIMAL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file.
    #[arg(short, long)]
    config: PathBuf,
    /// Directory for the report files.
    #[arg(short, long, default_value = ".")]
    output: PathBuf,
    /// Override a configuration field, e.g. `--set theta=2` or
    /// `--set refinement.factors=[1,2,4]`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the integral growth condition for a growth pair (a, b) and η.
    DiniCheck(Common),
    /// Evaluate a maximal operator on every function of the battery.
    MaximalEval(Common),
    /// Weak-type experiment (or its level-set estimate with `--level-set`).
    WeakType {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        level_set: bool,
    },
    /// Strong-type experiment for M_Φ with Φ = t^p.
    StrongType(Common),
    /// Weighted modular inequality (unweighted with `--unweighted`).
    ModularFs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        unweighted: bool,
    },
    /// Weighted norm inequality (unweighted with `--unweighted`).
    NormFs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        unweighted: bool,
    },
    /// Two-weight quotient inequality.
    TwoWeight(Common),
    /// ρ-adapted A_p (or A_1 when `p` is absent or 1) constants of the weights.
    WeightsEstimate(Common),
    /// Critical covering of the grid and its overlap profile.
    Covering(Common),
    /// Check the variation inequalities of ρ on a grid sample.
    ValidateRho(Common),
    /// Run the built-in closed-form oracle suite.
    Selftest {
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration, bad input or I/O trouble.
    Usage(String),
}

impl From<rho_maximal::Error> for Failure {
    fn from(e: rho_maximal::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Result of a command: whether its verdict passed.
pub type Outcome = Result<bool, Failure>;

pub fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", common.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", common.config.display())))?;
    for o in &common.overrides {
        cfg = cfg.with_override(o)?;
    }
    Ok(cfg)
}

/// Writes `<stem>.<ext>` under `dir`, creating the directory if needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Run metadata kept out of the report payloads so that reports are
/// byte-identical across reruns.
fn write_sidecar(dir: &Path, stem: &str, command: &str, common: Option<&Common>, threads: usize, passed: bool) -> Result<(), Failure> {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let meta = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "config": common.map(|c| c.config.display().to_string()),
        "overrides": common.map(|c| c.overrides.clone()).unwrap_or_default(),
        "threads": threads,
        "unix_time": secs,
        "passed": passed,
    });
    write_output(dir, &format!("{stem}.meta.json"), &serde_json::to_string_pretty(&meta).expect("json"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let threads = rayon::current_num_threads();
    let (stem, name, common, result) = match &cli.command {
        Command::DiniCheck(c) => ("dini_check", "dini-check", Some(c), commands::dini_check(c)),
        Command::MaximalEval(c) => ("maximal_eval", "maximal-eval", Some(c), commands::maximal_eval(c)),
        Command::WeakType { common, level_set } => {
            let (stem, exp) = if *level_set { ("level_set", "level_set") } else { ("weak_type", "weak_type") };
            (stem, "weak-type", Some(common), commands::experiment(common, exp))
        }
        Command::StrongType(c) => ("strong_type", "strong-type", Some(c), commands::experiment(c, "strong_type")),
        Command::ModularFs { common, unweighted } => {
            let exp = if *unweighted { "unweighted_modular" } else { "modular_fs" };
            (exp, "modular-fs", Some(common), commands::experiment(common, exp))
        }
        Command::NormFs { common, unweighted } => {
            let exp = if *unweighted { "unweighted_norm" } else { "norm_fs" };
            (exp, "norm-fs", Some(common), commands::experiment(common, exp))
        }
        Command::TwoWeight(c) => ("two_weight", "two-weight", Some(c), commands::experiment(c, "two_weight")),
        Command::WeightsEstimate(c) => ("weights_estimate", "weights-estimate", Some(c), commands::weights_estimate(c)),
        Command::Covering(c) => ("covering", "covering", Some(c), commands::covering(c)),
        Command::ValidateRho(c) => ("validate_rho", "validate-rho", Some(c), commands::validate_rho(c)),
        Command::Selftest { output } => ("selftest", "selftest", None, selftest::run(output)),
    };
    let dir = match (&cli.command, common) {
        (Command::Selftest { output }, _) => output.clone(),
        (_, Some(c)) => c.output.clone(),
        _ => PathBuf::from("."),
    };
    match result {
        Ok(passed) => {
            if let Err(Failure::Usage(msg)) = write_sidecar(&dir, stem, name, common, threads, passed) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
