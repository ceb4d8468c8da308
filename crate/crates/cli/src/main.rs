//! `qsloc`: batch computations on scenario files.
//!
//! Exit codes: 0 on success, 2 when the computed verdict is negative (for
//! example an arbitrage exists), 1 on input or computation errors.

mod commands;
mod report;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use commands::Options;
use report::Report;
use scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "qsloc", version, about = "Robust models, localization and superhedging on finite sample spaces")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Directory receiving `<command>.txt` and `<command>.json`.
    #[arg(long, global = true, env = "QSLOC_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pivot limit for every linear program solved.
    #[arg(long, global = true)]
    max_pivots: Option<usize>,
    /// Largest truncation level N for the continuum demo.
    #[arg(long, global = true)]
    truncation: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Robust no-arbitrage check with an arbitrage witness.
    NaCheck,
    /// Super- and subhedging prices of the claims, primal and dual.
    Superhedge,
    /// Robust FTAP for each martingale selector.
    Ftap,
    /// Primal and dual localizations of a risk measure.
    Localize,
    /// Risk measure values and penalty functions.
    RiskTable,
    /// Aggregation of a family, with optional stability check.
    Aggregate,
    /// Bliss-point consumption certified by sampling.
    Bliss,
    /// Truncated localization bubbles on (0, 1).
    BubbleDemo,
    /// Runs the acceptance suite.
    Selftest {
        /// Criteria to run; all when omitted.
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::NaCheck => "na-check",
            Command::Superhedge => "superhedge",
            Command::Ftap => "ftap",
            Command::Localize => "localize",
            Command::RiskTable => "risk-table",
            Command::Aggregate => "aggregate",
            Command::Bliss => "bliss",
            Command::BubbleDemo => "bubble-demo",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    let path = cli
        .scenario
        .as_deref()
        .with_context(|| format!("`{}` needs --scenario <path>", cli.command.name()))?;
    Scenario::load(path)
}

fn run(cli: &Cli) -> Result<Report> {
    if let Some(n) = cli.max_pivots {
        qsloc::lp::set_pivot_limit(n);
    }
    let opts = Options {
        seed: cli.seed,
        truncation: cli.truncation,
    };
    match &cli.command {
        Command::NaCheck => commands::na_check(&scenario(cli)?),
        Command::Superhedge => commands::superhedge(&scenario(cli)?),
        Command::Ftap => commands::ftap(&scenario(cli)?),
        Command::Localize => commands::localize(&scenario(cli)?),
        Command::RiskTable => commands::risk_table(&scenario(cli)?),
        Command::Aggregate => commands::aggregate(&scenario(cli)?),
        Command::Bliss => commands::bliss(&scenario(cli)?, &opts),
        Command::BubbleDemo => {
            let s = cli.scenario.as_deref().map(Scenario::load).transpose()?;
            commands::bubble_demo(s.as_ref(), &opts)
        }
        Command::Selftest { only } => commands::selftest(only),
    }
}

fn write_outputs(dir: &Path, rep: &Report) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for (ext, body) in [("txt", rep.to_text()), ("json", rep.to_json_string())] {
        let path = dir.join(format!("{}.{ext}", rep.command));
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rep = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match cli.format {
        Format::Table => print!("{}", rep.to_text()),
        Format::Machine => print!("{}", rep.to_json_string()),
    }
    if let Some(dir) = &cli.out {
        if let Err(e) = write_outputs(dir, &rep) {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    if rep.verdict == Some(false) {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
