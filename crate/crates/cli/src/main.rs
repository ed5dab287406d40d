//! `fuzzymech` command-line entry point.
//!
//! Exit codes: 0 success, 1 a checklist entry failed, 2 invalid configuration,
//! 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fuzzymech::scenario::{parse_config, run_scenario, ConfigError, RunError, RunReport, ScenarioKind};

const OUTPUT_DIR_ENV: &str = "FUZZYMECH_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "fuzzymech-out";

#[derive(Parser)]
#[command(name = "fuzzymech", version, about = "Fuzzy-source evolution and interference scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its outputs.
    Run {
        config: PathBuf,
        /// Output directory. Falls back to the config's `output.dir`, then to
        /// $FUZZYMECH_OUTPUT_DIR, then to ./fuzzymech-out.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print nothing on success.
        #[arg(long)]
        quiet: bool,
        /// Also write the report, including wall time, to this path.
        #[arg(long)]
        json_report: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the available scenarios.
    ListScenarios,
    /// Print the version.
    Version,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            output_dir,
            seed,
            quiet,
            json_report,
        } => run(&config, output_dir, seed, quiet, json_report.as_deref()),
        Command::Validate { config } => match parse_config(&config) {
            Ok(c) => {
                println!("{}: valid {} config", config.display(), c.scenario);
                ExitCode::SUCCESS
            }
            Err(e) => config_failure(&config, &e),
        },
        Command::ListScenarios => {
            for kind in ScenarioKind::ALL {
                println!("{:<18} {}", kind.name(), kind.description());
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("fuzzymech {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

fn config_failure(path: &Path, e: &ConfigError) -> ExitCode {
    eprintln!("error: {}: {e}", path.display());
    match e {
        ConfigError::Io { .. } => ExitCode::from(EXIT_IO),
        _ => ExitCode::from(EXIT_CONFIG),
    }
}

fn run(path: &Path, output_dir: Option<PathBuf>, seed: Option<u64>, quiet: bool, json_report: Option<&Path>) -> ExitCode {
    let mut config = match parse_config(path) {
        Ok(c) => c,
        Err(e) => return config_failure(path, &e),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let dir = output_dir
        .or_else(|| config.output.dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

    let report = match run_scenario(&config, &dir) {
        Ok(r) => r,
        Err(RunError::Config(e)) => return config_failure(path, &e),
        Err(RunError::Io(e)) => {
            eprintln!("error: {}: {e}", dir.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    if let Some(p) = json_report {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Err(e) = std::fs::write(p, text) {
            eprintln!("error: {}: {e}", p.display());
            return ExitCode::from(EXIT_IO);
        }
    }
    print_report(&report, &dir, quiet);
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn print_report(report: &RunReport, dir: &Path, quiet: bool) {
    if quiet {
        for c in report.failures() {
            eprintln!("FAIL {} measured {} bound {}", c.name, c.measured, c.bound);
        }
        return;
    }
    println!("scenario {}", report.scenario.scenario);
    for c in &report.checklist {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let rel = serde_json::to_value(c.relation).expect("enum serializes");
        print!("{tag} {:<34} {:>14e} {} {:e}", c.name, c.measured, rel.as_str().unwrap_or(""), c.bound);
        match &c.note {
            Some(n) => println!("  ({n})"),
            None => println!(),
        }
    }
    println!(
        "{} of {} checks passed in {:.3} s; outputs in {}",
        report.checklist.iter().filter(|c| c.pass).count(),
        report.checklist.len(),
        report.wall_time_s.unwrap_or(0.0),
        dir.display()
    );
}
