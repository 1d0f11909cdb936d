use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twistred::scenario::{self, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "twistred", version, about = "Twist reduction of SU(n)-structures: scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's full check chain.
    Run {
        /// Scenario JSON file, or the name of a built-in scenario.
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time in the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// List built-in scenarios.
    List {
        /// Print the full scenario definitions as a JSON array.
        #[arg(long)]
        json: bool,
    },
    /// Run only the sign/convention audit.
    Audit {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(arg: &str) -> twistred::Result<Scenario> {
    if std::path::Path::new(arg).exists() {
        Scenario::load(arg)
    } else {
        scenario::find(arg).ok_or_else(|| twistred::Error::Scenario(format!("no file or built-in scenario named {arg:?}")))
    }
}

fn print_summary(report: &scenario::Report) {
    for e in report.entries.iter() {
        eprintln!("{e}");
    }
    match report.first_failure() {
        None => eprintln!("{}: PASS ({} entries)", report.scenario.name, report.entries.len()),
        Some(e) => eprintln!("{}: FAIL, first failure: {}", report.scenario.name, e.name),
    }
}

fn execute(cli: Cli) -> twistred::Result<i32> {
    match cli.command {
        Command::List { json: true } => {
            println!("{}", serde_json::to_string_pretty(&scenario::registry())?);
            Ok(0)
        }
        Command::List { json: false } => {
            for sc in scenario::registry() {
                println!("{:<20} {}", sc.name, sc.description);
            }
            Ok(0)
        }
        Command::Run {
            scenario,
            seed,
            threads,
            out,
            timing,
        } => {
            let sc = load(&scenario)?;
            let opts = RunOptions {
                seed,
                timing,
                audit_only: false,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| twistred::Error::Scenario(e.to_string()))?;
            let report = pool.install(|| scenario::run(&sc, &opts))?;
            print_summary(&report);
            let json = report.to_json();
            match out {
                Some(path) => std::fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(report.exit_code())
        }
        Command::Audit { scenario, seed } => {
            let sc = load(&scenario)?;
            let opts = RunOptions {
                seed,
                timing: false,
                audit_only: true,
            };
            let report = scenario::run(&sc, &opts)?;
            print_summary(&report);
            println!("{}", report.to_json());
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
