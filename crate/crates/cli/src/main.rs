use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nctori::lattice::verify_nu0;
use nctori::Tally;
use nctori_cli::{report, run, Campaign, CliError, CliResult, Overrides, Suite, VerificationReport};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "nctori", version, about = "Verification campaigns on noncommutative tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write report.json and report.csv.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// JSON campaign config; without it a default corpus is generated.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance override for every verifier that takes one.
        #[arg(long)]
        tol: Option<f64>,
        /// Number of generated instances.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Scan the lattice point constant and compare it with its bound.
    Nu0 {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1e4)]
        lambda_max: f64,
        /// Also write a report to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize one or more report.json files.
    Summarize {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

fn verdict(rep: &VerificationReport) -> ExitCode {
    if rep.has_failures() {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Verify {
            suite,
            config,
            seed,
            out,
            tol,
            count,
        } => {
            let campaign = Campaign::resolve(
                suite,
                &Overrides {
                    config,
                    seed,
                    out,
                    tol,
                    count,
                },
            )?;
            let rep = run(&campaign)?;
            let (json, csv) = report::write(&rep, &campaign.out)?;
            print!("{}", report::summarize(&rep.records));
            println!("wrote {} and {}", json.display(), csv.display());
            Ok(verdict(&rep))
        }
        Command::Nu0 { n, lambda_max, out } => {
            let rec = verify_nu0(&format!("nu0/n={n}"), n, lambda_max).map_err(|e| CliError::Usage(e.to_string()))?;
            println!(
                "nu0(n={n}, lambda_max={lambda_max}) = {} at lambda {}; bound {}: {}",
                rec.lhs, rec.diagnostics["argmax"], rec.rhs, rec.status
            );
            let rep = VerificationReport {
                suite: Suite::Nu0,
                seed: None,
                tolerance: None,
                tally: Tally::of([&rec]),
                records: vec![rec],
            };
            if let Some(dir) = out {
                let (json, csv) = report::write(&rep, &dir)?;
                println!("wrote {} and {}", json.display(), csv.display());
            }
            Ok(verdict(&rep))
        }
        Command::Summarize { reports } => {
            let mut records = Vec::new();
            for path in &reports {
                records.extend(report::load(path)?.records);
            }
            print!("{}", report::summarize(&records));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
