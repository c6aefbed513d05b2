//! Command-line driver for the verification campaign.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use h2d::harness::{self, CampaignConfig, HarnessError, OutputFormat, RunOptions};

#[derive(Parser)]
#[command(
    name = "verify",
    version,
    about = "Numerical verification campaign for the h2d identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write a report.
    Run(RunArgs),
    /// List the suites in the catalog.
    List {
        /// Print the listing as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Campaign file; the bundled default campaign when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "VERIFY_JOBS")]
    jobs: Option<usize>,
    /// Overrides the seed from the campaign file.
    #[arg(long, env = "VERIFY_SEED")]
    seed: Option<u64>,
    /// Glob over suite ids, e.g. 'ks.*'.
    #[arg(long)]
    filter: Option<String>,
    /// Report path; overrides the campaign file. `-` writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit wall-clock times so reports are byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
    /// Suppress the per-check lines on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn run(args: RunArgs) -> Result<i32, HarnessError> {
    let config = match &args.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::bundled(),
    };
    let opts = RunOptions {
        jobs: args.jobs.unwrap_or(0),
        seed: args.seed,
        filter: args.filter.clone(),
        timing: !args.no_timing,
    };
    let report = harness::run_campaign(&config, &opts)?;
    if !args.quiet {
        for line in report.lines() {
            eprintln!("{line}");
        }
    }
    eprintln!("{}", report.summary_line());

    let format = match args.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Csv) => OutputFormat::Csv,
        None => config.output.format,
    };
    let text = report.render(format)?;
    match args.out.or(config.output.path.clone()) {
        Some(p) if p.as_os_str() != "-" => std::fs::write(&p, text)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", p.display())))?,
        _ => print!("{text}"),
    }
    Ok(report.summary.exit_code)
}

fn list(json: bool) {
    let cat = harness::catalog();
    if json {
        let l: Vec<_> = cat.iter().map(|s| s.listing()).collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&l).expect("listing serializes")
        );
        return;
    }
    for s in cat {
        println!(
            "{:<34} {:<14} tol {:<8.0e} {}",
            s.id, s.module, s.tolerance, s.tag
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { json } => {
            list(json);
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(args) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("verify: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
