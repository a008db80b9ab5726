//! `bias-forge`: run the pipeline stages from the command line.
//!
//! Exit status: 0 success, 1 configuration error, 2 data error, 3 finished
//! with flagged or failed items.

use std::path::PathBuf;
use std::process::ExitCode;

use bias_forge::pipeline::{self, Layout, PipelineError, RunConfig, StageName};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bias-forge", version, about = "Inject superficial biases into code and measure how LLM judges react")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the corpus and select correct/incorrect pairs.
    Ingest(Common),
    /// Apply every configured bias to every sample.
    Inject(Common),
    /// Check that variants still compile and behave like their originals.
    Validate(Common),
    /// Have each judge score originals and validated variants.
    Evaluate(Common),
    /// Compute degradation and MAD tables from stored judgments.
    Report(Common),
    /// All of the above, in order.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config value, e.g. `--set report.dead_band=1.0`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// More logging (-v debug, -vv trace).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only warnings and errors.
    #[arg(short, long, conflicts_with = "verbose")]
    quiet: bool,
}

fn report_error(e: &PipelineError) -> ExitCode {
    let body = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code() as u8)
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
    let (stages, common): (Vec<StageName>, &Common) = match &cli.command {
        Command::Ingest(c) => (vec![StageName::Ingest], c),
        Command::Inject(c) => (vec![StageName::Inject], c),
        Command::Validate(c) => (vec![StageName::Validate], c),
        Command::Evaluate(c) => (vec![StageName::Evaluate], c),
        Command::Report(c) => (vec![StageName::Report], c),
        Command::Run(c) => (StageName::ALL.to_vec(), c),
    };
    let level = match (common.quiet, common.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut config = match RunConfig::load(&common.config, &overrides) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    if let Some(out) = &common.out {
        config.out_dir = Some(out.clone());
    }
    let Some(out) = config.out_dir.clone() else {
        return report_error(&PipelineError::Config("no output directory: pass --out or set out_dir".into()));
    };
    let layout = Layout::new(out);

    let mut partial = false;
    for stage in stages {
        match pipeline::run_stage(stage, &config, &layout) {
            Ok(outcome) => {
                println!("{}", outcome.summary());
                partial |= outcome.partial;
                if stage == StageName::Report {
                    if let Ok(table) = std::fs::read_to_string(layout.path("reports/table.txt")) {
                        print!("{table}");
                    }
                }
            }
            Err(e) => return report_error(&e),
        }
    }
    if partial {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
