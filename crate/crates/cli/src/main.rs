use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dyn_densest::config::parse_rational;
use dyn_densest::Rational;
use dyn_densest_cli::{parse_stream, run, RunError, RunMode, RunOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_STREAM: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Replays an update stream through a densest-subgraph maintainer.
#[derive(Parser, Debug)]
#[command(name = "dyn-densest", version)]
struct Cli {
    /// Stream file; reads stdin when absent or `-`.
    input: Option<PathBuf>,
    /// Maintainer variant; defaults to hypergraph for ranked streams, worstcase otherwise.
    #[arg(long, value_enum)]
    mode: Option<RunMode>,
    /// Approximation target, as `p/q` or a decimal.
    #[arg(long, value_parser = rational)]
    eps: Option<Rational>,
    /// Slack rate; derived from eps and n when absent.
    #[arg(long, value_parser = rational)]
    alpha: Option<Rational>,
    /// Loop budget constant of the worst-case rules.
    #[arg(long)]
    budget_c: Option<u64>,
    /// Duplication count k.
    #[arg(long)]
    dup_k: Option<u64>,
    /// Truncation threshold T (combined and hypergraph modes).
    #[arg(long)]
    threshold_t: Option<u64>,
    /// Check every invariant after each event and oracle brackets at each query.
    #[arg(long)]
    verify: bool,
    /// Print only the metrics line.
    #[arg(long)]
    metrics_only: bool,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_input(path: Option<&PathBuf>) -> io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let text = match read_input(cli.input.as_ref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read stream: {e}");
            return ExitCode::from(EXIT_STREAM);
        }
    };
    let stream = match parse_stream(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_STREAM);
        }
    };
    let opts = RunOptions {
        mode: cli.mode,
        eps: cli.eps,
        alpha: cli.alpha,
        budget_c: cli.budget_c,
        dup_k: cli.dup_k,
        threshold_t: cli.threshold_t,
        verify: cli.verify,
    };
    match run(&stream, &opts) {
        Ok(report) => {
            let mut out = io::stdout().lock();
            if out.write_all(report.render(cli.metrics_only).as_bytes()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                RunError::Usage(_) => EXIT_USAGE,
                RunError::Event { .. } => EXIT_STREAM,
                RunError::Verification { .. } => EXIT_VERIFY,
            })
        }
    }
}
