use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qdm::input::parse_lambda;
use qdm::parallel::thread_count;
use qdm::{run, Command, Format, JobConfig};

/// Quantum D-modules of toric superspaces in exact arithmetic.
#[derive(Debug, Parser)]
#[command(name = "qdm", version)]
struct Cli {
    /// Stage to run.
    #[arg(value_enum)]
    command: Command,
    /// Input file in the `.toric` format.
    input: PathBuf,
    /// Truncation box, as `3,4` or `a=3,b=4`.
    #[arg(long)]
    cutoff: Option<String>,
    /// Fiber weight: `zero` or `symbolic`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let lambda = match cli.lambda.as_deref().map(parse_lambda).transpose() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let config = JobConfig {
        input: cli.input,
        command: cli.command,
        cutoff: cli.cutoff,
        lambda,
        format: cli.format,
        threads: thread_count(),
    };
    let out = run(&config);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
