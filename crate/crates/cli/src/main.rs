use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Parser, Subcommand, ValueEnum};

use ricci_dynamo_cli::run::{execute, write_outputs, Format};
use ricci_dynamo_cli::scenario::{self, Scenario};

/// Overrides `--threads` when set.
const THREADS_ENV: &str = "RICCI_DYNAMO_THREADS";

#[derive(Parser)]
#[command(name = "ricci-dynamo", about = "Fast dynamo spectra on Ricci-flow backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write one table per requested output
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Both)]
        format: FormatArg,
    },
    /// Parse and check a scenario without running it
    Validate { scenario: PathBuf },
    /// Print the tool version
    Version,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format { csv: true, json: false },
            FormatArg::Json => Format { csv: false, json: true },
            FormatArg::Both => Format::BOTH,
        }
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<Scenario, ExitCode> {
    let text =
        std::fs::read_to_string(path).map_err(|e| fail(4, format_args!("cannot read {}: {e}", path.display())))?;
    scenario::parse(&text).map_err(|e| fail(2, format_args!("{}: {e}", path.display())))
}

fn thread_count(flag: usize) -> Result<usize, ExitCode> {
    let count = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| fail(2, format_args!("{THREADS_ENV}: expected a positive integer, got `{v}`")))?,
        Err(_) => flag,
    };
    if count == 0 {
        return Err(fail(2, "threads: must be at least 1"));
    }
    Ok(count)
}

fn run(path: &Path, out: &Path, threads: usize, format: Format) -> Result<(), ExitCode> {
    let scenario = load(path)?;
    let threads = thread_count(threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| fail(1, format_args!("cannot start worker pool: {e}")))?;
    let timestamp = humantime::format_rfc3339_seconds(SystemTime::now()).to_string();
    let tables = pool
        .install(|| execute(&scenario, &timestamp))
        .map_err(|e| fail(e.exit_code() as u8, e))?;
    let written = write_outputs(&tables, out, format).map_err(|e| fail(e.exit_code() as u8, e))?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            out,
            threads,
            format,
        } => run(&scenario, &out, threads, format.into()),
        Command::Validate { scenario } => load(&scenario).map(|s| {
            println!(
                "ok: {} point(s), outputs: {}",
                s.points().len(),
                s.outputs.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
            );
        }),
        Command::Version => {
            println!("ricci-dynamo {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
