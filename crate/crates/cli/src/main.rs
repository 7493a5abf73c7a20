use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod build;
mod code;
mod verify;

/// Projective planes, their codes and exact counting.
#[derive(Parser, Debug)]
#[command(name = "planecode", version)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an incidence system in `.inc` format.
    Build {
        #[command(subcommand)]
        kind: build::BuildKind,
        #[command(flatten)]
        out: OutArg,
    },
    /// Codes spanned by the lines of a system.
    Code {
        #[command(subcommand)]
        action: code::CodeAction,
    },
    /// Run a verification suite; exits 1 when an assertion fails.
    Verify {
        #[command(subcommand)]
        suite: verify::Suite,
    },
}

#[derive(Args, Debug, Clone)]
pub struct OutArg {
    /// Output file (stdout when omitted).
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
}

/// Failure categories mapped onto exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Assertion(String),
    Core(planecode::Error),
    Input(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Assertion(m) => write!(f, "assertion failed: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<planecode::Error> for Failure {
    fn from(e: planecode::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Core(e) => e.exit_code() as u8,
            Failure::Input(_) => 3,
        }
    }
}

fn exit_code_of(err: &anyhow::Error) -> u8 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return f.exit_code();
    }
    if let Some(e) = err.downcast_ref::<planecode::Error>() {
        return e.exit_code() as u8;
    }
    3
}

pub fn write_output(out: &OutArg, text: &str) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    Ok(std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?)
}

pub fn read_system(path: &PathBuf) -> anyhow::Result<planecode::IncidenceSystem> {
    Ok(planecode::parse_inc(&read_input(path)?).map_err(Failure::from)?)
}

pub fn read_plane(path: &PathBuf) -> anyhow::Result<planecode::Plane> {
    Ok(planecode::build_plane(read_system(path)?).map_err(Failure::from)?)
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match cli.command {
        Command::Build { kind, out } => build::run(kind, &out),
        Command::Code { action } => code::run(action, cli.seed),
        Command::Verify { suite } => verify::run(suite, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}
