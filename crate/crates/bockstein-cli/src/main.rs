mod job;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use job::{Instance, JobSpec};
use run::Target;

/// Exact computations with Bockstein maps and Massey products of finite p-groups.
#[derive(Parser)]
#[command(name = "bockstein", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of the job's `output` or stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant factors of `H^i(G, M)`.
    Cohomology { job: PathBuf },
    /// Class of the cup product of the first two characters.
    Cup { job: PathBuf },
    /// Coefficient table of `Ψ^(n)`.
    Bockstein { job: PathBuf },
    /// Triple product of the first three characters.
    Massey { job: PathBuf },
    /// Identity checks.
    Verify {
        #[arg(value_enum)]
        target: Target,
        job: PathBuf,
    },
    /// Exactness of the augmentation/norm sequence and the cyclic lifting.
    GaloisType { job: PathBuf },
    /// Solve `(χ, λ, ψ)_ρ = 0`.
    TripleVanish { job: PathBuf },
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Guard(String),
    Assertion(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Guard(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    job: &'a JobSpec,
    pass: bool,
    result: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let spec: JobSpec = toml::from_str(&text).map_err(|e| Failure::Input(e.to_string()))?;
    Instance::new(spec)
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let start = Instant::now();
    let (name, job) = match &cli.command {
        Command::Cohomology { job } => ("cohomology".to_string(), job),
        Command::Cup { job } => ("cup".into(), job),
        Command::Bockstein { job } => ("bockstein".into(), job),
        Command::Massey { job } => ("massey".into(), job),
        Command::Verify { target, job } => (format!("verify {}", format!("{target:?}").to_lowercase()), job),
        Command::GaloisType { job } => ("galois-type".into(), job),
        Command::TripleVanish { job } => ("triple-vanish".into(), job),
    };
    let inst = load(job)?;
    let (pass, result) = match &cli.command {
        Command::Cohomology { .. } => run::cohomology_cmd(&inst)?,
        Command::Cup { .. } => run::cup_cmd(&inst)?,
        Command::Bockstein { .. } => run::bockstein_cmd(&inst)?,
        Command::Massey { .. } => run::massey_cmd(&inst)?,
        Command::Verify { target, .. } => run::verify_cmd(&inst, *target)?,
        Command::GaloisType { .. } => run::galois_type_cmd(&inst)?,
        Command::TripleVanish { .. } => run::triple_cmd(&inst)?,
    };
    let report = Report {
        command: &name,
        job: &inst.spec,
        pass,
        result,
        seconds: cli.timings.then(|| start.elapsed().as_secs_f64()),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Assertion(e.to_string()))? + "\n";
    match cli.out.clone().or_else(|| inst.spec.output.clone().map(PathBuf::from)) {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:?}");
            ExitCode::from(e.code())
        }
    }
}
