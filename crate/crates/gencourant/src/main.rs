use clap::Parser;
use gencourant::scene::PolicyName;
use gencourant::{load_scene, run_command, CliError, Command, Overrides};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Check generalized geometry identities on a JSON scene.
#[derive(Parser)]
#[command(name = "gencourant", version)]
struct Args {
    command: Command,
    scene: PathBuf,
    /// Seed for sample points and random test data.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sample points.
    #[arg(long)]
    points: Option<usize>,
    /// Tolerance for symbolic identities.
    #[arg(long)]
    tol_sym: Option<f64>,
    /// Tolerance for finite-difference comparisons.
    #[arg(long)]
    tol_fd: Option<f64>,
    /// What to do with connection parameters whose cyclic sum is nonzero.
    #[arg(long, value_enum)]
    policy: Option<PolicyName>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &Args) -> Result<bool, CliError> {
    let ov = Overrides {
        seed: args.seed,
        points: args.points,
        tol_sym: args.tol_sym,
        tol_fd: args.tol_fd,
        policy: args.policy,
    };
    let scene = load_scene(&args.scene, &ov)?;
    let report = run_command(args.command, &scene)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => match writeln!(std::io::stdout().lock(), "{json}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                return Err(CliError::Internal(format!("cannot write report: {e}")))
            }
            _ => {}
        },
    }
    for c in report.failures() {
        eprintln!("FAIL {}: residual {:e} > {:e} at {:?}", c.name, c.residual, c.tolerance, c.point);
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match std::panic::catch_unwind(|| run(&args)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
