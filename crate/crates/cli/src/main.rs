//! `l2tors`: command-line front end.
//!
//! Exit statuses: 0 success, 2 invalid input or failed validation, 3 a
//! numeric precondition failed (indefinite or non-self-adjoint Laplacian,
//! vanishing determinant). Diagnostics go to stderr, reports to stdout or
//! `--output`.

mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

const THREADS_ENV: &str = "L2TORS_THREADS";

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Failure::Validation(format!("{THREADS_ENV}={v} is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(Failure::Validation("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn run(cli: &Cli) -> Result<Option<String>, Failure> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Validation(format!("cannot start {n} worker threads: {e}")))?;
    }
    let done = match &cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Betti(a) => commands::betti_cmd(a),
        Command::Logdet(a) => commands::logdet_cmd(a),
        Command::Torsion(a) => commands::torsion_cmd(a),
        Command::AutoTorsion(a) => commands::auto_torsion_cmd(a),
        Command::Mahler(a) => commands::mahler_cmd(a),
        Command::Combine(a) => commands::combine_cmd(a),
        Command::Growth(a) => commands::growth_cmd(a),
    }?;
    let mut job = done.job;
    job.knob("format", format!("{:?}", cli.format).to_lowercase());
    let out = report::render(&job, &done.body, cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Validation(format!("cannot write report: {e}")))?;
        }
    }
    Ok(done.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failed)) | Err(Failure::Validation(failed)) => {
            eprintln!("error: {failed}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
