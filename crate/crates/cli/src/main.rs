use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use conic_cli::{dispatch, Cli, WORKERS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, found '{w}'");
                return ExitCode::from(2);
            }
        }
    }
    match dispatch(cli.command) {
        Ok(res) => {
            if res.manifest.output.is_none() {
                let mut out = std::io::stdout().lock();
                if out.write_all(res.rendered.as_bytes()).is_err() {
                    return ExitCode::from(3);
                }
            }
            for c in &res.outcome.checks {
                let status = if c.skipped {
                    "SKIP"
                } else if c.pass {
                    "PASS"
                } else {
                    "FAIL"
                };
                eprintln!("{status} {}: {}", c.name, c.details);
            }
            if res.outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
