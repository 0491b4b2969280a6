use std::fs;
use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use ntangle_cli::{run, Cli, CliError, EXIT_INTERNAL};

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write to stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = panic::catch_unwind(|| {
        let output = run(&cli.command)?;
        emit(&cli, &output.render(cli.format))?;
        Ok::<_, CliError>(output.exit_code())
    });
    match outcome {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("ntangle: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
