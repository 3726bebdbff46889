use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod input;
mod output;
mod run;

use args::Cli;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    Input(String),
    Lib(semitoeplitz::Error),
    Io(String),
}

impl From<semitoeplitz::Error> for CliError {
    fn from(e: semitoeplitz::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numeric() => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let report = run::run(cli)?;
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report.write(cli.format, &mut w)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))
        }
        None => {
            let mut w = io::stdout().lock();
            report.write(cli.format, &mut w)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
