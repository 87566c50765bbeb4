use std::process::ExitCode;

use clap::Parser;
use holonomic_cli::{config, run, Cli, CliError};

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(e) => return fail(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    if let CliError::Verification { report, .. } = &e {
        print!("{report}");
    }
    eprintln!("holonomic: {e}");
    ExitCode::from(e.exit_code() as u8)
}
