use std::io;
use std::process::ExitCode;

use bqr::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bqr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
