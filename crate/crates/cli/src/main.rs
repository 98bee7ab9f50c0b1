use std::process::ExitCode;

use clap::Parser;
use dicke_dyn_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dicke-dyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
