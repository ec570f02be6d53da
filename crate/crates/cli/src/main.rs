use std::process::ExitCode;

use clap::Parser;
use fbq_cli::{configure_threads, execute, Cli};

fn main() -> ExitCode {
    let spec = Cli::parse().into_spec();
    match configure_threads().and_then(|()| execute(&spec)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fbq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
