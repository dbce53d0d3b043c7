use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = dfrkit::cli::Cli::parse();
    match dfrkit::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(dfrkit::cli::exit_code(&e))
        }
    }
}
