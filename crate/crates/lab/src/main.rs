use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = pairsig::cli::Cli::parse();
    match pairsig::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pairsig: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
