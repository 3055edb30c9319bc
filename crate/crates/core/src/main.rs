use std::process::ExitCode;

use clap::Parser;

use ainf_core::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    print!("{}", outcome.report.to_json());
    if let Some(e) = &outcome.report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.code as u8)
}
