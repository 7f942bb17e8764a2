use std::process::ExitCode;

use clap::Parser;
use spectral_bsa_cli::commands::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    match run(cli, command_line) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
