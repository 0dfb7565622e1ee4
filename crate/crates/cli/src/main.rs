use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(cnls::main_with(cnls::Cli::parse()))
}
