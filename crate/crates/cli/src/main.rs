use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    jpurn::main_with(jpurn::Cli::parse())
}
