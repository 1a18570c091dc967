mod args;
mod commands;
mod failure;
mod load;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};
use failure::Failure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = cli.format == Some(Format::Json);
    // Keep the exit-code table closed: a panic is an internal error, not 101.
    std::panic::set_hook(Box::new(|info| eprintln!("qjd: internal error: {info}")));
    let outcome = std::panic::catch_unwind(|| commands::run(&cli))
        .unwrap_or_else(|_| Err(Failure::Internal("unexpected panic".into())));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if json_errors {
                eprintln!("{}", f.to_json());
            } else {
                eprintln!("qjd: {f}");
            }
            ExitCode::from(f.exit_code())
        }
    }
}
