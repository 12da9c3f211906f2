//! `discspec`: command-line front end for `discspec-core`.
//!
//! Exit status: 0 on success, 1 when `verify` finds a violated bound, 2 on
//! invalid configuration or unusable input/output paths, 3 on numerical
//! failure.

mod args;
mod commands;
mod error;
mod output;
mod threads;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use threads::Threaded;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    let solver = Threaded::new(cli.threads);
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &solver),
        Command::Eigenfunction(a) => commands::eigenfunction(a),
        Command::Nodal(a) => commands::nodal(a),
        Command::Hotspot(a) => commands::hotspot(a),
        Command::Crossing(a) => commands::crossing(a, &solver),
        Command::Heat(a) => commands::heat(a),
        Command::Verify(a) => commands::verify(a, &solver),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
