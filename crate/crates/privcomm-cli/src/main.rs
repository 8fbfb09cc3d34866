//! privcomm command line: analyze communication matrices for private
//! computability, compute per-round privacy reports, build the bundled
//! protocol constructions, and sweep parameter grids.
//!
//! Exit codes: 0 success, 2 validation error, 3 resource budget exceeded,
//! 4 numerical failure.

mod args;
mod commands;
mod input;
mod output;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::AnalyzeMatrix(a) => commands::analyze_matrix(a),
        Command::Privacy(a) => commands::privacy(a),
        Command::Paper(a) => commands::paper(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
