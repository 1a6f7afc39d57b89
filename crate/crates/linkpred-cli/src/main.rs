//! Command-line front end: reproducible link-prediction runs over edge-list
//! files and the synthetic experiment protocol.

mod args;
mod commands;
mod manifest;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let result = match cli.command {
        args::Command::Predict(a) => commands::predict::run(&a),
        args::Command::Tune(a) => commands::tune::run(&a),
        args::Command::Simulate(a) => commands::simulate::run(&a),
        args::Command::Evaluate(a) => commands::evaluate::run(&a),
    };
    if let Err(message) = result {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
}
