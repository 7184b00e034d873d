mod args;
mod commands;
mod util;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = util::prepare_out(&g.out).and_then(|()| match &cli.command {
        Command::Mgf(a) => commands::mgf::run(g, a),
        Command::Surface(a) => commands::surface::run(g, a),
        Command::HomScan(a) => commands::hom_scan::run(g, a),
        Command::TmsvScan(a) => commands::tmsv_scan::run(g, a),
        Command::Nctest(a) => commands::nctest::run(g, a),
        Command::Clicks(a) => commands::clicks::run(g, a),
        Command::Reconstruct(a) => commands::reconstruct::run(g, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("essq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
