mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use report::{emit, Failure, Outcome, Report};

fn run(cli: &Cli) -> Outcome<()> {
    let config = serde_json::json!({
        "command": &cli.command,
        "format": cli.format,
        "output": cli.output,
    });
    let report: Report = match &cli.command {
        Command::BraidScan(a) => commands::braid_scan(a, config)?,
        Command::EpAtlas(a) => commands::ep_atlas(a, config)?,
        Command::Transition(a) => commands::transition(a, config)?,
        Command::DilateVerify(a) => commands::dilate_verify(a, config)?,
        Command::ReconstructDemo(a) => commands::reconstruct_demo(a, config)?,
    };
    emit(&report, cli.format, cli.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let kind = match f {
                Failure::Validation(_) => "invalid input",
                Failure::Numerical(_) => "numerical failure",
            };
            eprintln!("nhbraid: {kind}: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
