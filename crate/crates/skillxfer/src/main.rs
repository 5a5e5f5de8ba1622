use std::process::ExitCode;

use clap::Parser;

use skillxfer::cli::{run, Cli};
use skillxfer::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.command.flags().quiet;
    let result = run(&cli.command).and_then(|out| {
        if !quiet {
            print!("{}", out.stdout);
        }
        match out.anomaly {
            Some(a) => Err(CliError::Anomaly(a)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            for line in e.stderr_lines() {
                eprintln!("{line}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
