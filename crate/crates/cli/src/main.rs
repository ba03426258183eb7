use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use vcsp_cli::{run, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            // gen without --out prints the instance itself
            let printed_instance = matches!(&cli.command, Command::Gen(a) if a.out.is_none());
            if !printed_instance {
                let _ = writeln!(std::io::stdout(), "{}", report.to_json());
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
