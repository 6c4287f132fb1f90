use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use socialhk_cli::commands::{run, Cli};
use socialhk_cli::{EXIT_BUDGET, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            // A closed pipe downstream is not our failure.
            let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
            if outcome.partial {
                eprintln!("step budget exhausted; results are partial");
                ExitCode::from(EXIT_BUDGET)
            } else {
                ExitCode::from(EXIT_OK)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
