use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use transvect_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli));
    match result {
        Ok(outcome) => {
            if cli.out.is_none() {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(outcome.text.as_bytes());
            }
            if outcome.verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
