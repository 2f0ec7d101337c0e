use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use negcone_cli::{init_threads, output_path, run, Cli, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("negcone: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match run(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if let Some(text) = outcome.artifact {
                match output_path(&cli.command) {
                    Some(path) => {
                        if let Err(e) = std::fs::write(path, text) {
                            eprintln!("negcone: {}: {e}", path.display());
                            return ExitCode::from(EXIT_USAGE as u8);
                        }
                    }
                    None if outcome.code != EXIT_OK => eprint!("{text}"),
                    None => {}
                }
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("negcone: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
