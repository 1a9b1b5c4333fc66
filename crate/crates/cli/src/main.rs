use std::process::ExitCode;

use clap::Parser;
use drfcheck::{execute, Category, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(Category::Config.exit_code() as u8);
        }
    };
    match execute(&cli).and_then(|r| r.write()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.category.exit_code() as u8)
        }
    }
}
