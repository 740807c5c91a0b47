use std::process::ExitCode;

use clap::Parser;

use bilex_cli::{run, validate, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match validate(&cli).and_then(|()| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
