use std::io::Write;
use std::process::ExitCode;

use buildings_lab::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, &args) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
