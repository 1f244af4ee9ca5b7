use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use substitution_k0::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = RunConfig::from(cli);
    match run(&config) {
        Ok(out) => {
            if config.output.is_none() {
                let _ = std::io::stdout().write_all(out.text.as_bytes());
            }
            if out.exit_code == 3 {
                eprintln!("error: a computation cap was reached; the report is partial");
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
