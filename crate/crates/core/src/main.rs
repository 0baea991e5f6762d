use std::process::ExitCode;

use clap::Parser;
use toric_todd::cli::{run, Cli, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = run(&cli);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
