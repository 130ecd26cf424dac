use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use peano_cli::{parse_mem, run, Cli, MAX_MEM_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let stderr = std::io::stderr();
    let max_mem = match std::env::var(MAX_MEM_ENV) {
        Ok(s) => match parse_mem(&s) {
            Ok(m) => Some(m),
            Err(msg) => {
                let _ = writeln!(stderr.lock(), "error: {msg}");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };
    let mut out = std::io::BufWriter::new(std::io::stdout());
    let res = run(cli, max_mem, &mut out, &mut std::io::stderr());
    let _ = out.flush();
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr.lock(), "error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
