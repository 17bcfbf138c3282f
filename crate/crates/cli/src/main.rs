use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use kobayashi_cli::commands::{execute, Cli, Failure};
use kobayashi_core::format::to_json;

const THREADS_ENV: &str = "KOBAYASHI_THREADS";

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", to_json(&f.to_doc()));
    ExitCode::from(f.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail(&Failure::input("UsageError", first));
        }
    };
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return fail(&Failure::input("ConfigError", format!("{THREADS_ENV} must be a positive integer, got {n:?}"))),
        }
    }
    let text = match execute(&cli) {
        Ok(t) => t,
        Err(f) => return fail(&f),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&Failure::input("IoError", e)),
    }
}
