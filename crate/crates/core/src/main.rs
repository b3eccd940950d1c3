use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use kpztail::cli::{run, RunConfig, EXIT_VALIDATION};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("KPZTAIL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("KPZTAIL_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("could not size the thread pool: {e}"))
}

fn main() -> ExitCode {
    let config = match RunConfig::from_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    if let Err(reason) = configure_threads() {
        eprintln!("error: {reason}");
        return ExitCode::from(EXIT_VALIDATION as u8);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(&config, &mut out);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
