use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use coordproj::error::{CliError, CliResult};
use coordproj::{report, run, Cli};

fn execute(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let start = Instant::now();
    let mut rep = run(cli)?;
    if !cli.deterministic {
        rep.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let text = rep.to_json();
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e))?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::io("<stdout>", e)),
                _ => {}
            }
        }
    }
    if let Some(path) = &cli.csv {
        std::fs::write(path, rep.curves_csv()).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", report::error_json(e.reason(), &e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
