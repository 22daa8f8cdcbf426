use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use nlpw_cli::commands::{run, write_file};
use nlpw_cli::config::{Cli, FileConfig, RunConfig};

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("NLPW_THREADS") else {
        return Ok(());
    };
    let threads: usize = v.trim().parse().with_context(|| format!("NLPW_THREADS = {v:?} is not a thread count"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.command, &file)?;
    let outcome = run(&cfg)?;
    for (path, bytes) in &outcome.side_files {
        write_file(path, bytes)?;
    }
    match &cfg.output.path {
        Some(path) => write_file(path, &outcome.report)?,
        None => std::io::stdout().write_all(&outcome.report)?,
    }
    let mut err = std::io::stderr().lock();
    for w in &outcome.warnings {
        writeln!(err, "{w}")?;
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
