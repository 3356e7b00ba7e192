use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use optosense_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sense: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let artifact = run(cli)?;
    let text = artifact.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io)?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::Io)?,
    }
    let m = &artifact.metadata;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "rows: {} total, {} ok, {} flagged",
        m.rows_total, m.rows_ok, m.rows_flagged
    );
    if m.rows_total > 0 && m.rows_ok == 0 {
        return Err(CliError::Runtime("every point was flagged".into()));
    }
    Ok(())
}
