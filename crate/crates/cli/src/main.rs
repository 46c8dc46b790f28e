mod args;
mod commands;
mod report;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format, RunConfig, UsageError};

const USAGE_EXIT: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e:#}\n\nFor more information, try '--help'.");
            ExitCode::from(USAGE_EXIT)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    if cfg.format == Format::Csv && cli.command != Command::Hscan {
        return Err(UsageError("--format csv is only available for hscan".into()).into());
    }
    let (format, out) = (cfg.format, cfg.out.clone());
    let report = commands::run(cli.command, cfg)?;
    for e in &report.errors {
        eprintln!("{}: {e}", report.command);
    }
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.hscan_csv()?,
    };
    match out {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(report.status.exit_code())
}
