//! `holed-torus`: builds a surface point, runs one check and prints a report.
//!
//! Exit codes: 0 when the check passes, 1 on a numeric failure, 2 on a
//! usage or domain error.

mod args;
mod commands;
mod point;

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use holed_torus::Error;
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, Command, Format};

const SCHEMA_VERSION: &str = "1.0";

#[derive(Serialize)]
struct Report<'a> {
    schema_version: &'static str,
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a Cli,
    point: Option<commands::PointSummary>,
    result: Value,
    pass: bool,
    timestamp: Timestamp,
}

#[derive(Serialize)]
struct Timestamp {
    started_unix_ms: u128,
    elapsed_ms: f64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numeric(_) | Error::Overflow { .. } | Error::IntegerOverflow => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.format == Format::Csv && !matches!(cli.command, Command::Spectrum { .. }) {
        eprintln!("error: --format csv is only available for `spectrum`");
        return ExitCode::from(2);
    }
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let clock = Instant::now();
    let outcome = commands::run(&cli);
    let timestamp = Timestamp {
        started_unix_ms,
        elapsed_ms: clock.elapsed().as_secs_f64() * 1e3,
    };

    let (report, code) = match outcome {
        Ok(out) => {
            if let Some(rows) = out.csv {
                return write_csv(&rows, out.pass);
            }
            let code = if out.pass { 0 } else { 1 };
            let report = Report {
                schema_version: SCHEMA_VERSION,
                tool: env!("CARGO_BIN_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name(),
                config: &cli,
                point: Some(out.point),
                result: out.result,
                pass: out.pass,
                timestamp,
            };
            (report, code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            let report = Report {
                schema_version: SCHEMA_VERSION,
                tool: env!("CARGO_BIN_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name(),
                config: &cli,
                point: None,
                result: json!({ "error": e.to_string(), "exit_code": code }),
                pass: false,
                timestamp,
            };
            (report, code)
        }
    };
    if cli.format == Format::Csv {
        return ExitCode::from(code);
    }
    let mut out = io::stdout().lock();
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    if writeln!(out, "{text}").is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

fn write_csv(rows: &[Vec<String>], pass: bool) -> ExitCode {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for row in rows {
        if let Err(e) = w.write_record(row) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if let Err(e) = w.flush() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(if pass { 0 } else { 1 })
}
