mod args;
mod commands;
mod config;
mod io;
mod journal;
mod qspec;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};
use waf_core::Error;

use crate::args::{Cli, Command};
use crate::commands::{command_name, execute, Context, Outcome};
use crate::config::Config;
use crate::journal::{InputHash, RunRecord};

const EXIT_NO_SOLUTION: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    if e.is_no_solution() {
        EXIT_NO_SOLUTION
    } else if e.is_validation()
        || matches!(
            e,
            Error::BoundInapplicable(_) | Error::FoliationUndefinedBeyondWaf(_) | Error::ThresholdOutOfRange(_)
        )
    {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Validation { .. } => "Validation",
        Error::MeshMismatch => "MeshMismatch",
        Error::NoSolutionDetected { .. } => "NoSolutionDetected",
        Error::MaxIterations { .. } => "MaxIterations",
        Error::BoundInapplicable(_) => "BoundInapplicable",
        Error::FoliationUndefinedBeyondWaf(_) => "FoliationUndefinedBeyondWAF",
        Error::Eigensolver(_) => "Eigensolver",
        Error::Numerical(_) => "Numerical",
        Error::Ray { source, .. } => error_kind(source),
        Error::ThresholdOutOfRange(_) => "ThresholdOutOfRange",
        Error::Io(_) => "Io",
        Error::Json(_) => "Json",
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { 0 });
        }
    };
    ExitCode::from(run(&cli, argv))
}

/// Run one command: write artifacts, journal the record, return the exit code.
fn run(cli: &Cli, argv: Vec<String>) -> u8 {
    if let Command::Replay { record } = cli.command {
        return replay(cli, record);
    }
    let started = Instant::now();
    let mut ctx = Context::default();
    let result = Config::load(cli.config.as_deref()).and_then(|config| execute(&cli.command, &config, &mut ctx));
    let (code, outputs) = match result {
        Ok(outcome) => match deliver(cli, &outcome) {
            Ok(()) => (0, outcome.summary),
            Err(e) => report_error(&e),
        },
        Err(e) => report_error(&e),
    };
    if !cli.no_journal {
        let path = journal::resolve_path(cli.journal.as_deref(), cli.out.as_deref());
        let record = RunRecord {
            command: command_name(&cli.command).to_string(),
            input_hashes: input_hashes(&ctx),
            parameters: Value::Object(ctx.parameters),
            outputs,
            exit_code: code as i32,
            timestamp: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
            argv,
        };
        if let Err(e) = journal::append(&path, &record) {
            eprintln!("warning: journal not written: {e}");
        }
    }
    code
}

fn report_error(e: &Error) -> (u8, Value) {
    eprintln!("error: {e}");
    (exit_code(e), json!({ "error": { "kind": error_kind(e), "message": e.to_string() } }))
}

fn input_hashes(ctx: &Context) -> Vec<InputHash> {
    ctx.inputs
        .hashes
        .iter()
        .map(|(role, path, sha256)| InputHash {
            role: role.clone(),
            path: path.clone(),
            sha256: sha256.clone(),
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

fn deliver(cli: &Cli, outcome: &Outcome) -> Result<(), Error> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::validation(dir.display().to_string(), e.to_string()))?;
        write_file(&dir.join(outcome.artifact_name), &outcome.artifact)?;
        for (name, text) in &outcome.extras {
            write_file(&dir.join(name), text)?;
        }
    }
    for (path, text) in &outcome.writes {
        write_file(path, text)?;
    }
    let mut stdout = std::io::stdout().lock();
    // A closed pipe downstream is not an error of this command.
    let _ = stdout.write_all(outcome.artifact.as_bytes());
    let _ = stdout.flush();
    Ok(())
}

/// Re-execute a journaled record without side effects and compare.
fn replay(cli: &Cli, index: Option<usize>) -> u8 {
    let path = journal::resolve_path(cli.journal.as_deref(), cli.out.as_deref());
    let outcome = (|| -> Result<Value, Error> {
        let records = journal::load(&path)?;
        let n = index.unwrap_or(records.len());
        let record = n
            .checked_sub(1)
            .and_then(|i| records.get(i))
            .ok_or_else(|| Error::validation("--record", format!("journal has {} records, asked for {n}", records.len())))?;
        if record.input_hashes.iter().any(|h| h.path == "-") {
            return Err(Error::validation(format!("record {n}"), "command read standard input and cannot be replayed"));
        }
        let original = Cli::try_parse_from(&record.argv)
            .map_err(|e| Error::validation(format!("record {n}"), e.to_string()))?;
        let mut ctx = Context::default();
        let result = Config::load(original.config.as_deref()).and_then(|c| execute(&original.command, &c, &mut ctx));
        let (code, outputs) = match result {
            Ok(o) => (0, o.summary),
            Err(e) => (exit_code(&e), json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } })),
        };
        let hashes = serde_json::to_string(&input_hashes(&ctx))?;
        let inputs_match = hashes == serde_json::to_string(&record.input_hashes)?;
        let parameters_match = Value::Object(ctx.parameters) == record.parameters;
        let outputs_match = serde_json::to_string(&outputs)? == serde_json::to_string(&record.outputs)?;
        let exit_match = code as i32 == record.exit_code;
        Ok(json!({
            "record": n,
            "command": record.command,
            "inputs_match": inputs_match,
            "parameters_match": parameters_match,
            "outputs_match": outputs_match,
            "exit_code_match": exit_match,
            "reproduced": inputs_match && parameters_match && outputs_match && exit_match,
        }))
    })();
    match outcome {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report["reproduced"] == json!(true) {
                0
            } else {
                EXIT_NUMERICAL
            }
        }
        Err(e) => report_error(&e).0,
    }
}
