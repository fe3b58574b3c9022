//! `besum`: reproducible experiments on exponential sums over sparse sets.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 big-integer
//! budget exceeded, 4 factoradic depth too small.

mod cli;
mod exec;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use crate::cli::{Cli, Command};
use crate::exec::{CliError, EXIT_CONFIG, EXIT_IO};
use crate::output::{config_hash, pretty, render, resolve_format, Provenance};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("besum: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Command::Run(args) = &cli.command {
        let text = fs::read_to_string(&args.config).map_err(|e| CliError::config("config", e))?;
        for (k, argv) in run_entries(&text)?.into_iter().enumerate() {
            let mut sub = Cli::try_parse_from(&argv)
                .map_err(|e| CliError::config(&format!("config entry {k}"), e.to_string().trim_end()))?;
            sub.common.dry_run |= cli.common.dry_run;
            if let Command::Run(_) = sub.command {
                return Err(CliError::config(&format!("config entry {k}"), "nested run"));
            }
            execute(sub)?;
        }
        return Ok(());
    }

    let common = &cli.common;
    let plan = exec::prepare(&cli.command, common)?;
    let config = json!({
        "command": serde_json::to_value(&cli.command).expect("arguments serialize"),
        "seed": common.seed,
    });
    let format = resolve_format(common.format, common.out.as_deref());

    if common.dry_run {
        let report = json!({
            "dry_run": true,
            "config": config,
            "config_hash": config_hash(&config),
            "format": format,
            "out": common.out,
            "plan": plan.description,
        });
        return to_stdout(&pretty(&report));
    }

    let artifact = plan.run()?;
    let text = render(&artifact, format, &Provenance::new(config, common.seed));
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => to_stdout(&text),
    }
}

/// A reader closing the pipe early (`| head`) is not an error.
fn to_stdout(text: &str) -> Result<(), CliError> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError { code: EXIT_IO, message: format!("stdout: {e}") })
        }
        _ => Ok(()),
    }
}

/// A config file holds one `{"verb": ..., "args": {...}}` object or a list of
/// them; each becomes an argument vector. `"verb"` may contain a space, as in
/// `"factoradic encode"`.
fn run_entries(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::config("config", e))?;
    let entries = match value {
        Value::Array(v) => v,
        other => vec![other],
    };
    entries
        .iter()
        .enumerate()
        .map(|(k, entry)| {
            let field = format!("config entry {k}");
            let verb = entry
                .get("verb")
                .and_then(Value::as_str)
                .ok_or_else(|| CliError::config(&field, "missing string field `verb`"))?;
            let mut argv = vec!["besum".to_string()];
            argv.extend(verb.split_whitespace().map(String::from));
            let args = match entry.get("args") {
                None => serde_json::Map::new(),
                Some(Value::Object(m)) => m.clone(),
                Some(_) => return Err(CliError::config(&field, "`args` must be an object")),
            };
            for (key, v) in args {
                let flag = format!("--{}", key.replace('_', "-"));
                match v {
                    Value::Bool(true) => argv.push(flag),
                    Value::Bool(false) | Value::Null => {}
                    Value::String(s) => argv.extend([flag, s]),
                    Value::Array(items) => {
                        let parts: Vec<String> = items.iter().map(scalar).collect();
                        argv.extend([flag, parts.join(",")]);
                    }
                    other => argv.extend([flag, scalar(&other)]),
                }
            }
            Ok(argv)
        })
        .collect()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
