//! `key = value` config files, merged into the command line.
//!
//! Keys mirror long flags (`n_sites` and `n-sites` are the same key).
//! `command = <subcommand>` names the subcommand when the command line does not.
//! Flags given on the command line override the file.

use std::fs;

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

pub fn parse_config(text: &str) -> LabResult<Vec<ConfigEntry>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| LabError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key.starts_with('-') {
            return Err(LabError::Usage(format!("config line {}: bad key", lineno + 1)));
        }
        entries.push(ConfigEntry { key, value: value.trim().to_string() });
    }
    Ok(entries)
}

fn take_config_path(args: &mut Vec<String>) -> LabResult<Option<String>> {
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(LabError::Usage("--config needs a file path".into()));
            }
            let path = args.remove(i + 1);
            args.remove(i);
            return Ok(Some(path));
        }
        if let Some(path) = args[i].strip_prefix("--config=") {
            let path = path.to_string();
            args.remove(i);
            return Ok(Some(path));
        }
        i += 1;
    }
    Ok(None)
}

/// Rewrites `argv` so that entries of a `--config` file precede the
/// command-line flags of the chosen subcommand.
pub fn merge_config_args(argv: Vec<String>, subcommands: &[&str]) -> LabResult<Vec<String>> {
    let mut iter = argv.into_iter();
    let program = iter.next().unwrap_or_else(|| "qwalk".into());
    let mut rest: Vec<String> = iter.collect();
    let Some(path) = take_config_path(&mut rest)? else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let text = fs::read_to_string(&path).map_err(|e| LabError::Usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config(&text)?;

    let position = rest.iter().position(|a| subcommands.contains(&a.as_str()));
    let from_file = entries.iter().find(|e| e.key == "command").map(|e| e.value.clone());
    let command = match position {
        Some(p) => rest.remove(p),
        None => from_file.ok_or_else(|| LabError::Usage(format!("config {path} names no command and none was given")))?,
    };

    let mut out = vec![program, command];
    for entry in entries.iter().filter(|e| e.key != "command") {
        match entry.value.as_str() {
            "true" => out.push(format!("--{}", entry.key)),
            "false" => {}
            value => {
                out.push(format!("--{}", entry.key));
                out.push(value.to_string());
            }
        }
    }
    out.extend(rest);
    Ok(out)
}
