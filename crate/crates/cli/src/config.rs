//! Flat `key = value` configuration files, merged into the argument list so
//! that command-line flags take precedence.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::args::COMMAND_NAMES;

/// Global flags that consume the following argument.
const VALUE_FLAGS: [&str; 7] = ["--config", "--units", "--c", "--hbar", "--format", "--output", "-o"];

/// Turn the file contents into flags: `key = value` becomes `--key value`,
/// `key = true` a bare `--key` and `key = false` nothing.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("config line {}: bad key {key:?}", i + 1));
        }
        if key == "config" {
            return Err(format!("config line {}: config files cannot nest", i + 1));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

pub fn load_config(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config(&text)
}

/// Value of `--config` on the raw command line; the last one wins.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

/// Position of the subcommand token, skipping values of global flags.
fn command_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if VALUE_FLAGS.contains(&a.as_ref()) {
            i += 2;
            continue;
        }
        if COMMAND_NAMES.contains(&a.as_ref()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Rebuild `prog [globals] cmd [rest]` as `prog cmd <config> [globals] [rest]`
/// so that every flag given on the command line comes after the file's.
pub fn merge(args: &[OsString], config: Vec<String>) -> Vec<OsString> {
    let Some(at) = command_index(args) else {
        return args.to_vec();
    };
    let mut merged = Vec::with_capacity(args.len() + config.len());
    merged.push(args[0].clone());
    merged.push(args[at].clone());
    merged.extend(config.into_iter().map(OsString::from));
    merged.extend(args[1..at].iter().cloned());
    merged.extend(args[at + 1..].iter().cloned());
    merged
}
