//! Flat `key = value` config files. Each key names a long flag (with `_` or
//! `-`); a value of `true` turns on a switch, `false` leaves it off. Flags on
//! the command line win.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use crate::error::CliError;

/// Path given by `--config PATH` or `--config=PATH`, if any.
fn config_path(argv: &[OsString]) -> Result<Option<PathBuf>, CliError> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return match it.next() {
                Some(p) => Ok(Some(PathBuf::from(p))),
                None => Err(CliError::Usage("--config needs a path".into())),
            };
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

fn has_flag(argv: &[OsString], flag: &str) -> bool {
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.strip_prefix(flag).is_some_and(|rest| rest.starts_with('='))
    })
}

pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`", no + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key '{}'", no + 1, k.trim())));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Append config-file settings for flags the command line does not set.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv)? else { return Ok(argv) };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut extra = Vec::new();
    for (key, value) in parse_lines(&text)? {
        let flag = format!("--{key}");
        if has_flag(&argv, &flag) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(OsString::from(flag)),
            "false" => {}
            _ => {
                extra.push(OsString::from(flag));
                extra.push(OsString::from(value));
            }
        }
    }
    let mut merged = argv;
    merged.extend(extra);
    Ok(merged)
}
