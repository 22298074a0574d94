use std::ffi::OsString;
use std::fs;

use clap::CommandFactory;

use crate::args::Cli;
use crate::UsageError;

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; keys are long flag names without the leading dashes.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key = value", n + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        let v = v.trim().trim_matches('"').to_string();
        if k.is_empty() {
            return Err(UsageError(format!("config line {}: empty key", n + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Splices config values in right after the subcommand name, so flags on
/// the command line (which come later and override) take precedence.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, UsageError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(sub_pos) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1)
    else {
        return Ok(args);
    };
    let root = Cli::command();
    let sub_name = args[sub_pos].to_string_lossy().into_owned();
    let Some(sub) = root.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| {
        UsageError(format!("cannot read config {}: {e}", path.to_string_lossy()))
    })?;

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in parse_config(&text)? {
        if key == "config" {
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            log::warn!("config key {key:?} does not apply to `{sub_name}`; ignored");
            continue;
        };
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        } else {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "" => injected.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(UsageError(format!("config key {key}: expected a boolean, got {value:?}")))
                }
            }
        }
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend(args[sub_pos + 1..].iter().cloned());
    Ok(out)
}
