use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const TOOL: &str = "lexiseg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output files written so far; removed again if the command fails.
#[derive(Debug, Default)]
pub struct Outputs {
    paths: Vec<PathBuf>,
}

impl Outputs {
    /// Registers `path` before it is written.
    pub fn claim(&mut self, path: &Path) -> PathBuf {
        self.paths.push(path.to_path_buf());
        path.to_path_buf()
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        let p = self.claim(path);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))
    }

    pub fn cleanup(&self) {
        for p in &self.paths {
            if p.exists() {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Provenance block embedded in every JSON output.
#[derive(Debug, Clone)]
pub struct Meta {
    pub subcommand: &'static str,
    pub seed: u64,
    pub flags: Value,
}

impl Meta {
    pub fn new(subcommand: &'static str, seed: u64, flags: &impl Serialize) -> Self {
        let flags = serde_json::to_value(flags).unwrap_or(Value::Null);
        Meta { subcommand, seed, flags }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "subcommand": self.subcommand,
            "seed": self.seed,
            "flags": self.flags,
        })
    }

    /// One-line summary for text headers.
    pub fn header_line(&self) -> String {
        format!("{TOOL} {VERSION} {} seed={}", self.subcommand, self.seed)
    }

    pub fn flags_line(&self) -> String {
        format!("flags={}", self.flags)
    }
}

/// `report`'s fields at the top level plus `meta` and any `extra` keys.
pub fn report_json(meta: &Meta, report: &impl Serialize, extra: Vec<(&str, Value)>) -> Result<String> {
    let mut obj = match serde_json::to_value(report)? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("report".into(), other);
            m
        }
    };
    for (k, v) in extra {
        obj.insert(k.into(), v);
    }
    obj.insert("meta".into(), meta.to_value());
    let mut s = serde_json::to_string_pretty(&Value::Object(obj))?;
    s.push('\n');
    Ok(s)
}

pub fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        anyhow::bail!("input file {} does not exist", path.display());
    }
    Ok(())
}

pub fn require_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            anyhow::bail!("output directory {} does not exist", p.display())
        }
        _ => Ok(()),
    }
}
