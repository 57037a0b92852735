use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub struct Output {
    json: bool,
    out_dir: Option<PathBuf>,
}

impl Output {
    pub fn new(json: bool, out_dir: Option<PathBuf>) -> Self {
        Self { json, out_dir }
    }

    /// `explicit` if given, otherwise `default_name` under the output
    /// directory, otherwise nothing.
    pub fn path(&self, explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| self.out_dir.as_ref().map(|d| d.join(default_name)))
    }

    pub fn write(&self, path: &Path, contents: &[u8]) -> anyhow::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    /// Prints the table (or the JSON with `--json`) and writes the JSON
    /// report where requested.
    pub fn report<T: Serialize>(
        &self,
        report: &T,
        table: &str,
        explicit: Option<&Path>,
        default_name: &str,
    ) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(report)?;
        if self.json {
            println!("{json}");
        } else {
            print!("{table}");
        }
        if let Some(path) = self.path(explicit, default_name) {
            self.write(&path, json.as_bytes())?;
            if !self.json {
                println!("report written to {}", path.display());
            }
        }
        Ok(())
    }
}
