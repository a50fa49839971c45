//! Atomic output: every file is first written to a hidden temporary sibling and
//! only renamed into place once all of them were written successfully.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{CliError, Result};

/// Named file contents produced by a run.
pub type Files = Vec<(String, Vec<u8>)>;

fn temp_name(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!(".{name}.tmp-{}", std::process::id()))
}

/// Writes `files` into `dir`. On failure nothing is left behind.
pub fn write_atomic(dir: &Path, files: &Files) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut temps: Vec<PathBuf> = Vec::with_capacity(files.len());
    let cleanup = |temps: &[PathBuf]| {
        for t in temps {
            let _ = fs::remove_file(t);
        }
    };
    for (name, bytes) in files {
        let tmp = temp_name(dir, name);
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        });
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            cleanup(&temps);
            return Err(CliError::io(&tmp, e));
        }
        temps.push(tmp);
    }
    if let Some((name, _)) = files.iter().find(|(n, _)| dir.join(n).is_dir()) {
        cleanup(&temps);
        let target = dir.join(name);
        return Err(CliError::io(&target, std::io::Error::other("a directory is in the way")));
    }
    let mut done = Vec::with_capacity(files.len());
    for ((name, _), tmp) in files.iter().zip(&temps) {
        let target = dir.join(name);
        if let Err(e) = fs::rename(tmp, &target) {
            cleanup(&temps);
            return Err(CliError::io(&target, e));
        }
        done.push(target);
    }
    Ok(done)
}

/// Shortest representation that parses back to the same `f64`; scientific
/// notation outside `[1e-4, 1e15)`.
pub fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Accumulates a CSV document with shortest round-trip float formatting.
#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn with_header<S: AsRef<str>>(cols: &[S]) -> Self {
        let mut c = Self::default();
        let names: Vec<&str> = cols.iter().map(|s| s.as_ref()).collect();
        c.buf.push_str(&names.join(","));
        c.buf.push('\n');
        c
    }

    pub fn headerless() -> Self {
        Self::default()
    }

    pub fn row(&mut self, values: impl IntoIterator<Item = f64>) {
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            first = false;
            self.buf.push_str(&fmt_float(v));
        }
        self.buf.push('\n');
    }

    /// Appends a raw, pre-formatted line.
    pub fn line(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}
